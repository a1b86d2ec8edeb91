#include "thirdq/model_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thirdq/error.hpp"

namespace thirdq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, what, path);
}

Complex read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(path, "expected a complex number [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ComplexVector read_vector(const json& j, const std::string& path, int m) {
  if (!j.is_array()) fail(path, "expected an array of complex numbers");
  if (static_cast<int>(j.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "vector length must equal modes",
                path + ": got " + std::to_string(j.size()) + ", modes = " + std::to_string(m));
  }
  ComplexVector v(m);
  for (int i = 0; i < m; ++i) v(i) = read_complex(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

ComplexMatrix read_matrix(const json& j, const std::string& path, int m) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (static_cast<int>(j.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "matrix must be modes x modes",
                path + ": got " + std::to_string(j.size()) + " rows, modes = " + std::to_string(m));
  }
  ComplexMatrix M(m, m);
  for (int r = 0; r < m; ++r) {
    const ComplexVector row = read_vector(j[r], path + "[" + std::to_string(r) + "]", m);
    M.row(r) = row.transpose();
  }
  return M;
}

std::vector<NamedCandidate> read_candidates(const json& j, const std::string& path, int m) {
  if (!j.is_array()) fail(path, "expected an array of candidates");
  std::vector<NamedCandidate> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_object() || !j[k].contains("P")) fail(p, "candidate needs a \"P\" matrix");
    NamedCandidate c;
    c.name = j[k].value("name", "candidate" + std::to_string(k));
    c.P = read_matrix(j[k]["P"], p + ".P", m);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ModelFile parse_model_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, "model file is not valid JSON", e.what());
  }
  if (!root.is_object()) fail("$", "model must be a JSON object");
  if (!root.contains("modes") || !root["modes"].is_number_integer()) fail("$.modes", "required integer");
  const int m = root["modes"].get<int>();
  if (m < 1) fail("$.modes", "must be at least 1");
  if (!root.contains("h")) fail("$.h", "required modes x modes matrix");

  const ComplexMatrix h = read_matrix(root["h"], "$.h", m);
  const ComplexMatrix delta = root.contains("delta") ? read_matrix(root["delta"], "$.delta", m)
                                                     : ComplexMatrix::Zero(m, m);
  const ComplexVector alpha = root.contains("alpha") ? read_vector(root["alpha"], "$.alpha", m)
                                                     : ComplexVector::Zero(m);
  std::vector<JumpOperator> jumps;
  if (root.contains("jumps")) {
    const json& js = root["jumps"];
    if (!js.is_array()) fail("$.jumps", "expected an array");
    for (std::size_t k = 0; k < js.size(); ++k) {
      const std::string p = "$.jumps[" + std::to_string(k) + "]";
      if (!js[k].is_object()) fail(p, "expected an object with v, w, beta");
      JumpOperator j;
      j.v = js[k].contains("v") ? read_vector(js[k]["v"], p + ".v", m) : ComplexVector::Zero(m);
      j.w = js[k].contains("w") ? read_vector(js[k]["w"], p + ".w", m) : ComplexVector::Zero(m);
      j.beta = js[k].contains("beta") ? read_complex(js[k]["beta"], p + ".beta") : Complex(0.0, 0.0);
      jumps.push_back(std::move(j));
    }
  }

  ModelFile f;
  f.model = make_model(h, delta, alpha, std::move(jumps));

  if (root.contains("counting")) {
    const json& c = root["counting"];
    if (!c.is_object()) fail("$.counting", "expected {\"mode\", \"gamma\"}");
    PhotonCounting pc;
    if (c.contains("mode")) {
      if (!c["mode"].is_number_integer()) fail("$.counting.mode", "expected an integer");
      pc.mode = c["mode"].get<int>();
    }
    if (!c.contains("gamma") || !c["gamma"].is_number()) fail("$.counting.gamma", "required number");
    pc.gamma = c["gamma"].get<double>();
    if (pc.mode < 0 || pc.mode >= m) {
      throw Error(ErrorCode::IndexOutOfRange, "counted mode out of range", "$.counting.mode");
    }
    f.counting = pc;
  }
  if (root.contains("symmetries")) {
    const json& s = root["symmetries"];
    if (!s.is_object()) fail("$.symmetries", "expected {\"unitary\": [...], \"pt\": [...]}");
    if (s.contains("unitary")) f.unitary = read_candidates(s["unitary"], "$.symmetries.unitary", m);
    if (s.contains("pt")) f.pt = read_candidates(s["pt"], "$.symmetries.pt", m);
  }
  return f;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read model file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

}  // namespace thirdq
