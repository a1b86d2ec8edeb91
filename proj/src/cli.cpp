#include "thirdq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "thirdq/counting.hpp"
#include "thirdq/error.hpp"
#include "thirdq/fock_oracle.hpp"
#include "thirdq/model_json.hpp"
#include "thirdq/symmetry.hpp"
#include "thirdq/third_quantization.hpp"

namespace thirdq {

namespace {

using nlohmann::json;
using Cell = std::variant<long, double, Complex, std::string>;

json cplx(Complex z) { return json::array({z.real(), z.imag()}); }

json cvec(const ComplexVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cplx(v(i)));
  return a;
}

json cmat(const ComplexMatrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(cplx(M(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json ivec(const std::vector<int>& v) { return json(v); }

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// Flat table for CSV output; complex cells become _re/_im column pairs.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_csv(const Table& t, std::ostream& out) {
  // A column is complex if any row holds a complex cell there.
  std::vector<bool> is_complex(t.columns.size(), false);
  for (const auto& r : t.rows)
    for (std::size_t c = 0; c < r.size(); ++c)
      if (std::holds_alternative<Complex>(r[c])) is_complex[c] = true;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out << ',';
    if (is_complex[c]) out << t.columns[c] << "_re," << t.columns[c] << "_im";
    else out << t.columns[c];
  }
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Complex>) out << v.real() << ',' << v.imag();
            else if constexpr (std::is_same_v<T, std::string>) out << csv_escape(v);
            else if (is_complex[c]) out << v << ",0";
            else out << v;
          },
          r[c]);
    }
    out << '\n';
  }
}

struct Output {
  json doc;
  Table table;
};

void emit(const RunConfig& cfg, const Output& o, std::ostream& out) {
  if (cfg.outputFormat == "csv") write_csv(o.table, out);
  else out << std::setprecision(17) << o.doc.dump(2) << '\n';
}

json residuals_json(const FormResiduals& r, double tol) {
  return {{"symplectic", r.symplectic}, {"normal_form", r.normal_form}, {"lower_left", r.lower_left},
          {"s3_inverse", r.s3_inverse}, {"s2s3", r.s2s3},               {"trace", r.trace},
          {"tolerance", tol}};
}

json jordan_json(const ThirdQuantizedForm& f) {
  if (!f.jordan) return nullptr;
  return {{"mu", cplx(f.jordan->mu)}, {"nu", cplx(f.jordan->nu)}, {"head", f.jordan->p}, {"tail", f.jordan->p + 1}};
}

constexpr double kResidualTol = 1e-8;

ModelFile load(const RunConfig& cfg, std::ostream& err) {
  if (cfg.modelPath.empty()) throw Error(ErrorCode::InvalidInput, "--model is required", cfg.command);
  ModelFile mf = load_model_file(cfg.modelPath);
  for (const auto& w : mf.model.warnings) err << "warning: " << w << '\n';
  return mf;
}

Output cmd_spectrum(const RunConfig& cfg, const ModelFile& mf) {
  Output o;
  o.doc["command"] = "spectrum";
  o.table.columns = {"index", "lambda", "residual", "tolerance"};
  const LiouvillianBlocks b = assemble_liouvillian(mf.model);
  std::optional<ThirdQuantizedForm> form;
  try {
    form = third_quantize(b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedJordanStructure) throw;
    // No normal form exists; still report eigenvalues of the reduced matrix.
    const ReducedSpectrum rs = reduced_spectrum(b);
    o.doc["method"] = "reduced";
    o.doc["defective"] = rs.defective;
    o.doc["warning"] = e.what();
    json rows = json::array();
    for (Eigen::Index i = 0; i < rs.lambdas.size(); ++i) {
      rows.push_back({{"index", i}, {"value", cplx(rs.lambdas(i))}, {"residual", nullptr}, {"tolerance", nullptr}});
      o.table.rows.push_back({static_cast<long>(i), rs.lambdas(i), std::string(""), std::string("")});
    }
    o.doc["lambdas"] = rows;
    return o;
  }
  const double res = heff_eigencheck(*form);
  o.doc["method"] = form->method;
  o.doc["defective"] = form->jordan.has_value();
  json rows = json::array();
  for (Eigen::Index i = 0; i < form->lambdas.size(); ++i) {
    rows.push_back({{"index", i}, {"value", cplx(form->lambdas(i))}, {"residual", res}, {"tolerance", kResidualTol}});
    o.table.rows.push_back({static_cast<long>(i), form->lambdas(i), res, kResidualTol});
  }
  o.doc["lambdas"] = rows;
  o.doc["residuals"] = residuals_json(form->residuals, kResidualTol);
  o.doc["jordan"] = jordan_json(*form);

  if (cfg.occupation) {
    const Complex v = liouvillian_eigenvalue(*form, *cfg.occupation);
    o.doc["occupation"] = {{"n", ivec(*cfg.occupation)}, {"value", cplx(v)}};
  }
  const int order = cfg.order.value_or(2);
  json sums = json::array();
  for (const auto& oe : occupation_spectrum(*form, order))
    sums.push_back({{"n", ivec(oe.occupation)}, {"value", cplx(oe.value)}});
  o.doc["sums"] = sums;
  o.doc["sums_max_total"] = order;
  return o;
}

Output cmd_normal_form(const RunConfig&, const ModelFile& mf) {
  Output o;
  const ThirdQuantizedForm f = third_quantize(assemble_liouvillian(mf.model));
  o.doc["command"] = "normal-form";
  o.doc["method"] = f.method;
  o.doc["negated_t"] = f.negated_t;
  o.doc["lambdas"] = cvec(f.lambdas);
  o.doc["S"] = cmat(f.S);
  o.doc["S1"] = cmat(f.S1);
  o.doc["S2"] = cmat(f.S2);
  o.doc["S3"] = cmat(f.S3);
  o.doc["eta_prime"] = cvec(f.etaPrime);
  o.doc["L0"] = cplx(f.L0);
  o.doc["residuals"] = residuals_json(f.residuals, kResidualTol);
  o.doc["jordan"] = jordan_json(f);
  json cp = json::array();
  for (const auto& c : f.couplings) cp.push_back({{"i", c.i}, {"j", c.j}, {"value", cplx(c.value)}});
  o.doc["couplings"] = cp;

  o.table.columns = {"block", "row", "col", "value", "residual", "tolerance"};
  const double res = std::max(f.residuals.symplectic, f.residuals.normal_form);
  for (const auto& [name, M] : {std::pair<std::string, const ComplexMatrix*>{"S1", &f.S1}, {"S2", &f.S2}, {"S3", &f.S3}}) {
    for (Eigen::Index r = 0; r < M->rows(); ++r)
      for (Eigen::Index c = 0; c < M->cols(); ++c)
        o.table.rows.push_back({name, static_cast<long>(r), static_cast<long>(c), (*M)(r, c), res, kResidualTol});
  }
  for (Eigen::Index i = 0; i < f.lambdas.size(); ++i)
    o.table.rows.push_back({std::string("Lambda"), static_cast<long>(i), static_cast<long>(i), f.lambdas(i), res, kResidualTol});
  return o;
}

Output cmd_stability(const RunConfig&, const ModelFile& mf) {
  Output o;
  const ThirdQuantizedForm f = third_quantize(assemble_liouvillian(mf.model));
  const StabilityReport r = classify_stability(f);
  o.doc["command"] = "stability";
  o.doc["class"] = std::string(to_string(r.cls));
  o.doc["maxRealPart"] = r.maxRealPart;
  o.doc["spectralGap"] = r.spectralGap;
  o.doc["tolerance"] = r.tolerance;
  o.doc["method"] = f.method;
  o.doc["jordan"] = jordan_json(f);
  o.doc["lambdas"] = cvec(f.lambdas);
  o.table.columns = {"class", "maxRealPart", "spectralGap", "tolerance"};
  o.table.rows.push_back({std::string(to_string(r.cls)), r.maxRealPart, r.spectralGap, r.tolerance});
  return o;
}

Output cmd_cumulants(const RunConfig& cfg, const ModelFile& mf, std::ostream& err) {
  Output o;
  PhotonCounting pc{0, 1.0};
  if (mf.counting) pc = *mf.counting;
  else err << "note: no \"counting\" section; counting photons of mode 0 with gamma = 1\n";
  const double sMax = cfg.sMax.value_or(0.4);
  const int steps = cfg.sSteps.value_or(20);
  const int order = cfg.order.value_or(2);
  if (order < 1 || order > 4) throw Error(ErrorCode::InvalidInput, "--order must be 1..4 for cumulants");

  const LiouvillianBlocks b = assemble_liouvillian(mf.model);
  const QuadraticObservable obs = photon_current_observable(b, pc.mode, pc.gamma);
  const TiltedBranchSet set = track_branches_symmetric(b, obs, sMax, steps);
  const auto G = generating_function_samples(set);
  const auto F = factorial_cumulants(set, order);
  const auto K = factorial_to_ordinary(F);

  o.doc["command"] = "cumulants";
  o.doc["counting"] = {{"mode", pc.mode}, {"gamma", pc.gamma}};
  o.doc["grid_spacing"] = sMax / steps;
  o.doc["min_overlap"] = set.overlapLog;
  o.doc["overlap_threshold"] = 0.7;
  json samples = json::array();
  o.table.columns = {"s", "G", "min_overlap", "overlap_threshold"};
  for (std::size_t k = 0; k < G.size(); ++k) {
    samples.push_back({{"s", cplx(set.sGrid[k])}, {"G", cplx(G[k])}});
    o.table.rows.push_back({set.sGrid[k], G[k], set.overlapLog, 0.7});
  }
  o.doc["samples"] = samples;
  json fj = json::array(), kj = json::array();
  for (auto c : F) fj.push_back(cplx(c));
  for (auto c : K) kj.push_back(cplx(c));
  o.doc["factorial"] = fj;
  o.doc["ordinary"] = kj;
  return o;
}

json verdict_json(const std::string& name, const std::string& kind, const SymmetryVerdict& v, Table& t) {
  json conds = json::array();
  for (const auto& r : v.conditions) {
    conds.push_back({{"name", r.name}, {"residual", r.value}, {"location", r.location}});
    t.rows.push_back({name, kind, r.name, r.value, v.tolerance, std::string(v.holds ? "true" : "false")});
  }
  t.rows.push_back({name, kind, v.lifted.name, v.lifted.value, v.tolerance, std::string(v.holds ? "true" : "false")});
  return {{"name", name},
          {"kind", kind},
          {"holds", v.holds},
          {"tolerance", v.tolerance},
          {"conditions", conds},
          {"lifted", {{"name", v.lifted.name}, {"residual", v.lifted.value}}}};
}

Output cmd_symmetry(const RunConfig&, const ModelFile& mf, std::ostream& err) {
  Output o;
  o.doc["command"] = "symmetry";
  o.table.columns = {"candidate", "kind", "condition", "residual", "tolerance", "holds"};
  const LiouvillianBlocks b = assemble_liouvillian(mf.model);
  const HermiticityReport h = hermiticity_check(b);
  json hr = json::array();
  for (const auto& r : h.residuals) {
    hr.push_back({{"name", r.name}, {"residual", r.value}, {"location", r.location}});
    o.table.rows.push_back({std::string("hermiticity"), std::string("A"), r.name, r.value, h.tolerance,
                            std::string(h.pass ? "true" : "false")});
  }
  o.doc["hermiticity"] = {{"pass", h.pass}, {"tolerance", h.tolerance}, {"residuals", hr}};
  if (mf.unitary.empty() && mf.pt.empty()) err << "note: no \"symmetries\" candidates in the model file\n";

  json cands = json::array();
  bool any_pt = false;
  for (const auto& c : mf.unitary)
    cands.push_back(verdict_json(c.name, "unitary", unitary_symmetry_check(mf.model, b.diss, {c.P}), o.table));
  for (const auto& c : mf.pt) {
    const SymmetryVerdict v = pt_symmetry_check(mf.model, b.diss, {c.P});
    any_pt = any_pt || v.holds;
    cands.push_back(verdict_json(c.name, "pt", v, o.table));
  }
  o.doc["candidates"] = cands;
  o.doc["pt_phase"] = any_pt ? json(to_string(pt_classification(b))) : json(nullptr);
  return o;
}

Output cmd_oracle_check(const RunConfig& cfg, const ModelFile& mf, std::ostream& err, bool& mismatch) {
  Output o;
  const int cutoff = cfg.cutoff.value_or(25);
  const int order = cfg.order.value_or(2);
  const double tol = cfg.tol.value_or(1e-6);
  const ThirdQuantizedForm f = third_quantize(assemble_liouvillian(mf.model));
  const OracleGenerator gen = build_oracle(mf.model, cutoff);
  for (const auto& w : gen.warnings) err << "warning: " << w << '\n';
  const auto oracle = oracle_eigenvalues(gen);

  o.doc["command"] = "oracle-check";
  o.doc["cutoff"] = cutoff;
  o.doc["tolerance"] = tol;
  o.doc["oracle_trace_residual"] = trace_preservation_residual(gen);
  o.doc["warnings"] = gen.warnings;
  o.table.columns = {"occupation", "engine", "oracle", "deviation", "tolerance"};
  json rows = json::array();
  double worst = 0.0;
  for (const auto& oe : occupation_spectrum(f, order)) {
    Complex best = oracle.front();
    for (Complex e : oracle)
      if (std::abs(e - oe.value) < std::abs(best - oe.value)) best = e;
    const double dev = std::abs(best - oe.value);
    worst = std::max(worst, dev);
    rows.push_back({{"n", ivec(oe.occupation)}, {"engine", cplx(oe.value)}, {"oracle", cplx(best)}, {"deviation", dev}});
    o.table.rows.push_back({join(oe.occupation), oe.value, best, dev, tol});
  }
  o.doc["rows"] = rows;
  o.doc["max_deviation"] = worst;
  o.doc["pass"] = worst <= tol;
  mismatch = worst > tol;
  return o;
}

Output cmd_evolve_jordan(const RunConfig& cfg, std::ostream& err) {
  Complex mu, nu;
  if (cfg.mu && cfg.nu) {
    mu = *cfg.mu;
    nu = *cfg.nu;
  } else {
    const ModelFile mf = load(cfg, err);
    const ThirdQuantizedForm f = third_quantize(assemble_liouvillian(mf.model));
    if (!f.jordan) {
      throw Error(ErrorCode::InvalidInput, "model has no coalesced pair; pass --mu and --nu", cfg.modelPath);
    }
    mu = cfg.mu.value_or(f.jordan->mu);
    nu = cfg.nu.value_or(f.jordan->nu);
  }
  const double t = cfg.time.value_or(1.0);
  const std::vector<int> n = cfg.occupation.value_or(std::vector<int>{1, 0});
  if (n.size() != 2) throw Error(ErrorCode::InvalidInput, "--occupation must be \"n1,n2\" for evolve-jordan");
  const auto coeffs = jordan_evolution_coefficients(mu, nu, t, n[0], n[1]);

  Output o;
  o.doc["command"] = "evolve-jordan";
  o.doc["mu"] = cplx(mu);
  o.doc["nu"] = cplx(nu);
  o.doc["t"] = t;
  o.doc["initial"] = ivec(n);
  o.table.columns = {"m", "n1", "n2", "coefficient"};
  json rows = json::array();
  for (const auto& [m, c] : coeffs) {
    rows.push_back({{"m", m}, {"state", ivec({n[0] - m, n[1] + m})}, {"coefficient", cplx(c)}});
    o.table.rows.push_back({static_cast<long>(m), static_cast<long>(n[0] - m), static_cast<long>(n[1] + m), c});
  }
  o.doc["terms"] = rows;
  return o;
}

void write_error(std::ostream& err, const std::string& code, const std::string& message, const std::string& context) {
  err << json{{"code", code}, {"message", message}, {"context", context}}.dump() << '\n';
}

}  // namespace

std::vector<int> parse_occupation(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "occupation entries must be integers", text);
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size() || v < 0) throw Error(ErrorCode::InvalidInput, "occupation entries must be non-negative integers", text);
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "empty occupation", text);
  return out;
}

Complex parse_complex(const std::string& text) {
  std::stringstream ss(text);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im);
  try {
    std::size_t p1 = 0, p2 = 0;
    const double r = std::stod(re, &p1);
    const double i = im.empty() ? 0.0 : std::stod(im, &p2);
    if (p1 != re.size() || p2 != im.size()) throw std::invalid_argument(text);
    return {r, i};
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "expected a complex number \"re,im\"", text);
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
      throw Error(ErrorCode::InvalidInput, "unknown command", cfg.command);
    }
    if (cfg.outputFormat != "json" && cfg.outputFormat != "csv") {
      throw Error(ErrorCode::InvalidInput, "--output must be json or csv", cfg.outputFormat);
    }
    if (cfg.cutoff && *cfg.cutoff < 2) throw Error(ErrorCode::InvalidInput, "--cutoff must be at least 2");
    if (cfg.order && *cfg.order < 0) throw Error(ErrorCode::InvalidInput, "--order must be non-negative");
    if (cfg.sSteps && *cfg.sSteps < 8) throw Error(ErrorCode::InvalidInput, "--s-steps must be at least 8");
    if (cfg.tol && !(*cfg.tol > 0.0)) throw Error(ErrorCode::InvalidInput, "--tol must be positive");

    if (cfg.command == "evolve-jordan") {
      emit(cfg, cmd_evolve_jordan(cfg, err), out);
      return 0;
    }
    const ModelFile mf = load(cfg, err);
    if (cfg.command == "spectrum") emit(cfg, cmd_spectrum(cfg, mf), out);
    else if (cfg.command == "normal-form") emit(cfg, cmd_normal_form(cfg, mf), out);
    else if (cfg.command == "stability") emit(cfg, cmd_stability(cfg, mf), out);
    else if (cfg.command == "cumulants") emit(cfg, cmd_cumulants(cfg, mf, err), out);
    else if (cfg.command == "symmetry") emit(cfg, cmd_symmetry(cfg, mf, err), out);
    else {
      bool mismatch = false;
      emit(cfg, cmd_oracle_check(cfg, mf, err, mismatch), out);
      if (mismatch) {
        write_error(err, "OracleMismatch", "engine and oracle spectra differ beyond tolerance", cfg.modelPath);
        return 1;
      }
    }
    return 0;
  } catch (const Error& e) {
    write_error(err, std::string(to_string(e.code())), e.what(), e.context());
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what(), cfg.command);
    return 1;
  }
}

}  // namespace thirdq
