#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thirdq/cli.hpp"
#include "thirdq/error.hpp"
#include "thirdq/model_json.hpp"

using namespace thirdq;
using nlohmann::json;

namespace {

std::string model(const std::string& name) { return std::string(THIRDQ_MODELS_DIR) + "/" + name; }

struct Result {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
  json error() const { return json::parse(err.substr(err.rfind('{'))); }
};

Result invoke(RunConfig cfg) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(const std::string& command, const std::string& file) {
  RunConfig c;
  c.command = command;
  c.modelPath = model(file);
  return c;
}

Complex cval(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

ErrorCode parse_error(const std::string& text) {
  try {
    parse_model_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::OracleMismatch;  // sentinel: no error
}

std::string parse_context(const std::string& text) {
  try {
    parse_model_text(text);
  } catch (const Error& e) {
    return e.context();
  }
  return "";
}

}  // namespace

TEST(ModelJson, ParsesFullModel) {
  auto f = load_model_file(model("coupled.json"));
  EXPECT_EQ(f.model.m, 2);
  EXPECT_EQ(f.model.jumps.size(), 2u);
  EXPECT_NEAR(f.model.h(0, 1).real(), 0.5, 1e-15);
  ASSERT_TRUE(f.counting.has_value());
  EXPECT_EQ(f.unitary.size(), 1u);
  ASSERT_EQ(f.pt.size(), 1u);
  EXPECT_EQ(f.pt[0].name, "swap");
}

TEST(ModelJson, DefaultsAndBareNumbers) {
  auto f = parse_model_text(R"({"modes": 1, "h": [[0.3]], "jumps": [{"v": [[1, 0]]}]})");
  EXPECT_EQ(f.model.delta(0, 0), Complex(0.0));
  EXPECT_EQ(f.model.alpha(0), Complex(0.0));
  EXPECT_EQ(f.model.jumps[0].w(0), Complex(0.0));
  EXPECT_EQ(f.model.jumps[0].beta, Complex(0.0));
  EXPECT_EQ(f.model.h(0, 0), Complex(0.3));
}

TEST(ModelJson, ErrorsNameThePath) {
  EXPECT_EQ(parse_error("{not json"), ErrorCode::InvalidInput);
  EXPECT_EQ(parse_context(R"({"h": [[0]]})"), "$.modes");
  EXPECT_EQ(parse_context(R"({"modes": 1, "h": [[[1, 2, 3]]]})"), "$.h[0][0]");
  EXPECT_EQ(parse_context(R"({"modes": 1, "h": [[0]], "jumps": [{"v": [["a", 0]]}]})"), "$.jumps[0].v[0]");
  EXPECT_EQ(parse_error(R"({"modes": 2, "h": [[0]]})"), ErrorCode::DimensionMismatch);
  EXPECT_EQ(parse_error(R"({"modes": 1, "h": [[0]], "counting": {"mode": 3, "gamma": 1}})"),
            ErrorCode::IndexOutOfRange);
  EXPECT_EQ(parse_context(R"({"modes": 1, "h": [[0]], "symmetries": {"pt": [{"name": "x"}]}})"),
            "$.symmetries.pt[0]");
}

TEST(ModelJson, WarnsOnNonHermitianH) {
  auto f = parse_model_text(R"({"modes": 1, "h": [[[1, 0.5]]]})");
  EXPECT_EQ(f.model.warnings.size(), 1u);
  RunConfig c;
  c.command = "spectrum";
  c.modelPath = model("thermal.json");
  EXPECT_EQ(invoke(c).err, "");
}

TEST(Cli, SpectrumOfCoupledModel) {
  auto r = invoke(config("spectrum", "coupled.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.doc();
  int plus = 0, minus = 0;
  for (const auto& row : d["lambdas"]) {
    const Complex v = cval(row["value"]);
    if (std::abs(v - Complex(0, 0.4330127018922193)) < 1e-9) ++plus;
    if (std::abs(v - Complex(0, -0.4330127018922193)) < 1e-9) ++minus;
    EXPECT_LE(row["residual"].get<double>(), row["tolerance"].get<double>());
  }
  EXPECT_EQ(plus, 2);
  EXPECT_EQ(minus, 2);
}

TEST(Cli, SpectrumWithOccupation) {
  auto c = config("spectrum", "thermal.json");
  c.occupation = std::vector<int>{2, 1};
  auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::abs(cval(r.doc()["occupation"]["value"]) - Complex(-1.5, 0)), 0.0, 1e-12);
  EXPECT_EQ(r.doc()["sums"].size(), 6u);
}

TEST(Cli, SpectrumAtUnsupportedExceptionalPoint) {
  // Balanced gain and loss at g = gamma has only 4x4 blocks.
  const std::string path = ::testing::TempDir() + "/coupled_ep.json";
  {
    std::ofstream f(path);
    f << R"({"modes": 2, "h": [[0, 0.5], [0.5, 0]],
             "jumps": [{"v": [1, 0]}, {"w": [0, 1]}]})";
  }
  RunConfig c;
  c.command = "spectrum";
  c.modelPath = path;
  auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["method"], "reduced");
  EXPECT_TRUE(r.doc()["defective"].get<bool>());
  c.command = "stability";
  auto s = invoke(c);
  EXPECT_EQ(s.code, 1);
  EXPECT_EQ(s.error()["code"], "UnsupportedJordanStructure");
}

TEST(Cli, StabilityAtExceptionalPoint) {
  auto r = invoke(config("stability", "parametric_ep.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.doc();
  EXPECT_EQ(d["class"], "stable");
  EXPECT_NEAR(std::abs(cval(d["jordan"]["mu"]) - Complex(-0.5)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(cval(d["jordan"]["nu"]) - Complex(0.25)), 0.0, 1e-9);
}

TEST(Cli, NormalForm) {
  auto r = invoke(config("normal-form", "parametric_ep.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.doc();
  EXPECT_EQ(d["S"].size(), 4u);
  EXPECT_LE(d["residuals"]["symplectic"].get<double>(), 1e-8);
  auto c = config("normal-form", "coupled.json");
  c.outputFormat = "csv";
  auto csv = invoke(c);
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "block,row,col,value_re,value_im,residual,tolerance");
}

TEST(Cli, OracleCheckThermal) {
  auto c = config("oracle-check", "thermal.json");
  c.cutoff = 25;
  auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(r.doc()["max_deviation"].get<double>(), 1e-6);
  EXPECT_TRUE(r.doc()["pass"].get<bool>());
}

TEST(Cli, OracleCheckMismatchAndLimits) {
  auto c = config("oracle-check", "thermal.json");
  c.cutoff = 3;  // far too small: the table is still written, exit 1
  auto r = invoke(c);
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.doc()["pass"].get<bool>());
  EXPECT_EQ(r.error()["code"], "OracleMismatch");

  auto big = config("oracle-check", "coupled.json");
  big.cutoff = 12;
  auto b = invoke(big);
  EXPECT_EQ(b.code, 2);
  EXPECT_EQ(b.error()["code"], "ResourceLimit");
}

TEST(Cli, CumulantsDriven) {
  auto r = invoke(config("cumulants", "driven.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.doc();
  EXPECT_NEAR(cval(d["ordinary"][0]).real(), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(cval(d["factorial"][1])), 0.0, 1e-6);
  EXPECT_EQ(d["samples"].size(), 41u);
  auto c = config("cumulants", "thermal.json");
  c.order = 4;
  c.sSteps = 10;
  c.sMax = 0.2;
  c.outputFormat = "csv";
  auto csv = invoke(c);
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "s_re,s_im,G_re,G_im,min_overlap,overlap_threshold");
}

TEST(Cli, SymmetryVerdicts) {
  auto r = invoke(config("symmetry", "parametric_ep.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = r.doc();
  EXPECT_TRUE(d["hermiticity"]["pass"].get<bool>());
  ASSERT_EQ(d["candidates"].size(), 2u);
  EXPECT_FALSE(d["candidates"][0]["holds"].get<bool>());
  EXPECT_TRUE(d["candidates"][1]["holds"].get<bool>());
  EXPECT_TRUE(d["pt_phase"].is_null());

  auto p = invoke(config("symmetry", "coupled.json")).doc();
  EXPECT_EQ(p["pt_phase"], "unbroken");
}

TEST(Cli, EvolveJordan) {
  RunConfig c;
  c.command = "evolve-jordan";
  c.mu = Complex(-0.5);
  c.nu = Complex(0.25);
  c.time = 2.0;
  c.occupation = std::vector<int>{3, 1};
  auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["terms"].size(), 4u);
  auto m = config("evolve-jordan", "parametric_ep.json");
  auto rm = invoke(m);
  ASSERT_EQ(rm.code, 0) << rm.err;
  EXPECT_NEAR(cval(rm.doc()["nu"]).real(), 0.25, 1e-9);
  auto bad = invoke(config("evolve-jordan", "thermal.json"));
  EXPECT_EQ(bad.code, 2);
}

TEST(Cli, InputErrors) {
  auto r = invoke(config("bogus", "thermal.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.error()["code"], "InvalidInput");
  auto missing = invoke(config("spectrum", "does_not_exist.json"));
  EXPECT_EQ(missing.code, 2);
  EXPECT_TRUE(missing.error().contains("context"));
  auto fmt = config("spectrum", "thermal.json");
  fmt.outputFormat = "xml";
  EXPECT_EQ(invoke(fmt).code, 2);
  EXPECT_THROW(parse_occupation("1,-2"), Error);
  EXPECT_THROW(parse_occupation("1,x"), Error);
  EXPECT_EQ(parse_occupation("2, 0"), (std::vector<int>{2, 0}));
  EXPECT_EQ(parse_complex("-0.5,0.25"), Complex(-0.5, 0.25));
  EXPECT_EQ(parse_complex("3"), Complex(3.0));
  EXPECT_THROW(parse_complex("a,b"), Error);
}

TEST(Cli, DeterministicOutput) {
  auto a = invoke(config("normal-form", "coupled.json"));
  auto b = invoke(config("normal-form", "coupled.json"));
  EXPECT_EQ(a.out, b.out);
}
