// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "fixtures.hpp"
#include "thirdq/counting.hpp"
#include "thirdq/error.hpp"
#include "thirdq/fock_oracle.hpp"
#include "thirdq/symmetry.hpp"
#include "thirdq/symplectic.hpp"
#include "thirdq/third_quantization.hpp"

using namespace thirdq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

ComplexMatrix random_symmetric(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexMatrix X(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) X(i, j) = Complex(nd(rng), nd(rng));
  return X + X.transpose();
}

// Stable random single-mode models with a visible gap, as used by criteria 6 and 10.
std::vector<LindbladModel> random_models() {
  std::mt19937_64 rng(20240611);
  std::vector<LindbladModel> out;
  while (out.size() < 20) {
    auto m = fixtures::random_stable_single_mode(rng);
    auto rs = reduced_spectrum(assemble_liouvillian(m));
    double maxre = -1e300;
    for (Eigen::Index i = 0; i < rs.lambdas.size(); ++i) maxre = std::max(maxre, rs.lambdas(i).real());
    if (maxre < -0.25) out.push_back(m);
  }
  return out;
}

// Generic (not necessarily stable) multi-mode models for the trace identity.
LindbladModel random_multimode(int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto c = [&] { return Complex(nd(rng), nd(rng)); };
  ComplexMatrix h(m, m), d(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      h(i, j) = c();
      d(i, j) = 0.3 * c();
    }
  h = (h + h.adjoint()).eval() / 2.0;
  d = (d + d.transpose()).eval() / 2.0;
  ComplexVector alpha(m);
  for (int i = 0; i < m; ++i) alpha(i) = 0.2 * c();
  std::vector<JumpOperator> jumps;
  for (int k = 0; k < m + 1; ++k) {
    JumpOperator j{ComplexVector(m), ComplexVector(m), 0.1 * c()};
    for (int i = 0; i < m; ++i) {
      j.v(i) = c();
      j.w(i) = 0.4 * c();
    }
    jumps.push_back(j);
  }
  return make_model(h, d, alpha, jumps);
}

std::vector<std::pair<std::string, LindbladModel>> fixture_models() {
  return {{"damped", fixtures::damped(1.0)},
          {"thermal", fixtures::thermal(1.0, 0.5)},
          {"driven", fixtures::driven(1.0, 0.5)},
          {"parametric-ep", fixtures::parametric(1.0, 0.5, 0.5, 0.5)},
          {"parametric", fixtures::parametric(1.0, 0.5, 0.3, 0.2)},
          {"squeezed", fixtures::parametric(1.0, 0.0, 0.4, 0.0)},
          {"coupled-unbroken", fixtures::coupled(1.0, 0.5, 0.5)},
          {"coupled-broken", fixtures::coupled(1.0, 2.0, 2.0)},
          {"coupled-ep", fixtures::coupled(1.0, 1.0, 1.0)},
          {"coupled-asym", fixtures::coupled(1.0, 0.3, 0.7)}};
}

ComplexVector lambdas_of(const LiouvillianBlocks& b) {
  try {
    return third_quantize(b).lambdas;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedJordanStructure) throw;
    return reduced_spectrum(b).lambdas;
  }
}

double nearest(const std::vector<Complex>& pool, Complex x) {
  double best = 1e300;
  for (const auto& p : pool) best = std::min(best, std::abs(p - x));
  return best;
}

// max_i min_j |lambda_i - conj(lambda_j)|
double conjugation_defect(const ComplexVector& l) {
  std::vector<Complex> pool(l.data(), l.data() + l.size());
  double worst = 0.0;
  for (const auto& x : pool) worst = std::max(worst, nearest(pool, std::conj(x)));
  return worst;
}

Outcome criterion1() {
  auto f = third_quantize(assemble_liouvillian(fixtures::coupled(1.0, 0.5, 0.5)));
  const double w = std::sqrt(1.0 - 0.25) / 2.0;
  double err = 0.0;
  int up = 0, down = 0;
  for (Eigen::Index i = 0; i < f.lambdas.size(); ++i) {
    const Complex l = f.lambdas(i);
    const double e = std::min(std::abs(l - Complex(0, w)), std::abs(l + Complex(0, w)));
    err = std::max(err, e);
    (l.imag() > 0 ? up : down)++;
  }
  return {err <= 1e-9 && up > 0 && down > 0, "max |lambda -+ i 0.4330127| = " + fmt(err)};
}

Outcome criterion2() {
  ComplexMatrix X(2, 2);
  X << 0, 1, 1, 0;
  bool verdicts = true;
  for (double g : {0.5, 1.0, 2.0}) {
    auto m = fixtures::coupled(1.0, g, g);
    verdicts &= pt_symmetry_check(m, build_dissipation(m.jumps, m.m), {X}).holds;
  }
  auto phase = [](double g) { return pt_classification(assemble_liouvillian(fixtures::coupled(1.0, g, g))); };
  const PTPhase a = phase(0.5), b = phase(2.0), c = phase(1.0);
  const bool ok = verdicts && a == PTPhase::Unbroken && b == PTPhase::Broken && c == PTPhase::Exceptional;
  return {ok, std::string("P=X holds: ") + (verdicts ? "yes" : "no") + "; gamma=0.5 " + to_string(a) +
                  ", gamma=2 " + to_string(b) + ", gamma=1 " + to_string(c)};
}

Outcome criterion3() {
  auto b = assemble_liouvillian(fixtures::parametric(1.0, 0.5, 0.5, 0.5));
  auto rep = detect_jordan(b.L, b.J);
  auto f = third_quantize(b);
  if (rep.kind != JordanKind::SingleCoalescedPair || !f.jordan) return {false, "no coalesced pair detected"};
  const double dmu = std::abs(f.jordan->mu - Complex(-0.5));
  const double dnu = std::abs(f.jordan->nu - Complex(0.25));
  auto ev = jordan_eigenstate_eigenvalues(f, 4);
  double dev = ev.size() == 5 ? 0.0 : 1e300;
  for (std::size_t n = 0; n < ev.size(); ++n) dev = std::max(dev, std::abs(ev[n] + 0.5 * static_cast<double>(n)));
  return {dmu <= 1e-9 && dnu <= 1e-9 && dev <= 1e-9,
          "|mu+0.5| = " + fmt(dmu) + ", |nu-0.25| = " + fmt(dnu) + ", eigenstates n2<=4 dev " + fmt(dev)};
}

Outcome criterion4() {
  auto check_u = [](double eps, Complex p) {
    auto m = fixtures::parametric(1.0, 0.5, eps, 0.5);
    ComplexMatrix P(1, 1);
    P << p;
    return unitary_symmetry_check(m, build_dissipation(m.jumps, m.m), {P}).holds;
  };
  const Complex u1 = std::polar(1.0, 0.7);
  const bool a = check_u(0.0, u1), b = check_u(0.5, u1), c = check_u(0.5, -1.0);
  return {a && !b && c, std::string("U(1) eps=0 ") + (a ? "holds" : "fails") + ", eps=0.5 " +
                            (b ? "holds" : "fails") + "; parity eps=0.5 " + (c ? "holds" : "fails")};
}

Outcome criterion5() {
  double worst_s = 0.0, worst_n = 0.0;
  int failures = 0, runs = 0;
  const int sizes[] = {2, 4, 8, 10};
  for (unsigned seed = 0; seed < 100; ++seed) {
    const int n = sizes[seed % 4];
    ComplexMatrix L = random_symmetric(2 * n, 5000 + seed);
    ComplexMatrix J = standard_symplectic_form(n);
    try {
      auto nf = sympl_normal_form(L);
      const double rs = inf_norm(ComplexMatrix(nf.S.transpose() * J * nf.S - J));
      const double rn = inf_norm(ComplexMatrix(nf.S.transpose() * L * nf.S - normal_form_matrix(nf.lambdas))) /
                        inf_norm(L);
      worst_s = std::max(worst_s, rs);
      worst_n = std::max(worst_n, rn);
      if (rs > 1e-8 || rn > 1e-8) ++failures;
    } catch (const Error&) {
      ++failures;
    }
    ++runs;
  }
  return {failures == 0, std::to_string(runs) + " seeds, max symplectic " + fmt(worst_s) +
                             ", max normal-form/||L|| " + fmt(worst_n)};
}

Outcome criterion6(const std::vector<LindbladModel>& models) {
  double worst = 0.0;
  for (const auto& m : models) {
    auto f = third_quantize(assemble_liouvillian(m));
    auto sums = occupation_spectrum(f, 8);
    auto oracle = oracle_spectrum(build_oracle(m, 25), -1);
    for (std::size_t k = 0; k < 6; ++k) worst = std::max(worst, nearest(oracle, sums[k].value));
  }
  return {worst <= 1e-6, "20 models x 6 eigenvalues, max distance to oracle " + fmt(worst)};
}

Outcome criterion7() {
  const auto m = fixtures::thermal(1.0, 0.5);
  auto b = assemble_liouvillian(m);
  auto set = track_branches_symmetric(b, photon_current_observable(b, 0, 1.0), 0.4, 20);
  std::vector<Complex> s;
  for (int k = -10; k <= 10; ++k) s.push_back(0.04 * k);
  auto oracle = oracle_tilted_branch(m, 50, PhotonCounting{0, 1.0}, s);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(generating_function(set, s[k]) - oracle[k]));
  const double f1 = std::abs(factorial_cumulants(set, 1)[0] - 0.5);
  return {worst <= 1e-6 && f1 <= 1e-6, "21 points, max |G - oracle| " + fmt(worst) + ", |F1 - 0.5| " + fmt(f1)};
}

Outcome criterion8() {
  const auto m = fixtures::driven(1.0, 0.5);
  auto b = assemble_liouvillian(m);
  auto set = track_branches_symmetric(b, photon_current_observable(b, 0, 1.0), 0.4, 20);
  auto G = generating_function_samples(set);
  double lin = 0.0;
  for (std::size_t k = 0; k < G.size(); ++k) lin = std::max(lin, std::abs(G[k] - set.sGrid[k]));
  const double f2 = std::abs(factorial_cumulants(set, 2)[1]);
  const double k1 = std::abs(ordinary_cumulants(set, 1)[0] - 1.0);
  std::vector<Complex> s{-0.4, 0.2, 0.4};
  auto oracle = oracle_tilted_branch(m, 30, PhotonCounting{0, 1.0}, s);
  double orc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) orc = std::max(orc, std::abs(generating_function(set, s[k]) - oracle[k]));
  return {lin <= 1e-8 && f2 <= 1e-6 && k1 <= 1e-6 && orc <= 1e-6,
          "max |G - s| " + fmt(lin) + ", |F2| " + fmt(f2) + ", |K1 - 1| " + fmt(k1) + ", oracle " + fmt(orc)};
}

Outcome criterion9() {
  const Complex mu(-0.5), nu(0.25);
  const int nmax = 6;
  // The generator conserves n1 + n2, so the block n1 + n2 <= nmax is exact.
  std::vector<std::pair<int, int>> basis;
  for (int tot = 0; tot <= nmax; ++tot)
    for (int n1 = 0; n1 <= tot; ++n1) basis.emplace_back(n1, tot - n1);
  auto index = [&](int n1, int n2) {
    return static_cast<int>(std::find(basis.begin(), basis.end(), std::make_pair(n1, n2)) - basis.begin());
  };
  const int D = static_cast<int>(basis.size());
  ComplexMatrix G = ComplexMatrix::Zero(D, D);
  for (int c = 0; c < D; ++c) {
    const auto [n1, n2] = basis[c];
    G(c, c) = mu * static_cast<double>(n1 + n2);
    if (n1 > 0) G(index(n1 - 1, n2 + 1), c) += nu * std::sqrt(static_cast<double>(n1) * (n2 + 1));
  }
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0}) {
    const ComplexMatrix E = (G * t).exp();
    for (int c = 0; c < D; ++c) {
      const auto [n1, n2] = basis[c];
      ComplexVector col = ComplexVector::Zero(D);
      for (const auto& [k, v] : jordan_evolution_coefficients(mu, nu, t, n1, n2)) col(index(n1 - k, n2 + k)) += v;
      worst = std::max(worst, (col - E.col(c)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-9, "n1 + n2 <= 6, t in {0.1, 0.5, 1}, max deviation " + fmt(worst)};
}

Outcome criterion10(const std::vector<LindbladModel>& randoms) {
  std::vector<LindbladModel> models;
  for (auto& [name, m] : fixture_models()) models.push_back(m);
  models.insert(models.end(), randoms.begin(), randoms.end());
  for (unsigned seed = 0; seed < 10; ++seed) models.push_back(random_multimode(2 + seed % 3, 900 + seed));
  double worst = 0.0;
  for (const auto& m : models) {
    auto b = assemble_liouvillian(m);
    const double rel = std::abs(lambdas_of(b).sum() - (b.diss.W - b.diss.V).trace()) / blocks_scale(b);
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-10, std::to_string(models.size()) + " models, max |sum lambda - tr(W-V)|/scale " + fmt(worst)};
}

Outcome criterion11() {
  double block = 0.0, conj = 0.0;
  bool pass = true;
  std::string worst_model;
  for (auto& [name, m] : fixture_models()) {
    auto b = assemble_liouvillian(m);
    auto rep = hermiticity_check(b);
    const double scale = blocks_scale(b);
    double r = 0.0;
    for (const auto& res : rep.residuals) r = std::max(r, res.value / scale);
    const double c = conjugation_defect(lambdas_of(b)) / scale;
    if (!rep.pass || r > 1e-10 || c > 1e-10) {
      pass = false;
      worst_model += " " + name;
    }
    block = std::max(block, r);
    conj = std::max(conj, c);
  }
  std::string detail = "max block residual/scale " + fmt(block) + ", max conjugation defect/scale " + fmt(conj);
  if (!pass) detail += "; failing:" + worst_model;
  return {pass, detail};
}

}  // namespace

int main() {
  const auto randoms = random_models();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectrum of the gain-loss pair", criterion1},
      {"PT phase boundary", criterion2},
      {"parametric exceptional point", criterion3},
      {"U(1) and parity symmetries", criterion4},
      {"normal-form property suite", criterion5},
      {"oracle spectral equivalence", [&] { return criterion6(randoms); }},
      {"counting equivalence", criterion7},
      {"Poissonian emission", criterion8},
      {"Jordan evolution", criterion9},
      {"trace-preservation identity", [&] { return criterion10(randoms); }},
      {"Hermiticity structure", criterion11}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
