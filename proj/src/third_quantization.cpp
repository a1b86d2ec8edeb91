#include "thirdq/third_quantization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "thirdq/error.hpp"

namespace thirdq {

namespace {

constexpr double kTailTol = 1e-8;
constexpr double kResonanceTol = 1e-8;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Re descending, then Im descending; entries within tol compare equal.
bool lambda_before(Complex a, Complex b, double tol) {
  if (std::abs(a.real() - b.real()) > tol) return a.real() > b.real();
  if (std::abs(a.imag() - b.imag()) > tol) return a.imag() > b.imag();
  return false;
}

void normalize_column(ComplexMatrix& S1, Eigen::Index k) {
  Eigen::Index piv = 0;
  const double mx = S1.col(k).cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < S1.rows(); ++r) {
    if (std::abs(S1(r, k)) >= mx * (1.0 - 1e-12)) {
      piv = r;
      break;
    }
  }
  S1.col(k) /= S1(piv, k);
}

void fill_blocks(ThirdQuantizedForm& f, const LiouvillianBlocks& b) {
  const Eigen::Index n = 2 * b.m;
  f.S1 = f.S.topLeftCorner(n, n);
  f.S2 = f.S.topRightCorner(n, n);
  f.S3 = f.S.bottomRightCorner(n, n);
  f.etaPrime = f.S3.transpose() * b.eta;
  f.L0 = b.L0;
}

// Residuals against [[0, Lt^T], [Lt, M]].
void fill_residuals(ThirdQuantizedForm& f, const LiouvillianBlocks& b, const ComplexMatrix& Lt,
                    const ComplexMatrix& M) {
  const Eigen::Index n = 2 * b.m;
  ComplexMatrix expected = ComplexMatrix::Zero(2 * n, 2 * n);
  expected.topRightCorner(n, n) = Lt.transpose();
  expected.bottomLeftCorner(n, n) = Lt;
  expected.bottomRightCorner(n, n) = M;
  auto& r = f.residuals;
  r.symplectic = inf_norm(ComplexMatrix(f.S.transpose() * b.J * f.S - b.J));
  r.normal_form = inf_norm(ComplexMatrix(f.S.transpose() * b.L * f.S - expected)) /
                  std::max(1.0, inf_norm(b.L));
  r.lower_left = inf_norm(ComplexMatrix(f.S.bottomLeftCorner(n, n))) / inf_norm(f.S);
  r.s3_inverse = inf_norm(ComplexMatrix(f.S3.transpose() - f.S1.inverse()));
  r.s2s3 = inf_norm(ComplexMatrix(f.S2.transpose() * f.S3 - f.S3.transpose() * f.S2));
  r.trace = std::abs(f.lambdas.sum() + 2.0 * b.L0);
}

void check_residuals(const ThirdQuantizedForm& f) {
  const auto& r = f.residuals;
  const double worst = std::max({r.symplectic, r.normal_form, r.lower_left, r.s3_inverse, r.s2s3});
  if (worst > 1e-8) {
    throw Error(ErrorCode::ResidualFailure, "third-quantized form misses its invariants",
                "symplectic " + sci(r.symplectic) + ", normal form " + sci(r.normal_form) +
                    ", lower-left " + sci(r.lower_left) + ", S3^T-S1^-1 " + sci(r.s3_inverse) +
                    ", S2^T S3 sym " + sci(r.s2s3));
  }
}

ThirdQuantizedForm via_normal_form(const LiouvillianBlocks& b, double scale) {
  const Eigen::Index n = 2 * b.m;
  SymplecticNormalForm nf = sympl_normal_form(b.L);
  ComplexMatrix S = nf.S;
  ComplexVector lam = nf.lambdas;

  for (Eigen::Index k = 0; k < n; ++k) {
    auto tail_zero = [&](Eigen::Index c) {
      return max_abs(ComplexVector(S.col(c).tail(n))) <= kTailTol * max_abs(ComplexVector(S.col(c)));
    };
    if (tail_zero(k)) continue;
    if (!tail_zero(k + n)) {
      throw Error(ErrorCode::GaugeFixFailure, "neither column of a pair ends in zeros",
                  "pair " + std::to_string(k));
    }
    const ComplexVector a = S.col(k);
    S.col(k) = -S.col(k + n);
    S.col(k + n) = a;
    lam(k) = -lam(k);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double tol = 1e-9 * scale;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return lambda_before(lam(x), lam(y), tol); });

  ThirdQuantizedForm f;
  f.S.resize(2 * n, 2 * n);
  f.lambdas.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    f.S.col(k) = S.col(order[k]);
    f.S.col(k + n) = S.col(order[k] + n);
    f.lambdas(k) = lam(order[k]);
  }
  f.method = "normal-form";
  f.negated_t = nf.negated_t;
  fill_blocks(f, b);
  fill_residuals(f, b, ComplexMatrix(f.lambdas.asDiagonal()), ComplexMatrix::Zero(n, n));
  return f;
}

struct Unit {
  Complex lambda;
  std::vector<ComplexVector> cols;  // chain: head then tail
  bool chain = false;
  Complex nu;
};

ThirdQuantizedForm via_block_triangular(const LiouvillianBlocks& b, double scale) {
  const Eigen::Index n = 2 * b.m;
  const ComplexMatrix A = reduced_matrix(b);
  const JordanStructure js = jordan_structure(A);
  if (js.max_block() > 2 || js.defective_blocks() > 1) {
    throw Error(ErrorCode::UnsupportedJordanStructure,
                "reduced matrix has Jordan structure beyond one coalesced pair",
                "largest block " + std::to_string(js.max_block()) + ", defective blocks " +
                    std::to_string(js.defective_blocks()));
  }
  const double sA = std::max(1.0, inf_norm(A));

  std::vector<Unit> units;
  for (const auto& c : js.clusters) {
    if (c.defective()) {
      if (c.algebraic() != 2) {
        throw Error(ErrorCode::UnsupportedJordanStructure,
                    "coalesced pair shares its eigenvalue with further modes");
      }
      const JordanChain ch = jordan_chain(A, c.center);
      units.push_back({c.center, {ch.head, ch.tail}, true, ch.nu});
      continue;
    }
    const ComplexMatrix K = (A - c.center * ComplexMatrix::Identity(n, n)) / sA;
    Eigen::JacobiSVD<ComplexMatrix> svd(K, Eigen::ComputeFullV);
    const ComplexMatrix basis = svd.matrixV().rightCols(c.algebraic());
    for (int r = 0; r < c.algebraic(); ++r) units.push_back({c.center, {basis.col(r)}, false, {}});
  }
  const double tol = 1e-9 * scale;
  std::stable_sort(units.begin(), units.end(), [&](const Unit& x, const Unit& y) {
    return lambda_before(x.lambda, y.lambda, tol);
  });

  ThirdQuantizedForm f;
  ComplexMatrix S1(n, n);
  f.lambdas.resize(n);
  ComplexMatrix Lt = ComplexMatrix::Zero(n, n);
  Eigen::Index pos = 0;
  for (const auto& u : units) {
    if (u.chain) {
      f.jordan = JordanData{u.lambda, u.nu, static_cast<int>(pos)};
      Lt(pos + 1, pos) = u.nu;
    }
    for (const auto& col : u.cols) {
      S1.col(pos) = col;
      if (!u.chain) normalize_column(S1, pos);
      f.lambdas(pos) = u.lambda;
      Lt(pos, pos) = u.lambda;
      ++pos;
    }
  }

  const ComplexMatrix S1inv = S1.partialPivLu().inverse();
  const ComplexMatrix S3 = S1inv.transpose();
  const ComplexMatrix Nt = S3.transpose() * b.N * S3;

  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  ComplexMatrix M = ComplexMatrix::Zero(n, n);
  const double rtol = kResonanceTol * scale;
  bool resonant = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(f.lambdas(i) + f.lambdas(j)) <= rtol) resonant = true;

  if (f.jordan) {
    if (resonant) {
      throw Error(ErrorCode::UnsupportedJordanStructure,
                  "coalesced pair together with resonant modes (lambda_i + lambda_j = 0)");
    }
    const ComplexMatrix I = ComplexMatrix::Identity(n, n);
    const ComplexMatrix op = Eigen::kroneckerProduct(I, Lt).eval() + Eigen::kroneckerProduct(Lt, I).eval();
    const ComplexVector rhs = -Eigen::Map<const ComplexVector>(Nt.data(), n * n);
    const ComplexVector x = op.partialPivLu().solve(rhs);
    X = Eigen::Map<const ComplexMatrix>(x.data(), n, n);
    X = 0.5 * (X + X.transpose()).eval();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const Complex den = f.lambdas(i) + f.lambdas(j);
        if (std::abs(den) <= rtol) {
          M(i, j) = Nt(i, j);
        } else {
          X(i, j) = -Nt(i, j) / den;
        }
      }
    }
    M = 0.5 * (M + M.transpose()).eval();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j)
        if (std::abs(M(i, j)) > 1e-12 * scale) f.couplings.push_back({int(i), int(j), M(i, j)});
  }

  f.S = ComplexMatrix::Zero(2 * n, 2 * n);
  f.S.topLeftCorner(n, n) = S1;
  f.S.topRightCorner(n, n) = S1 * X;
  f.S.bottomRightCorner(n, n) = S3;
  f.method = "block-triangular";
  fill_blocks(f, b);
  fill_residuals(f, b, Lt, M);
  return f;
}

}  // namespace

double blocks_scale(const LiouvillianBlocks& b) {
  const int m = b.m;
  return std::max({inf_norm(ComplexMatrix(b.H.topLeftCorner(m, m))),
                   inf_norm(ComplexMatrix(b.H.bottomLeftCorner(m, m))), inf_norm(b.diss.V),
                   inf_norm(b.diss.W), 1.0});
}

ThirdQuantizedForm third_quantize(const LiouvillianBlocks& b, QuantizationMethod method) {
  const Eigen::Index n = 2 * b.m;
  require_finite(b.L, "L");
  if (b.L.rows() != 2 * n || b.eta.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Liouvillian blocks have inconsistent sizes");
  }
  const double normL = std::max(inf_norm(b.L), 1e-300);
  const double cc = max_abs(ComplexMatrix(b.L.topLeftCorner(n, n)));
  if (cc > 1e-12 * normL) {
    throw Error(ErrorCode::GaugeFixFailure, "upper-left block of L is not zero",
                "max |L_cc| = " + sci(cc));
  }
  const double scale = blocks_scale(b);

  ThirdQuantizedForm f;
  if (method == QuantizationMethod::BlockTriangular) {
    f = via_block_triangular(b, scale);
  } else {
    try {
      f = via_normal_form(b, scale);
      check_residuals(f);
    } catch (const Error& e) {
      if (method == QuantizationMethod::NormalForm) throw;
      switch (e.code()) {
        case ErrorCode::NotDiagonalizable:
        case ErrorCode::PairingFailure:
        case ErrorCode::ResidualFailure:
        case ErrorCode::GaugeFixFailure:
        case ErrorCode::SingularInput:
        case ErrorCode::BranchCutFailure:
          f = via_block_triangular(b, scale);
          break;
        default:
          throw;
      }
    }
  }
  check_residuals(f);
  f.scale = scale;
  f.source = b;
  return f;
}

double heff_eigencheck(const ThirdQuantizedForm& f) {
  const auto& b = f.source;
  const double nH = std::max(1.0, inf_norm(b.Heff));
  double worst = 0.0;
  for (Eigen::Index k = 0; k < f.S1.cols(); ++k) {
    if (f.jordan && k == f.jordan->p) continue;
    const ComplexVector s = f.S1.col(k);
    const ComplexVector r = b.Heff * s - kI * f.lambdas(k) * (b.Z * s);
    worst = std::max(worst, max_abs(r) / (max_abs(s) * nH));
  }
  return worst;
}

Complex liouvillian_eigenvalue(const ThirdQuantizedForm& f, const std::vector<int>& occ) {
  if (f.jordan) {
    throw Error(ErrorCode::JordanFormRequiresGeneralizedTreatment,
                "spectrum of a form with a coalesced pair needs the generalized treatment");
  }
  if (static_cast<Eigen::Index>(occ.size()) != f.lambdas.size()) {
    throw Error(ErrorCode::DimensionMismatch, "occupation length must equal the number of modes",
                "got " + std::to_string(occ.size()) + ", need " + std::to_string(f.lambdas.size()));
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] < 0) throw Error(ErrorCode::InvalidInput, "occupations must be non-negative");
    acc += static_cast<double>(occ[i]) * f.lambdas(static_cast<Eigen::Index>(i));
  }
  return acc;
}

std::vector<OccupationEigenvalue> occupation_spectrum(const ThirdQuantizedForm& f, int max_total) {
  if (max_total < 0) throw Error(ErrorCode::InvalidInput, "max_total must be non-negative");
  const int n = static_cast<int>(f.lambdas.size());
  std::vector<OccupationEigenvalue> out;
  std::vector<int> occ(n, 0);
  // enumerate compositions with sum <= max_total
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      Complex v{0.0, 0.0};
      for (int k = 0; k < n; ++k) v += static_cast<double>(occ[k]) * f.lambdas(k);
      out.push_back({occ, v});
      return;
    }
    for (int c = 0; c <= left; ++c) {
      occ[i] = c;
      rec(i + 1, left - c);
    }
    occ[i] = 0;
  };
  rec(0, max_total);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const double ra = std::abs(a.value.real()), rb = std::abs(b.value.real());
    if (std::abs(ra - rb) > 1e-12) return ra < rb;
    const double ia = std::abs(a.value.imag()), ib = std::abs(b.value.imag());
    if (std::abs(ia - ib) > 1e-12) return ia < ib;
    return a.occupation < b.occupation;
  });
  return out;
}

std::vector<Complex> jordan_eigenstate_eigenvalues(const ThirdQuantizedForm& f, int max_n) {
  if (!f.jordan) throw Error(ErrorCode::InvalidInput, "form has no coalesced pair");
  std::vector<Complex> out;
  for (int k = 0; k <= max_n; ++k) {
    out.push_back(static_cast<double>(k) * f.lambdas(f.jordan->p + 1));
  }
  return out;
}

ComplexVector stationary_mean(const ThirdQuantizedForm& f) {
  const double tol = 1e-12 * f.scale;
  if (f.jordan && max_abs(f.source.eta) > tol) {
    throw Error(ErrorCode::JordanWithDrive,
                "vacuum shift with a coalesced pair and a drive is not defined");
  }
  const Eigen::Index n = f.lambdas.size();
  ComplexVector y = ComplexVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(f.lambdas(i)) <= tol) {
      if (std::abs(f.etaPrime(i)) > tol) {
        throw Error(ErrorCode::DriveAtCriticalMode, "driven mode with lambda = 0 has no stationary state",
                    "mode " + std::to_string(i));
      }
      continue;
    }
    y(i) = f.etaPrime(i) / f.lambdas(i);
  }
  return -f.S1 * y;
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::Critical: return "critical";
    case StabilityClass::ExponentiallyUnstable: return "exponentially-unstable";
    case StabilityClass::PolynomiallyUnstable: return "polynomially-unstable";
  }
  return "unknown";
}

StabilityReport classify_stability(const ThirdQuantizedForm& f) {
  StabilityReport r;
  r.tolerance = 1e-9 * f.scale;
  const double tol = r.tolerance;
  const Eigen::Index n = f.lambdas.size();
  r.maxRealPart = -std::numeric_limits<double>::infinity();
  std::vector<bool> axis(n, false);
  bool any_axis = false;
  double max_off_axis = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = f.lambdas(i).real();
    r.maxRealPart = std::max(r.maxRealPart, re);
    if (std::abs(re) <= tol) {
      axis[i] = true;
      any_axis = true;
    } else {
      max_off_axis = std::max(max_off_axis, re);
    }
  }
  if (n == 0) r.maxRealPart = 0.0;
  r.spectralGap = std::isfinite(max_off_axis) && max_off_axis < 0 ? -max_off_axis : 0.0;
  if (r.maxRealPart > tol) {
    r.cls = StabilityClass::ExponentiallyUnstable;
    r.spectralGap = 0.0;
    return r;
  }
  if (!any_axis) {
    r.cls = StabilityClass::Stable;
    return r;
  }
  bool secular = false;
  if (f.jordan && axis[f.jordan->p] && std::abs(f.jordan->nu) > tol) secular = true;
  for (const auto& c : f.couplings) {
    if (axis[c.i] && axis[c.j] && std::abs(c.value) > tol) secular = true;
  }
  r.cls = secular ? StabilityClass::PolynomiallyUnstable : StabilityClass::Critical;
  return r;
}

std::vector<std::pair<int, Complex>> jordan_evolution_coefficients(Complex mu, Complex nu, double t,
                                                                   int n1, int n2) {
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::InvalidInput, "t must be finite and >= 0");
  if (n1 < 0 || n2 < 0) throw Error(ErrorCode::InvalidInput, "occupations must be non-negative");
  if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag()) || !std::isfinite(nu.real()) ||
      !std::isfinite(nu.imag())) {
    throw Error(ErrorCode::InvalidInput, "mu and nu must be finite");
  }
  const Complex decay = std::exp(mu * static_cast<double>(n1 + n2) * t);
  const Complex nt = nu * t;
  std::vector<std::pair<int, Complex>> out;
  if (nt == Complex(0.0, 0.0)) {
    out.emplace_back(0, decay);
    return out;
  }
  const bool logdomain = n1 + n2 > 60;
  const Complex lognt = std::log(nt);
  const Complex logdecay = mu * static_cast<double>(n1 + n2) * t;
  for (int m = 0; m <= n1; ++m) {
    if (logdomain) {
      const double lc = std::lgamma(n1 + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n1 - m + 1.0) +
                        std::lgamma(n2 + m + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n2 + 1.0);
      out.emplace_back(m, std::exp(0.5 * lc + static_cast<double>(m) * lognt + logdecay));
    } else {
      double c1 = 1.0, c2 = 1.0;
      for (int k = 1; k <= m; ++k) {
        c1 = c1 * (n1 - m + k) / k;
        c2 = c2 * (n2 + k) / k;
      }
      out.emplace_back(m, std::sqrt(c1 * c2) * std::pow(nt, m) * decay);
    }
  }
  return out;
}

ReducedSpectrum reduced_spectrum(const LiouvillianBlocks& b) {
  ReducedSpectrum r;
  r.structure = jordan_structure(reduced_matrix(b));
  r.defective = !r.structure.diagonalizable();
  r.lambdas.resize(r.structure.eigenvalues.size());
  for (const auto& c : r.structure.clusters)
    for (int i : c.members) r.lambdas(i) = c.center;
  return r;
}

}  // namespace thirdq
