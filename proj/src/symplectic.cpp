#include "thirdq/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "thirdq/error.hpp"

namespace thirdq {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPairTol = 1e-8;
constexpr double kClusterTol = 2e-3;  // relative; Jordan-4 blocks spread ~eps^(1/4)
constexpr double kCutAngle = 1e-6;
// Singular values of (M - mu)^p / s^p at or below this count as null. Rounding
// in exactly defective fixtures sits near 1e-16.
constexpr double kNullTol = 1e-13;

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void require_standard_form(const ComplexMatrix& J, Eigen::Index dim) {
  if (J.rows() != dim || J.cols() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "J must match the size of L");
  }
  const ComplexMatrix ref = standard_symplectic_form(static_cast<int>(dim / 2));
  if (max_abs(ComplexMatrix(J - ref)) > 1e-14) {
    throw Error(ErrorCode::InvalidInput, "J is not the standard symplectic form");
  }
}

Eigen::Index require_symmetric_even(const ComplexMatrix& L) {
  require_finite(L, "L");
  require_square(L, "L");
  if (L.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "L must have even dimension",
                std::to_string(L.rows()));
  }
  const double res = inf_norm(ComplexMatrix(L - L.transpose()));
  if (res > kSymmetryTol * inf_norm(L)) {
    throw Error(ErrorCode::NonSymmetricInput, "L is not complex symmetric",
                "||L - L^T||_inf = " + fmt_double(res));
  }
  return L.rows();
}

// Right singular vectors belonging to the k smallest singular values.
ComplexMatrix smallest_right_singular(const ComplexMatrix& K, int k) {
  Eigen::JacobiSVD<ComplexMatrix> svd(K, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k);
}

double spectral_scale(const ComplexMatrix& M) { return std::max(1.0, inf_norm(M)); }

// Single-linkage grouping of eigenvalue indices at distance tol.
std::vector<std::vector<int>> link(const ComplexVector& ev, const std::vector<int>& idx,
                                   double tol) {
  const int k = static_cast<int>(idx.size());
  std::vector<int> label(k, -1);
  std::vector<std::vector<int>> groups;
  for (int a = 0; a < k; ++a) {
    if (label[a] >= 0) continue;
    label[a] = static_cast<int>(groups.size());
    std::vector<int> g{idx[a]};
    std::vector<int> stack{a};
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (int b = 0; b < k; ++b) {
        if (label[b] >= 0) continue;
        if (std::abs(ev(idx[cur]) - ev(idx[b])) <= tol) {
          label[b] = label[a];
          g.push_back(idx[b]);
          stack.push_back(b);
        }
      }
    }
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  return groups;
}

// A group is a genuine cluster when nullity((M-mu)^k) equals its size and the
// nullity sequence is consistent with a Jordan structure.
bool genuine_cluster(const ComplexMatrix& M, double s, Complex mu, int k, double tol,
                     std::vector<int>& blocks) {
  const Eigen::Index dim = M.rows();
  const ComplexMatrix K = (M - mu * ComplexMatrix::Identity(dim, dim)) / s;
  ComplexMatrix P = ComplexMatrix::Identity(dim, dim);
  std::vector<int> nul(k + 1, 0);
  for (int p = 1; p <= k; ++p) {
    P = P * K;
    const double thr = std::min(kNullTol, 0.1 * std::pow(tol, p));
    nul[p] = nullity(P, thr);
    if (nul[p] < nul[p - 1]) return false;
  }
  if (nul[1] < 1 || nul[k] != k) return false;
  std::vector<int> atleast(k + 2, 0);
  for (int p = 1; p <= k; ++p) atleast[p] = nul[p] - nul[p - 1];
  blocks.clear();
  for (int p = k; p >= 1; --p) {
    const int exact = atleast[p] - atleast[p + 1];
    if (exact < 0) return false;
    for (int r = 0; r < exact; ++r) blocks.push_back(p);
  }
  int total = 0;
  for (int b : blocks) total += b;
  return total == k;
}

void split_clusters(const ComplexMatrix& M, double s, const ComplexVector& ev,
                    const std::vector<int>& idx, double tol,
                    std::vector<EigenCluster>& out) {
  for (auto& g : link(ev, idx, tol * s)) {
    if (g.size() == 1) {
      out.push_back({ev(g[0]), g, {1}});
      continue;
    }
    Complex mu{0.0, 0.0};
    for (int i : g) mu += ev(i);
    mu /= static_cast<double>(g.size());
    std::vector<int> blocks;
    if (genuine_cluster(M, s, mu, static_cast<int>(g.size()), tol, blocks)) {
      out.push_back({mu, g, blocks});
    } else if (tol > 1e-12) {
      split_clusters(M, s, ev, g, tol / 10.0, out);
    } else {
      for (int i : g) out.push_back({ev(i), {i}, {1}});
    }
  }
}

JordanStructure structure_from(const ComplexMatrix& M, const ComplexVector& ev) {
  JordanStructure js;
  js.eigenvalues = ev;
  std::vector<int> idx(ev.size());
  for (int i = 0; i < static_cast<int>(ev.size()); ++i) idx[i] = i;
  split_clusters(M, spectral_scale(M), ev, idx, kClusterTol, js.clusters);
  return js;
}

// Triangular square root recurrence for upper-triangular R.
ComplexMatrix sqrt_upper(const ComplexMatrix& R) {
  const Eigen::Index n = R.rows();
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    X(j, j) = std::sqrt(R(j, j));
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      Complex acc = R(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) acc -= X(i, k) * X(k, j);
      X(i, j) = acc / (X(i, i) + X(j, j));
    }
  }
  return X;
}

}  // namespace

ComplexMatrix standard_symplectic_form(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "symplectic form needs n >= 1");
  ComplexMatrix J = ComplexMatrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -ComplexMatrix::Identity(n, n);
  return J;
}

ComplexMatrix normal_form_matrix(const ComplexVector& lambdas) {
  const Eigen::Index n = lambdas.size();
  ComplexMatrix D = ComplexMatrix::Zero(2 * n, 2 * n);
  D.topRightCorner(n, n) = lambdas.asDiagonal();
  D.bottomLeftCorner(n, n) = lambdas.asDiagonal();
  return D;
}

JordanStructure jordan_structure(const ComplexMatrix& M) {
  require_finite(M, "matrix");
  require_square(M, "matrix");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
  return structure_from(M, es.eigenvalues());
}

int JordanStructure::max_block() const {
  int mx = 0;
  for (const auto& c : clusters)
    for (int b : c.block_sizes) mx = std::max(mx, b);
  return mx;
}

int JordanStructure::defective_blocks() const {
  int cnt = 0;
  for (const auto& c : clusters)
    for (int b : c.block_sizes) cnt += b >= 2 ? 1 : 0;
  return cnt;
}

std::optional<ComplexMatrix> eigenbasis(const ComplexMatrix& M, const JordanStructure& js) {
  if (!js.diagonalizable()) return std::nullopt;
  const Eigen::Index dim = M.rows();
  const double s = spectral_scale(M);
  ComplexMatrix V(dim, dim);
  for (const auto& c : js.clusters) {
    const ComplexMatrix K = (M - c.center * ComplexMatrix::Identity(dim, dim)) / s;
    const ComplexMatrix basis = smallest_right_singular(K, c.algebraic());
    for (int r = 0; r < c.algebraic(); ++r) V.col(c.members[r]) = basis.col(r);
  }
  return V;
}

GeneralizedEigenSolution generalized_eigs(const ComplexMatrix& L, const ComplexMatrix& J) {
  const Eigen::Index dim = require_symmetric_even(L);
  require_standard_form(J, dim);
  const ComplexMatrix M = -J * L;  // J^{-1} = -J
  Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
  const JordanStructure js = structure_from(M, es.eigenvalues());
  const double s = spectral_scale(M);

  GeneralizedEigenSolution out;
  out.values.resize(dim);
  out.vectors.resize(dim, dim);
  out.defective = !js.diagonalizable();
  for (const auto& c : js.clusters) {
    const ComplexMatrix K = (M - c.center * ComplexMatrix::Identity(dim, dim)) / s;
    const ComplexMatrix basis = smallest_right_singular(K, c.geometric());
    for (int r = 0; r < c.algebraic(); ++r) {
      out.values(c.members[r]) = c.center;
      out.vectors.col(c.members[r]) = basis.col(r % c.geometric());
    }
  }
  for (Eigen::Index k = 0; k < dim; ++k) out.vectors.col(k).normalize();

  const double normL = inf_norm(L);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const ComplexVector r = L * out.vectors.col(k) - out.values(k) * (J * out.vectors.col(k));
    out.residual = std::max(out.residual, max_abs(r) / std::max(1.0, normL));
  }

  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      cands.push_back({std::abs(out.values(i) + out.values(j)), i, j});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.d < b.d; });
  std::vector<bool> used(dim, false);
  const double tol = kPairTol * std::max(1.0, normL);
  for (const auto& c : cands) {
    if (used[c.i] || used[c.j] || c.d > tol) continue;
    used[c.i] = used[c.j] = true;
    out.pairing.emplace_back(c.i, c.j);
    out.pairing_residual = std::max(out.pairing_residual, c.d);
  }
  if (static_cast<Eigen::Index>(out.pairing.size()) * 2 != dim) {
    throw Error(ErrorCode::PairingFailure, "no perfect +/- lambda matching within tolerance",
                "matched " + std::to_string(out.pairing.size()) + " of " +
                    std::to_string(dim / 2) + " pairs at tol " + fmt_double(tol));
  }
  std::sort(out.pairing.begin(), out.pairing.end());
  return out;
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& T) {
  require_finite(T, "T");
  require_square(T, "T");
  const double normT = inf_norm(T);
  Eigen::ComplexSchur<ComplexMatrix> schur(T);
  const ComplexMatrix& R = schur.matrixT();
  const Eigen::Index n = T.rows();
  std::vector<double> angles;
  bool near_cut = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex ev = R(k, k);
    if (std::abs(ev) <= 1e-13 * normT || ev == Complex(0.0, 0.0)) {
      throw Error(ErrorCode::SingularInput, "T has an eigenvalue at zero",
                  "|ev| = " + fmt_double(std::abs(ev)));
    }
    const double a = std::arg(ev);
    angles.push_back(a);
    if (std::numbers::pi - std::abs(a) < kCutAngle) near_cut = true;
  }

  // Rotate the spectrum so that the widest empty sector straddles the cut.
  Complex omega{1.0, 0.0};
  if (near_cut) {
    std::sort(angles.begin(), angles.end());
    double best_gap = -1.0, best_mid = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double lo = angles[k];
      const double hi = k + 1 < angles.size() ? angles[k + 1] : angles[0] + 2.0 * std::numbers::pi;
      if (hi - lo > best_gap) {
        best_gap = hi - lo;
        best_mid = 0.5 * (lo + hi);
      }
    }
    if (best_gap < 2.0 * kCutAngle) {
      throw Error(ErrorCode::BranchCutFailure,
                  "spectrum of T leaves no sector free for the branch cut",
                  "widest gap " + fmt_double(best_gap) + " rad");
    }
    omega = std::polar(1.0, std::numbers::pi - best_mid);
  }
  const ComplexMatrix X = sqrt_upper(omega * R);
  const ComplexMatrix& U = schur.matrixU();
  return (U * X * U.adjoint()) / std::sqrt(omega);
}

SymplecticNormalForm sympl_normal_form(const ComplexMatrix& L) {
  const Eigen::Index dim = require_symmetric_even(L);
  const Eigen::Index n = dim / 2;
  const ComplexMatrix J = standard_symplectic_form(static_cast<int>(n));
  const GeneralizedEigenSolution ges = generalized_eigs(L, J);
  const double normL = inf_norm(L);

  ComplexMatrix Q(dim, dim);
  ComplexVector lam(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto [a, b] = ges.pairing[k];
    Q.col(k) = ges.vectors.col(a);
    Q.col(k + n) = ges.vectors.col(b);
    lam(k) = 0.5 * (ges.values(b) - ges.values(a));
  }

  if (ges.defective) {
    throw Error(ErrorCode::NotDiagonalizable, "J^{-1}L has a Jordan block; use detect_jordan");
  }
  const double rcond = inverse_condition(Q);
  if (rcond < 1e-8) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = i + 1; j < dim; ++j)
        gap = std::min(gap, std::abs(ges.values(i) - ges.values(j)));
    if (gap < 1e-6 * std::max(normL, 1e-300)) {
      throw Error(ErrorCode::NotDiagonalizable, "eigenvector matrix is numerically rank deficient",
                  "sigma_min/sigma_max = " + fmt_double(rcond));
    }
  }

  SymplecticNormalForm out;
  ComplexMatrix T = -Q * J * Q.transpose() * J;
  const double normT = inf_norm(T);
  out.residuals.t_commutes_L =
      normL == 0.0 ? 0.0 : inf_norm(ComplexMatrix(T.transpose() * L - L * T)) / (normT * normL);
  out.residuals.t_commutes_J = inf_norm(ComplexMatrix(T.transpose() * J - J * T)) / normT;
  if (out.residuals.t_commutes_L > 1e-8 || out.residuals.t_commutes_J > 1e-8) {
    throw Error(ErrorCode::ResidualFailure, "T does not preserve L and J",
                "T^T L T^-1 - L: " + fmt_double(out.residuals.t_commutes_L) +
                    ", T^T J T^-1 - J: " + fmt_double(out.residuals.t_commutes_J));
  }

  auto build = [&](const ComplexMatrix& Tc) {
    const ComplexMatrix B = matrix_sqrt(Tc);
    out.residuals.sqrt = inf_norm(ComplexMatrix(B * B - Tc)) / inf_norm(Tc);
    out.S = B.partialPivLu().solve(Q);
  };
  build(T);
  out.residuals.symplectic = inf_norm(ComplexMatrix(out.S.transpose() * J * out.S - J));
  const double flipped = inf_norm(ComplexMatrix(out.S.transpose() * J * out.S + J));
  if (flipped < out.residuals.symplectic) {
    out.negated_t = true;
    build(-T);
    out.residuals.symplectic = inf_norm(ComplexMatrix(out.S.transpose() * J * out.S - J));
  }
  out.lambdas = lam;
  out.residuals.normal_form =
      inf_norm(ComplexMatrix(out.S.transpose() * L * out.S - normal_form_matrix(lam)));

  if (out.residuals.symplectic > 1e-8 || out.residuals.normal_form > 1e-8 * normL) {
    throw Error(ErrorCode::ResidualFailure, "normal form residuals exceed tolerance",
                "S^T J S - J: " + fmt_double(out.residuals.symplectic) +
                    ", S^T L S - D: " + fmt_double(out.residuals.normal_form));
  }
  return out;
}

std::string_view to_string(JordanKind k) {
  switch (k) {
    case JordanKind::Diagonalizable: return "diagonalizable";
    case JordanKind::SingleCoalescedPair: return "single-coalesced-pair";
    case JordanKind::MultiplePairs: return "multiple-pairs";
  }
  return "unknown";
}

JordanChain jordan_chain(const ComplexMatrix& A, Complex mu) {
  const Eigen::Index n = A.rows();
  const double s = spectral_scale(A);
  const ComplexMatrix K = A - mu * ComplexMatrix::Identity(n, n);
  const ComplexMatrix G = smallest_right_singular(ComplexMatrix(K * K / (s * s)), 2);
  const ComplexMatrix PG = G * G.adjoint();
  const ComplexMatrix KP = K * PG;
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = KP.col(k).norm();
    if (v > best_norm * (1.0 + 1e-12)) {
      best_norm = v;
      best = k;
    }
  }
  ComplexVector s1 = PG.col(best);
  Eigen::Index piv = 0;
  s1.cwiseAbs().maxCoeff(&piv);
  s1 /= s1(piv);
  const ComplexVector t = K * s1;
  JordanChain c;
  c.mu = mu;
  c.nu = max_abs(t);
  c.head = s1;
  c.tail = t / c.nu.real();
  return c;
}

JordanReport detect_jordan(const ComplexMatrix& L, const ComplexMatrix& J) {
  const Eigen::Index dim = require_symmetric_even(L);
  require_standard_form(J, dim);
  const Eigen::Index n = dim / 2;
  const ComplexMatrix M = -J * L;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(M, true);
  JordanReport rep;
  rep.structure = structure_from(M, es.eigenvalues());
  ComplexMatrix V = es.eigenvectors();
  for (Eigen::Index k = 0; k < dim; ++k) V.col(k).normalize();
  rep.eigvec_conditioning = inverse_condition(V);

  const int mx = rep.structure.max_block();
  if (mx > 2) {
    throw Error(ErrorCode::UnsupportedJordanStructure,
                "Jordan block larger than 2x2 in J^{-1}L",
                "largest block " + std::to_string(mx));
  }
  if (mx <= 1) {
    rep.kind = JordanKind::Diagonalizable;
    return rep;
  }
  const int nblocks = rep.structure.defective_blocks();
  rep.kind = JordanKind::MultiplePairs;
  if (nblocks == 2) {
    std::vector<Complex> centers;
    for (const auto& c : rep.structure.clusters)
      for (int b : c.block_sizes)
        if (b == 2) centers.push_back(c.center);
    const double tol = kPairTol * spectral_scale(M);
    if (std::abs(centers[0] + centers[1]) <= tol) rep.kind = JordanKind::SingleCoalescedPair;
  }
  if (rep.kind != JordanKind::SingleCoalescedPair) return rep;

  // Chain data needs the trace-preserving layout [[0, *], [A, N]].
  const double normL = std::max(inf_norm(L), 1e-300);
  if (max_abs(ComplexMatrix(L.topLeftCorner(n, n))) > 1e-12 * normL) return rep;
  const ComplexMatrix A = L.bottomLeftCorner(n, n);
  const JordanStructure ja = jordan_structure(A);
  if (ja.defective_blocks() != 1 || ja.max_block() != 2) return rep;
  for (const auto& c : ja.clusters) {
    if (c.defective()) rep.chain = jordan_chain(A, c.center);
  }
  return rep;
}

}  // namespace thirdq
