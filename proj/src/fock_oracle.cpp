#include "thirdq/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <lapacke.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "thirdq/error.hpp"

namespace thirdq {

namespace {

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out = Eigen::kroneckerProduct(a, b);
  return out;
}

// Truncated annihilation operator on one mode.
SparseMatrix ladder(int d) {
  SparseMatrix a(d, d);
  std::vector<Eigen::Triplet<Complex>> t;
  for (int n = 1; n < d; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// a_i on the m-mode space, mode 0 leftmost in the tensor product.
std::vector<SparseMatrix> mode_operators(int m, int d) {
  const SparseMatrix a = ladder(d);
  const SparseMatrix I = sparse_identity(d);
  std::vector<SparseMatrix> ops;
  for (int i = 0; i < m; ++i) {
    SparseMatrix op(1, 1);
    op.insert(0, 0) = 1.0;
    for (int k = 0; k < m; ++k) op = kron(op, k == i ? a : I);
    ops.push_back(op);
  }
  return ops;
}

SparseMatrix adj(const SparseMatrix& x) { return SparseMatrix(x.adjoint()); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

Eigen::Index OracleGenerator::hilbert_dim() const {
  Eigen::Index D = 1;
  for (int i = 0; i < m; ++i) D *= d;
  return D;
}

OracleGenerator build_oracle(const LindbladModel& model, int d, Complex s,
                             std::optional<PhotonCounting> obs) {
  if (d < 2) throw Error(ErrorCode::InvalidInput, "oracle cutoff must be at least 2");
  const int m = model.m;
  double sdim = 1.0;
  for (int i = 0; i < 2 * m; ++i) sdim *= d;
  if (sdim > static_cast<double>(kOracleMaxDim)) {
    throw Error(ErrorCode::ResourceLimit, "oracle dimension d^(2m) exceeds 2^14",
                "d = " + std::to_string(d) + ", m = " + std::to_string(m));
  }
  if (obs && (obs->mode < 0 || obs->mode >= m)) {
    throw Error(ErrorCode::IndexOutOfRange, "counted mode out of range",
                "mode " + std::to_string(obs->mode));
  }

  const auto a = mode_operators(m, d);
  const Eigen::Index D = a[0].rows();
  const SparseMatrix I = sparse_identity(D);

  SparseMatrix H(D, D);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      H += model.h(i, j) * (adj(a[i]) * a[j]);
      H += 0.5 * model.delta(i, j) * (a[i] * a[j]);
      H += 0.5 * std::conj(model.delta(j, i)) * (adj(a[i]) * adj(a[j]));
    }
    H += std::conj(model.alpha(i)) * a[i] + model.alpha(i) * adj(a[i]);
  }

  // vec(A rho B) = (B^T kron A) vec(rho)
  SparseMatrix G = -kI * (kron(I, H) - kron(SparseMatrix(H.transpose()), I));
  for (const auto& jump : model.jumps) {
    SparseMatrix L = jump.beta * I;
    for (int i = 0; i < m; ++i) L += jump.v(i) * a[i] + jump.w(i) * adj(a[i]);
    const SparseMatrix LdL = adj(L) * L;
    G += kron(SparseMatrix(L.conjugate()), L);
    G -= 0.5 * kron(I, LdL);
    G -= 0.5 * kron(SparseMatrix(LdL.transpose()), I);
  }
  if (obs && s != Complex(0.0, 0.0)) {
    const SparseMatrix& ai = a[obs->mode];
    G += (s * obs->gamma) * kron(SparseMatrix(ai.conjugate()), ai);
  }
  G.makeCompressed();

  OracleGenerator gen;
  gen.d = d;
  gen.m = m;
  gen.s = s;
  gen.matrix = G;

  // Population piling up near the cutoff signals an unreliable truncation.
  try {
    OracleGenerator plain = gen;
    if (gen.s != Complex(0.0, 0.0)) plain = build_oracle(model, d);
    const auto mom = oracle_moments(plain);
    for (int i = 0; i < m; ++i) {
      if (mom.occupation[i] > d / 3.0) {
        gen.warnings.push_back("TruncationWarning: stationary occupation of mode " +
                               std::to_string(i) + " is " + sci(mom.occupation[i]) +
                               " > d/3 = " + sci(d / 3.0));
      }
    }
  } catch (const Error& e) {
    gen.warnings.push_back(std::string("TruncationWarning: stationary solve failed: ") + e.what());
  }
  return gen;
}

ComplexMatrix dense_matrix(const OracleGenerator& gen) { return ComplexMatrix(gen.matrix); }

double trace_preservation_residual(const OracleGenerator& gen) {
  const Eigen::Index D = gen.hilbert_dim();
  ComplexVector vecI = ComplexVector::Zero(gen.dim());
  for (Eigen::Index k = 0; k < D; ++k) vecI(k * D + k) = 1.0;
  const ComplexVector r = gen.matrix.transpose() * vecI;
  return max_abs(r);
}

std::vector<Complex> oracle_eigenvalues(const OracleGenerator& gen) {
  ComplexMatrix G = dense_matrix(gen);
  const lapack_int n = static_cast<lapack_int>(G.rows());
  std::vector<lapack_complex_double> w(n);
  lapack_complex_double dummy[1];
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                        reinterpret_cast<lapack_complex_double*>(G.data()), n,
                                        w.data(), dummy, 1, dummy, 1);
  if (info != 0) {
    throw Error(ErrorCode::OracleMismatch, "LAPACK zgeev failed", "info = " + std::to_string(info));
  }
  std::vector<Complex> out(n);
  for (lapack_int k = 0; k < n; ++k) out[k] = reinterpret_cast<const Complex&>(w[k]);
  return out;
}

std::vector<Complex> oracle_spectrum(const OracleGenerator& gen, int k) {
  auto ev = oracle_eigenvalues(gen);
  std::stable_sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  if (k >= 0 && static_cast<std::size_t>(k) < ev.size()) ev.resize(k);
  return ev;
}

ComplexMatrix oracle_stationary_state(const OracleGenerator& gen) {
  const Eigen::Index D = gen.hilbert_dim();
  const Eigen::Index n = gen.dim();
  // Replace the first equation by the trace condition.
  std::vector<Eigen::Triplet<Complex>> t;
  for (int k = 0; k < gen.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(gen.matrix, k); it; ++it) {
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index k = 0; k < D; ++k) t.emplace_back(0, k * D + k, 1.0);
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  ComplexVector rhs = ComplexVector::Zero(n);
  rhs(0) = 1.0;
  // Two-mode superoperators fill in badly under direct LU; a tight ILUT
  // preconditioner makes BiCGSTAB converge in a handful of steps.
  ComplexVector x;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<Complex>> it;
  it.preconditioner().setFillfactor(10);
  it.setTolerance(1e-14);
  it.setMaxIterations(2000);
  it.compute(A);
  if (it.info() == Eigen::Success) x = it.solve(rhs);
  if (it.info() != Eigen::Success || (A * x - rhs).norm() > 1e-10) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularInput, "stationary-state system is singular");
    }
    x = lu.solve(rhs);
  }
  ComplexMatrix rho = Eigen::Map<const ComplexMatrix>(x.data(), D, D);
  return 0.5 * (rho + rho.adjoint());
}

OracleMoments oracle_moments(const OracleGenerator& gen) {
  const ComplexMatrix rho = oracle_stationary_state(gen);
  const auto a = mode_operators(gen.m, gen.d);
  OracleMoments out;
  for (int i = 0; i < gen.m; ++i) {
    const ComplexMatrix ai(a[i]);
    out.occupation.push_back((ai.adjoint() * ai * rho).trace().real());
    out.mean.push_back((ai * rho).trace());
  }
  return out;
}

Complex oracle_leading_tilted_eigenvalue(const OracleGenerator& gen, Complex shift) {
  const Eigen::Index n = gen.dim();
  const Eigen::Index D = gen.hilbert_dim();
  const Complex sigma = shift + 1e-3;
  SparseMatrix A = gen.matrix - sigma * sparse_identity(n);
  A.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInput, "shifted oracle generator is singular");
  }
  ComplexVector x = ComplexVector::Zero(n);
  for (Eigen::Index k = 0; k < D; ++k) x(k * D + k) = 1.0;
  x.normalize();
  Complex lam = shift, prev = shift;
  for (int it = 0; it < 500; ++it) {
    const ComplexVector y = lu.solve(x);
    const Complex theta = x.dot(y);
    lam = sigma + 1.0 / theta;
    x = y / y.norm();
    if (it > 2 && std::abs(lam - prev) <= 1e-14 * std::max(1.0, std::abs(lam))) break;
    prev = lam;
  }
  const ComplexVector r = gen.matrix * x - lam * x;
  if (r.norm() > 1e-8 * std::max(1.0, std::abs(lam))) {
    throw Error(ErrorCode::OracleMismatch, "oracle inverse iteration did not converge",
                "residual " + sci(r.norm()));
  }
  return lam;
}

std::vector<Complex> oracle_tilted_branch(const LindbladModel& model, int d, const PhotonCounting& obs,
                                          const std::vector<Complex>& targets, double max_step) {
  std::vector<Complex> out;
  Complex s_prev{0.0, 0.0}, lam_prev{0.0, 0.0};
  for (const Complex target : targets) {
    const double dist = std::abs(target - s_prev);
    const int steps = std::max(1, static_cast<int>(std::ceil(dist / max_step)));
    for (int k = 1; k <= steps; ++k) {
      const Complex s = s_prev + (target - s_prev) * (static_cast<double>(k) / steps);
      lam_prev = oracle_leading_tilted_eigenvalue(build_oracle(model, d, s, obs), lam_prev);
    }
    s_prev = target;
    out.push_back(lam_prev);
  }
  return out;
}

}  // namespace thirdq
