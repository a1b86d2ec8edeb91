#include "thirdq/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "thirdq/error.hpp"
#include "thirdq/third_quantization.hpp"

namespace thirdq {

namespace {

Residual residual(std::string name, const ComplexMatrix& diff) {
  Residual r{std::move(name), 0.0, ""};
  Eigen::Index bi = 0, bj = 0;
  for (Eigen::Index j = 0; j < diff.cols(); ++j)
    for (Eigen::Index i = 0; i < diff.rows(); ++i)
      if (std::abs(diff(i, j)) > r.value) {
        r.value = std::abs(diff(i, j));
        bi = i;
        bj = j;
      }
  if (diff.size() > 0) r.location = "(" + std::to_string(bi) + ", " + std::to_string(bj) + ")";
  return r;
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (const auto& b : blocks) {
    out.block(k, k, b.rows(), b.cols()) = b;
    k += b.rows();
  }
  return out;
}

bool closed_under(const ComplexVector& v, double tol, Complex (*map)(Complex)) {
  const Eigen::Index n = v.size();
  std::vector<bool> used(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex target = map(v(i));
    Eigen::Index best = -1;
    double best_d = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(v(j) - target);
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < 0 || best_d > tol * std::max(1.0, std::abs(target))) return false;
    used[best] = true;
  }
  return true;
}

void require_candidate_shape(const ComplexMatrix& P, int m) {
  if (P.rows() != m || P.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "symmetry candidate must be m x m",
                "got " + std::to_string(P.rows()) + "x" + std::to_string(P.cols()));
  }
  require_finite(P, "symmetry candidate");
}

SymmetryVerdict finish(std::vector<Residual> conditions, Residual lifted, double scale) {
  SymmetryVerdict v;
  v.tolerance = kSymmetryRelTol * scale;
  v.conditions = std::move(conditions);
  v.lifted = std::move(lifted);
  v.holds = std::all_of(v.conditions.begin(), v.conditions.end(),
                        [&](const Residual& r) { return r.value <= v.tolerance; });
  return v;
}

}  // namespace

HermiticityReport hermiticity_check(const LiouvillianBlocks& b) {
  const int m = b.m;
  const ComplexMatrix X = exchange_matrix(m);
  const ComplexMatrix XX = block_diag({X, X});
  HermiticityReport r;
  r.residuals.push_back(residual("ALA = L", XX * b.L.conjugate() * XX - b.L));
  r.residuals.push_back(residual("X Heff* X = Heff", X * b.Heff.conjugate() * X - b.Heff));
  r.residuals.push_back(residual("X N* X = N", X * b.N.conjugate() * X - b.N));
  r.tolerance = kHermiticityRelTol * blocks_scale(b);
  r.pass = std::all_of(r.residuals.begin(), r.residuals.end(),
                       [&](const Residual& x) { return x.value <= r.tolerance; });
  return r;
}

bool conjugate_pairing_check(const ComplexVector& lambdas, double tol) {
  return closed_under(lambdas, tol, [](Complex x) { return std::conj(x); });
}

bool mirror_pairing_check(const ComplexVector& lambdas, double tol) {
  return closed_under(lambdas, tol, [](Complex x) { return -std::conj(x); });
}

double symmetry_scale(const LindbladModel& model, const DissipationMatrices& d) {
  return std::max({inf_norm(model.h), inf_norm(model.delta), inf_norm(d.V), inf_norm(d.W), 1.0});
}

SymmetryVerdict unitary_symmetry_check(const LindbladModel& model, const DissipationMatrices& d,
                                       const UnitarySymmetryCandidate& cand) {
  const int m = model.m;
  const ComplexMatrix& P = cand.P;
  require_candidate_shape(P, m);
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  if (max_abs(ComplexMatrix(P.adjoint() * P - I)) > 1e-10) {
    throw Error(ErrorCode::InvalidInput, "unitary symmetry candidate is not unitary");
  }
  const ComplexVector z = build_drive(model).z;
  std::vector<Residual> c;
  c.push_back(residual("P^dag h P = h", P.adjoint() * model.h * P - model.h));
  c.push_back(residual("P^T Delta P = Delta", P.transpose() * model.delta * P - model.delta));
  c.push_back(residual("P z = z", ComplexMatrix(P * z - z)));
  c.push_back(residual("P^T U P = U", P.transpose() * d.U * P - d.U));
  c.push_back(residual("P^dag W P = W", P.adjoint() * d.W * P - d.W));
  c.push_back(residual("P^T V P* = V", P.transpose() * d.V * P.conjugate() - d.V));

  const LiouvillianBlocks b = assemble_liouvillian(model);
  const ComplexMatrix Pc = P.conjugate();
  const ComplexMatrix Wt = block_diag({P, Pc, Pc, P});
  Residual lifted = residual("Omega~^T L Omega~ = L", Wt.transpose() * b.L * Wt - b.L);
  // The drive enters L only through eta; lift it as a vector on the b_q half.
  const ComplexMatrix Wq = block_diag({Pc, P});
  const Residual eta = residual("eta", ComplexMatrix(Wq.transpose() * b.eta - b.eta));
  if (eta.value > lifted.value) lifted.value = eta.value;
  return finish(std::move(c), std::move(lifted), symmetry_scale(model, d));
}

SymmetryVerdict pt_symmetry_check(const LindbladModel& model, const DissipationMatrices& d,
                                  const PTSymmetryCandidate& cand) {
  const int m = model.m;
  const ComplexMatrix& P = cand.P;
  require_candidate_shape(P, m);
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  if (max_abs(ComplexMatrix(P.imag().cast<Complex>())) > 1e-10 ||
      max_abs(ComplexMatrix(P * P.transpose() - I)) > 1e-10 ||
      max_abs(ComplexMatrix(P - P.transpose())) > 1e-10) {
    throw Error(ErrorCode::InvalidInput, "PT candidate must be real, orthogonal and symmetric");
  }
  const ComplexVector z = build_drive(model).z;
  std::vector<Residual> c;
  c.push_back(residual("P h* P = h", P * model.h.conjugate() * P - model.h));
  c.push_back(residual("P Delta* P = Delta", P * model.delta.conjugate() * P - model.delta));
  c.push_back(residual("P z = -z*", ComplexMatrix(P * z + z.conjugate())));
  c.push_back(residual("P U P = U^dag", P * d.U * P - d.U.adjoint()));
  c.push_back(residual("P W P = V", P * d.W * P - d.V));

  // Omega~ = diag(P, P, -P, -P) K acting on the full L.
  const LiouvillianBlocks b = assemble_liouvillian(model);
  const ComplexMatrix Pt = block_diag({P, P, -P, -P});
  Residual lifted = residual("Omega~^T L Omega~ = L", Pt.transpose() * b.L.conjugate() * Pt - b.L);
  return finish(std::move(c), std::move(lifted), symmetry_scale(model, d));
}

std::string to_string(PTPhase p) {
  switch (p) {
    case PTPhase::Unbroken: return "unbroken";
    case PTPhase::Broken: return "broken";
    case PTPhase::Exceptional: return "exceptional";
  }
  return "unknown";
}

PTPhase pt_classification(const ComplexVector& lambdas, bool defective, double scale) {
  if (defective) return PTPhase::Exceptional;
  const double tol = kSymmetryRelTol * scale;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    if (std::abs(lambdas(i).real()) > tol) return PTPhase::Broken;
  return PTPhase::Unbroken;
}

PTPhase pt_classification(const LiouvillianBlocks& blocks) {
  const ReducedSpectrum rs = reduced_spectrum(blocks);
  return pt_classification(rs.lambdas, rs.defective, blocks_scale(blocks));
}

}  // namespace thirdq
