#include "thirdq/liouvillian.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "thirdq/symplectic.hpp"

namespace thirdq {

ComplexMatrix build_heff(const LindbladModel& model, const DissipationMatrices& d) {
  const int m = model.m;
  const auto& V = d.V;
  const auto& W = d.W;
  const auto& U = d.U;
  ComplexMatrix H(2 * m, 2 * m);
  H.topLeftCorner(m, m) = model.h + 0.5 * kI * (W - V.conjugate());
  H.topRightCorner(m, m) = model.delta.conjugate() - 0.5 * kI * (U.adjoint() - U.conjugate());
  H.bottomLeftCorner(m, m) = model.delta + 0.5 * kI * (U.transpose() - U);
  H.bottomRightCorner(m, m) = model.h.conjugate() - 0.5 * kI * (W.conjugate() - V);
  return H;
}

ComplexMatrix build_noise(const DissipationMatrices& d) {
  const auto m = d.V.rows();
  ComplexMatrix N(2 * m, 2 * m);
  N.topLeftCorner(m, m) = d.U.adjoint() + d.U.conjugate();
  N.topRightCorner(m, m) = d.W + d.V.conjugate();
  N.bottomLeftCorner(m, m) = d.W.conjugate() + d.V;
  N.bottomRightCorner(m, m) = d.U.transpose() + d.U;
  return 0.5 * N;
}

Drive build_drive(const LindbladModel& model) {
  Drive out;
  out.z = -kI * model.alpha;
  for (const auto& j : model.jumps) {
    out.z += 0.5 * (std::conj(j.beta) * j.w - j.beta * j.v.conjugate());
  }
  out.eta.resize(2 * model.m);
  out.eta << out.z, out.z.conjugate();
  return out;
}

ComplexMatrix closed_hamiltonian(const LindbladModel& model) {
  const int m = model.m;
  ComplexMatrix H(2 * m, 2 * m);
  H << model.h, model.delta.conjugate(), model.delta, model.h.conjugate();
  return H;
}

ComplexMatrix signature_matrix(int m) {
  ComplexMatrix Z = ComplexMatrix::Identity(2 * m, 2 * m);
  Z.bottomRightCorner(m, m) *= -1.0;
  return Z;
}

ComplexMatrix exchange_matrix(int m) {
  ComplexMatrix X = ComplexMatrix::Zero(2 * m, 2 * m);
  X.topRightCorner(m, m).setIdentity();
  X.bottomLeftCorner(m, m).setIdentity();
  return X;
}

LiouvillianBlocks assemble_liouvillian(const LindbladModel& model) {
  LiouvillianBlocks b;
  const int m = model.m;
  b.m = m;
  b.diss = build_dissipation(model.jumps, m);
  b.Heff = build_heff(model, b.diss);
  b.H = closed_hamiltonian(model);
  b.N = build_noise(b.diss);
  b.Z = signature_matrix(m);
  const Drive dr = build_drive(model);
  b.eta = dr.eta;
  b.eta_c = ComplexVector::Zero(2 * model.m);
  b.z = dr.z;
  b.L0 = 0.5 * (b.diss.V - b.diss.W).trace();
  b.L = ComplexMatrix::Zero(4 * m, 4 * m);
  b.L.topRightCorner(2 * m, 2 * m) = -kI * b.Heff.transpose() * b.Z;
  b.L.bottomLeftCorner(2 * m, 2 * m) = -kI * b.Z * b.Heff;
  b.L.bottomRightCorner(2 * m, 2 * m) = b.N;
  b.J = standard_symplectic_form(2 * m);
  return b;
}

ComplexMatrix reduced_matrix(const LiouvillianBlocks& b) {
  return b.L.bottomLeftCorner(2 * b.m, 2 * b.m);
}

HermiticityStructureReport validate_hermiticity_structure(const LiouvillianBlocks& b) {
  const ComplexMatrix X = exchange_matrix(b.m);
  HermiticityStructureReport r;
  r.heff = inf_norm(ComplexMatrix(X * b.Heff.conjugate() * X - b.Heff));
  r.noise = inf_norm(ComplexMatrix(X * b.N.conjugate() * X - b.N));
  return r;
}

BlockInvariants block_invariants(const LiouvillianBlocks& b) {
  const int n = 2 * b.m;
  BlockInvariants r;
  r.symmetry = inf_norm(ComplexMatrix(b.L - b.L.transpose()));
  r.upper_left = max_abs(ComplexMatrix(b.L.topLeftCorner(n, n)));
  r.trace = std::abs((-kI * b.Z * b.Heff).trace() - (b.diss.W - b.diss.V).trace());
  const ComplexMatrix gamma = -2.0 * kI * (b.Heff - b.H);
  r.gamma_hermitian = inf_norm(ComplexMatrix(gamma - gamma.adjoint()));
  r.h_hermitian = inf_norm(ComplexMatrix(b.H - b.H.adjoint()));
  r.noise_symmetry = inf_norm(ComplexMatrix(b.N - b.N.transpose()));
  for (const ComplexMatrix* P : {&b.diss.V, &b.diss.W}) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(*P, Eigen::EigenvaluesOnly);
    r.psd = std::max(r.psd, -es.eigenvalues().minCoeff());
  }
  return r;
}

double model_scale(const LindbladModel& model, const DissipationMatrices& d) {
  return std::max({inf_norm(model.h), inf_norm(model.delta), inf_norm(d.V), inf_norm(d.W), 1.0});
}

}  // namespace thirdq
