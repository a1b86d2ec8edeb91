#pragma once

#include "thirdq/lindblad_model.hpp"

namespace thirdq {

// Superoperator basis b = (a_c, a_c^dag, a_q^dag, -a_q). For mode i of m:
//   a_c(i) -> i, a_c^dag(i) -> m+i, a_q^dag(i) -> 2m+i, -a_q(i) -> 3m+i.
// The Liouvillian is 1/2 b^T L b + eta . b_q + L0.

ComplexMatrix build_heff(const LindbladModel& model, const DissipationMatrices& d);

ComplexMatrix build_noise(const DissipationMatrices& d);

struct Drive {
  ComplexVector eta;  // (z, z*)
  ComplexVector z;
};

Drive build_drive(const LindbladModel& model);

/// Closed-system block matrix [[h, delta*], [delta, h*]].
ComplexMatrix closed_hamiltonian(const LindbladModel& model);

/// diag(I_m, -I_m)
ComplexMatrix signature_matrix(int m);

/// [[0, I_m], [I_m, 0]]
ComplexMatrix exchange_matrix(int m);

struct LiouvillianBlocks {
  int m = 0;
  ComplexMatrix Heff;  // 2m x 2m
  ComplexMatrix H;     // Hermitian part of Heff (closed system)
  ComplexMatrix N;     // 2m x 2m noise block
  ComplexMatrix Z;
  ComplexMatrix L;     // 4m x 4m
  ComplexMatrix J;
  ComplexVector eta;   // 2m, couples to b_q
  ComplexVector eta_c; // 2m, couples to b_c; nonzero only after a counting tilt
  ComplexVector z;
  Complex L0{0.0, 0.0};
  DissipationMatrices diss;
};

LiouvillianBlocks assemble_liouvillian(const LindbladModel& model);

/// Lower-left block of L, -i Z H_eff.
ComplexMatrix reduced_matrix(const LiouvillianBlocks& b);

struct HermiticityStructureReport {
  double heff = 0.0;   // ||X Heff* X - Heff||_inf
  double noise = 0.0;  // ||X N* X - N||_inf
  double max() const { return heff > noise ? heff : noise; }
};

HermiticityStructureReport validate_hermiticity_structure(const LiouvillianBlocks& b);

struct BlockInvariants {
  double symmetry = 0.0;        // ||L - L^T||_inf
  double upper_left = 0.0;      // max |L_cc|
  double trace = 0.0;           // |tr(-i Z Heff) - tr(W - V)|
  double gamma_hermitian = 0.0; // ||Gamma - Gamma^dag|| with Heff = H + i Gamma / 2
  double h_hermitian = 0.0;
  double noise_symmetry = 0.0;
  double psd = 0.0;             // -min eigenvalue of V, W (0 when PSD)
};

BlockInvariants block_invariants(const LiouvillianBlocks& b);

/// max(||h||, ||delta||, ||V||, ||W||, 1) in the infinity norm.
double model_scale(const LindbladModel& model, const DissipationMatrices& d);

}  // namespace thirdq
