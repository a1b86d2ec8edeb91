#pragma once

// Brute-force Lindblad superoperator on a truncated Fock space. Built directly
// from the model's Hamiltonian and jump operators; shares no code with the
// symplectic engine.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "thirdq/lindblad_model.hpp"

namespace thirdq {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Photon current gamma a rho a^dag on one mode, the counting tilt.
struct PhotonCounting {
  int mode = 0;
  double gamma = 0.0;
};

struct OracleGenerator {
  int d = 0;  // states per mode
  int m = 0;
  Complex s{0.0, 0.0};
  SparseMatrix matrix;  // acts on column-major vec(rho)
  std::vector<std::string> warnings;
  Eigen::Index hilbert_dim() const;
  Eigen::Index dim() const { return matrix.rows(); }
};

/// Largest allowed superoperator dimension d^(2m).
inline constexpr Eigen::Index kOracleMaxDim = Eigen::Index{1} << 14;

OracleGenerator build_oracle(const LindbladModel& model, int d, Complex s = {0.0, 0.0},
                             std::optional<PhotonCounting> obs = std::nullopt);

ComplexMatrix dense_matrix(const OracleGenerator& gen);

/// max |vec(I)^T G| (zero for a trace-preserving generator).
double trace_preservation_residual(const OracleGenerator& gen);

/// k eigenvalues with largest real parts, descending (ties by imaginary part).
std::vector<Complex> oracle_spectrum(const OracleGenerator& gen, int k);

/// All eigenvalues, dense LAPACK solve.
std::vector<Complex> oracle_eigenvalues(const OracleGenerator& gen);

/// Stationary density matrix of an untilted generator (trace one).
ComplexMatrix oracle_stationary_state(const OracleGenerator& gen);

/// <a_i^dag a_i> and <a_i> in the stationary state.
struct OracleMoments {
  std::vector<double> occupation;
  std::vector<Complex> mean;
};

OracleMoments oracle_moments(const OracleGenerator& gen);

/// Eigenvalue nearest to `shift` from the right (inverse iteration with a
/// shift slightly to the right), i.e. the leading eigenvalue when shift is a
/// good estimate.
Complex oracle_leading_tilted_eigenvalue(const OracleGenerator& gen, Complex shift = {0.0, 0.0});

/// Leading tilted eigenvalue continued from s = 0 to each target in turn.
std::vector<Complex> oracle_tilted_branch(const LindbladModel& model, int d, const PhotonCounting& obs,
                                          const std::vector<Complex>& targets,
                                          double max_step = 0.05);

}  // namespace thirdq
