#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "thirdq/linalg.hpp"

namespace thirdq {

/// [[0, I_n], [-I_n, 0]]
ComplexMatrix standard_symplectic_form(int n);

/// [[0, diag(lambdas)], [diag(lambdas), 0]]
ComplexMatrix normal_form_matrix(const ComplexVector& lambdas);

struct GeneralizedEigenSolution {
  ComplexVector values;                       // 2n entries
  ComplexMatrix vectors;                      // unit 2-norm columns
  std::vector<std::pair<int, int>> pairing;   // values[j] ~ -values[i]
  double residual = 0.0;                      // max ||Lq - lambda Jq||_inf / max(1, ||L||_inf)
  double pairing_residual = 0.0;              // max |values[i] + values[j]|
  bool defective = false;                     // vectors then contain repeats
};

/// Solves L q = lambda J q. J must be the standard symplectic form.
/// Partners are found by nearest match on lambda_i ~ -lambda_j.
GeneralizedEigenSolution generalized_eigs(const ComplexMatrix& L, const ComplexMatrix& J);

/// Principal-type square root via Schur decomposition. The branch cut is
/// rotated into the widest empty angular sector of the spectrum.
ComplexMatrix matrix_sqrt(const ComplexMatrix& T);

struct JordanCoupling {
  int i = 0;
  int j = 0;
  Complex nu;
};

struct NormalFormResiduals {
  double symplectic = 0.0;   // ||S^T J S - J||_inf
  double normal_form = 0.0;  // ||S^T L S - [[0,L],[L,0]]||_inf
  double t_commutes_L = 0.0; // ||T^T L - L T||_inf / (||T|| ||L||)
  double t_commutes_J = 0.0; // ||T^T J - J T||_inf / ||T||
  double sqrt = 0.0;         // ||B^2 - T||_inf / ||T||_inf
};

struct SymplecticNormalForm {
  ComplexMatrix S;
  ComplexVector lambdas;
  std::vector<JordanCoupling> jordan_coupling;
  NormalFormResiduals residuals;
  bool negated_t = false;  // the -T branch produced S^T J S = J
};

/// S^T J S = J and S^T L S = [[0, Lambda], [Lambda, 0]] for diagonalizable J^{-1} L.
SymplecticNormalForm sympl_normal_form(const ComplexMatrix& L);

struct EigenCluster {
  Complex center;
  std::vector<int> members;      // indices into the raw eigenvalue list
  std::vector<int> block_sizes;  // descending
  int algebraic() const { return static_cast<int>(members.size()); }
  int geometric() const { return static_cast<int>(block_sizes.size()); }
  bool defective() const { return geometric() < algebraic(); }
};

struct JordanStructure {
  ComplexVector eigenvalues;
  std::vector<EigenCluster> clusters;
  int max_block() const;
  int defective_blocks() const;  // count of blocks of size >= 2
  bool diagonalizable() const { return max_block() <= 1; }
};

/// Groups eigenvalues of M into clusters and reads the Jordan block sizes of
/// each cluster off the nullity sequence of (M - mu I)^p.
JordanStructure jordan_structure(const ComplexMatrix& M);

/// Cluster-aware eigenbasis: semisimple degenerate clusters get an orthonormal
/// null-space basis. Returns nullopt when M is defective.
std::optional<ComplexMatrix> eigenbasis(const ComplexMatrix& M, const JordanStructure& js);

enum class JordanKind { Diagonalizable, SingleCoalescedPair, MultiplePairs };

std::string_view to_string(JordanKind k);

struct JordanChain {
  Complex mu;
  Complex nu;
  ComplexVector head;  // s1: A s1 = mu s1 + nu s2
  ComplexVector tail;  // s2: A s2 = mu s2
};

/// Chain basis for a single 2x2 block of A at `mu`, scaled so that the
/// generalized vector is a unit coordinate direction projected on the block's
/// invariant subspace and nu = ||(A - mu) s1||_inf.
JordanChain jordan_chain(const ComplexMatrix& A, Complex mu);

struct JordanReport {
  JordanKind kind = JordanKind::Diagonalizable;
  JordanStructure structure;
  double eigvec_conditioning = 1.0;  // sigma_min / sigma_max of the eigenvector matrix
  std::optional<JordanChain> chain;  // for trace-preserving L with one defective pair
};

/// Classifies J^{-1} L. MultiplePairs covers several 2x2 blocks (resonant
/// modes); blocks larger than 2x2 throw UnsupportedJordanStructure.
JordanReport detect_jordan(const ComplexMatrix& L, const ComplexMatrix& J);

}  // namespace thirdq
