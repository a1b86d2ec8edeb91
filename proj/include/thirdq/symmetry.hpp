#pragma once

// Hermiticity structure, unitary Liouvillian symmetries and PT-'symmetry'
// checks against user-supplied candidates.

#include <string>
#include <vector>

#include "thirdq/liouvillian.hpp"

namespace thirdq {

inline constexpr double kSymmetryRelTol = 1e-9;
inline constexpr double kHermiticityRelTol = 1e-10;
inline constexpr double kPairingTol = 1e-8;

struct Residual {
  std::string name;
  double value = 0.0;
  std::string location;  // "(row, col)" of the largest entry
};

struct HermiticityReport {
  std::vector<Residual> residuals;  // A L A = L, X Heff* X = Heff, X N* X = N
  double tolerance = 0.0;
  bool pass = false;
};

HermiticityReport hermiticity_check(const LiouvillianBlocks& blocks);

/// Multiset closed under lambda -> lambda* within tol.
bool conjugate_pairing_check(const ComplexVector& lambdas, double tol = kPairingTol);

/// Multiset closed under lambda -> -lambda* within tol.
bool mirror_pairing_check(const ComplexVector& lambdas, double tol = kPairingTol);

struct UnitarySymmetryCandidate {
  ComplexMatrix P;  // m x m unitary
};

struct PTSymmetryCandidate {
  ComplexMatrix P;  // m x m real, orthogonal, symmetric
};

struct SymmetryVerdict {
  bool holds = false;
  std::vector<Residual> conditions;
  Residual lifted;  // end-to-end check on the full L
  double tolerance = 0.0;
};

/// max(||h||, ||delta||, ||V||, ||W||, 1)
double symmetry_scale(const LindbladModel& model, const DissipationMatrices& d);

SymmetryVerdict unitary_symmetry_check(const LindbladModel& model, const DissipationMatrices& d,
                                       const UnitarySymmetryCandidate& cand);

SymmetryVerdict pt_symmetry_check(const LindbladModel& model, const DissipationMatrices& d,
                                  const PTSymmetryCandidate& cand);

enum class PTPhase { Unbroken, Broken, Exceptional };

std::string to_string(PTPhase p);

PTPhase pt_classification(const ComplexVector& lambdas, bool defective, double scale);

/// Uses the spectrum and Jordan structure of the reduced matrix.
PTPhase pt_classification(const LiouvillianBlocks& blocks);

}  // namespace thirdq
