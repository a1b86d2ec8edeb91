#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thirdq/liouvillian.hpp"
#include "thirdq/symplectic.hpp"

namespace thirdq {

// After the transformation b = S (u, v) the Liouvillian reads
//   sum_i lambda_i v_i u_i + nu v_{p+1} u_p + 1/2 sum_ij M_ij v_i v_j + eta' . v + L0
// where the nu term only exists at a coalesced pair and M only couples
// resonant modes (lambda_i + lambda_j = 0).

struct JordanData {
  Complex mu;
  Complex nu;
  int p = 0;  // chain head index; the tail sits at p + 1
};

struct ModeCoupling {
  int i = 0;
  int j = 0;  // i <= j
  Complex value;
};

struct FormResiduals {
  double symplectic = 0.0;   // ||S^T J S - J||_inf
  double normal_form = 0.0;  // ||S^T L S - expected||_inf / max(1, ||L||_inf)
  double lower_left = 0.0;   // ||S_21||_inf / ||S||_inf
  double s3_inverse = 0.0;   // ||S3^T - S1^-1||_inf
  double s2s3 = 0.0;         // ||S2^T S3 - S3^T S2||_inf
  double trace = 0.0;        // |sum lambda + 2 L0|
};

enum class QuantizationMethod { Auto, NormalForm, BlockTriangular };

struct ThirdQuantizedForm {
  ComplexMatrix S;
  ComplexMatrix S1, S2, S3;
  ComplexVector lambdas;
  ComplexVector etaPrime;
  Complex L0{0.0, 0.0};
  std::optional<JordanData> jordan;
  std::vector<ModeCoupling> couplings;
  FormResiduals residuals;
  std::string method;      // "normal-form" or "block-triangular"
  bool negated_t = false;  // normal-form path only
  double scale = 1.0;      // model scale used for tolerances
  LiouvillianBlocks source;
};

ThirdQuantizedForm third_quantize(const LiouvillianBlocks& blocks,
                                  QuantizationMethod method = QuantizationMethod::Auto);

/// max over eigen columns of ||(Heff - i lambda Z) s||_inf / (||s||_inf max(1, ||Heff||_inf)).
/// The chain head of a coalesced pair is skipped.
double heff_eigencheck(const ThirdQuantizedForm& form);

/// sum_i n_i lambda_i for a diagonalizable form.
Complex liouvillian_eigenvalue(const ThirdQuantizedForm& form, const std::vector<int>& occupation);

struct OccupationEigenvalue {
  std::vector<int> occupation;
  Complex value;
};

/// All occupation sums with total excitation <= max_total, ordered by |Re|
/// ascending, then |Im|, then lexicographically.
std::vector<OccupationEigenvalue> occupation_spectrum(const ThirdQuantizedForm& form,
                                                      int max_total);

/// Eigenvalues of the true eigenstates |0, n2> of a coalesced pair: n2 * mu.
std::vector<Complex> jordan_eigenstate_eigenvalues(const ThirdQuantizedForm& form, int max_n);

/// Stationary <b_c> = -S1 Lambda^-1 eta' (first m entries are <a>).
ComplexVector stationary_mean(const ThirdQuantizedForm& form);

enum class StabilityClass { Stable, Critical, ExponentiallyUnstable, PolynomiallyUnstable };

std::string_view to_string(StabilityClass c);

struct StabilityReport {
  StabilityClass cls = StabilityClass::Stable;
  double maxRealPart = 0.0;
  double spectralGap = 0.0;
  double tolerance = 0.0;
};

StabilityReport classify_stability(const ThirdQuantizedForm& form);

/// Terms m = 0..n1 of exp(Lt)|n1, n2> = sum_m c_m |n1 - m, n2 + m> for
/// L = mu (v1 u1 + v2 u2) + nu v2 u1.
std::vector<std::pair<int, Complex>> jordan_evolution_coefficients(Complex mu, Complex nu,
                                                                   double t, int n1, int n2);

/// Spectrum and Jordan structure of -i Z Heff without building a full form.
struct ReducedSpectrum {
  ComplexVector lambdas;
  JordanStructure structure;
  bool defective = false;
};

ReducedSpectrum reduced_spectrum(const LiouvillianBlocks& blocks);

/// max(||H_11||, ||H_12||, ||V||, ||W||, 1) from assembled blocks.
double blocks_scale(const LiouvillianBlocks& b);

}  // namespace thirdq
