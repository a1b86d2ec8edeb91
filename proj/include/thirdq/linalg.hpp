#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace thirdq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Induced infinity norm (maximum absolute row sum).
double inf_norm(const ComplexMatrix& m);

/// Largest absolute entry of a vector.
double max_abs(const ComplexVector& v);

/// Largest absolute entry of a matrix.
double max_abs(const ComplexMatrix& m);

/// Throws InvalidInput when the matrix is empty or holds NaN/Inf entries.
void require_finite(const ComplexMatrix& m, std::string_view what);

/// Throws DimensionMismatch unless the matrix is square.
void require_square(const ComplexMatrix& m, std::string_view what);

/// Orthonormal basis of the numerical null space. Singular values at or below
/// `threshold` count as zero.
ComplexMatrix null_space(const ComplexMatrix& m, double threshold);

/// Number of singular values at or below `threshold`.
int nullity(const ComplexMatrix& m, double threshold);

/// sigma_min / sigma_max; 0 for a numerically singular matrix.
double inverse_condition(const ComplexMatrix& m);

}  // namespace thirdq
