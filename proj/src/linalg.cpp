#include "thirdq/linalg.hpp"

#include <string>

#include "thirdq/error.hpp"

namespace thirdq {

double inf_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs(const ComplexVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " is empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " contains non-finite entries");
  }
}

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be square",
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

ComplexMatrix null_space(const ComplexMatrix& m, double threshold) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) ++rank;
  }
  const Eigen::Index cols = m.cols();
  return svd.matrixV().rightCols(cols - rank);
}

int nullity(const ComplexMatrix& m, double threshold) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) ++rank;
  }
  return static_cast<int>(m.cols()) - rank;
}

double inverse_condition(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace thirdq
