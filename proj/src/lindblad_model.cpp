#include "thirdq/lindblad_model.hpp"

#include <cmath>
#include <cstdio>

#include "thirdq/error.hpp"

namespace thirdq {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void check_vector(ComplexVector& x, int m, const std::string& what) {
  if (x.size() == 0) {
    x = ComplexVector::Zero(m);
    return;
  }
  if (x.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, what + " must have length m",
                "got " + std::to_string(x.size()) + ", m = " + std::to_string(m));
  }
  if (!x.allFinite()) throw Error(ErrorCode::InvalidInput, what + " contains non-finite entries");
}

}  // namespace

LindbladModel make_model(ComplexMatrix h, ComplexMatrix delta, ComplexVector alpha,
                         std::vector<JumpOperator> jumps) {
  require_finite(h, "h");
  require_square(h, "h");
  const int m = static_cast<int>(h.rows());
  LindbladModel model;
  model.m = m;

  if (delta.size() == 0) delta = ComplexMatrix::Zero(m, m);
  if (delta.rows() != m || delta.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "delta must be m x m");
  }
  require_finite(delta, "delta");
  check_vector(alpha, m, "alpha");
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const std::string tag = "jumps[" + std::to_string(k) + "]";
    check_vector(jumps[k].v, m, tag + ".v");
    check_vector(jumps[k].w, m, tag + ".w");
    if (!std::isfinite(jumps[k].beta.real()) || !std::isfinite(jumps[k].beta.imag())) {
      throw Error(ErrorCode::InvalidInput, tag + ".beta is not finite");
    }
  }

  const ComplexMatrix hh = 0.5 * (h + h.adjoint());
  const ComplexMatrix ds = 0.5 * (delta + delta.transpose());
  const double dh = inf_norm(ComplexMatrix(hh - h));
  const double dd = inf_norm(ComplexMatrix(ds - delta));
  if (dh > 1e-10) model.warnings.push_back("h was not Hermitian; correction " + sci(dh));
  if (dd > 1e-10) model.warnings.push_back("delta was not symmetric; correction " + sci(dd));

  model.h = hh;
  model.delta = ds;
  model.alpha = std::move(alpha);
  model.jumps = std::move(jumps);
  return model;
}

DissipationMatrices build_dissipation(const std::vector<JumpOperator>& jumps, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidInput, "model needs at least one mode");
  DissipationMatrices d{ComplexMatrix::Zero(m, m), ComplexMatrix::Zero(m, m),
                        ComplexMatrix::Zero(m, m)};
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const auto& j = jumps[k];
    if (j.v.size() != m || j.w.size() != m) {
      throw Error(ErrorCode::DimensionMismatch, "jump vector length differs from m",
                  "jumps[" + std::to_string(k) + "]");
    }
    d.V += j.v * j.v.adjoint();
    d.W += j.w * j.w.adjoint();
    d.U -= j.v * j.w.adjoint();
  }
  return d;
}

}  // namespace thirdq
