#pragma once

#include <string>
#include <vector>

#include "thirdq/linalg.hpp"

namespace thirdq {

/// Jump operator sum_i (v_i a_i + w_i a_i^dag) + beta.
struct JumpOperator {
  ComplexVector v;  // loss amplitudes
  ComplexVector w;  // gain amplitudes
  Complex beta{0.0, 0.0};
};

/// H = a^dag h a + (a^T delta a + h.c.)/2 + (alpha . a^dag + h.c.), with jumps.
struct LindbladModel {
  int m = 0;
  ComplexMatrix h;
  ComplexMatrix delta;
  ComplexVector alpha;
  std::vector<JumpOperator> jumps;
  std::vector<std::string> warnings;  // ingest corrections
};

/// Validates sizes, Hermitizes h and symmetrizes delta. Empty delta/alpha
/// and empty jump vectors default to zero.
LindbladModel make_model(ComplexMatrix h, ComplexMatrix delta = {}, ComplexVector alpha = {},
                         std::vector<JumpOperator> jumps = {});

struct DissipationMatrices {
  ComplexMatrix V;  // sum v v^dag
  ComplexMatrix W;  // sum w w^dag
  ComplexMatrix U;  // -sum v w^dag
};

DissipationMatrices build_dissipation(const std::vector<JumpOperator>& jumps, int m);

}  // namespace thirdq
