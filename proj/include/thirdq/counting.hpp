#pragma once

// Counting-field tilts L(s) = L + s O, branch continuation of the tilted
// spectrum and the long-time factorial cumulant generating function.

#include <vector>

#include "thirdq/liouvillian.hpp"

namespace thirdq {

/// Observable 1/2 b^T quad b + lin . b + constant in the frozen b basis.
struct QuadraticObservable {
  ComplexMatrix quad;  // 4m x 4m, symmetric
  ComplexVector lin;   // 4m
  Complex constant{0.0, 0.0};
};

/// gamma a_+ a_-^dag on one mode, i.e. rho -> gamma a rho a^dag.
QuadraticObservable photon_current_observable(const LiouvillianBlocks& blocks, int mode, double gamma);

/// Blocks of L + s O. The upper-left block is nonzero for s != 0.
LiouvillianBlocks tilt(const LiouvillianBlocks& blocks, const QuadraticObservable& obs, Complex s);

struct TiltedBranchSet {
  std::vector<Complex> sGrid;                   // ascending along the path
  std::vector<std::vector<Complex>> branches;   // branches[i][k] = lambda_i(sGrid[k])
  std::vector<Complex> offset;                  // s * constant - 1/2 l^T L(s)^-1 l per grid point
  double overlapLog = 1.0;                      // smallest accepted eigenvector overlap
  std::size_t origin = 0;                       // index of s = 0 in sGrid
};

/// Continues the n = 2m gauge-fixed eigenvalues from s = 0 to sMax over
/// `steps` equal grid intervals.
TiltedBranchSet track_branches(const LiouvillianBlocks& blocks, const QuadraticObservable& obs,
                               Complex sMax, int steps);

/// Grid -sMax .. sMax with `steps` intervals on each side.
TiltedBranchSet track_branches_symmetric(const LiouvillianBlocks& blocks, const QuadraticObservable& obs,
                                         Complex sMax, int steps);

/// G(s) = 1/2 sum_i [lambda_i(s) - lambda_i(0)] + offset(s). s must be a grid point.
Complex generating_function(const TiltedBranchSet& set, Complex s);

/// G on every grid point.
std::vector<Complex> generating_function_samples(const TiltedBranchSet& set);

/// d^k G / ds^k at 0 for k = 1..order (order <= 4); central differences at
/// the grid spacing with one Richardson step.
std::vector<Complex> factorial_cumulants(const TiltedBranchSet& set, int order);

/// Ordinary cumulants from the factorial ones (s = e^{i chi} - 1).
std::vector<Complex> ordinary_cumulants(const TiltedBranchSet& set, int order);

/// Stirling relation used by ordinary_cumulants, order <= 4.
std::vector<Complex> factorial_to_ordinary(const std::vector<Complex>& factorial);

}  // namespace thirdq
