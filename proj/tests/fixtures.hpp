#pragma once

// Reference models shared by unit tests and the acceptance binary.

#include <cmath>
#include <random>

#include "thirdq/lindblad_model.hpp"

namespace fixtures {

using thirdq::Complex;
using thirdq::ComplexMatrix;
using thirdq::ComplexVector;
using thirdq::JumpOperator;
using thirdq::LindbladModel;

inline ComplexVector vec1(Complex x) {
  ComplexVector v(1);
  v << x;
  return v;
}

inline ComplexVector vec2(Complex x, Complex y) {
  ComplexVector v(2);
  v << x, y;
  return v;
}

// H = det/2 a^dag a + i eps/4 (a^dag^2 - a^2), thermal loss.
inline LindbladModel parametric(double gamma, double det, double eps, double nbar) {
  ComplexMatrix h(1, 1), d(1, 1);
  h << det / 2.0;
  d << Complex(0.0, -eps / 2.0);
  std::vector<JumpOperator> jumps;
  jumps.push_back({vec1(std::sqrt(gamma * (nbar + 1.0))), vec1(0.0), 0.0});
  if (nbar > 0.0) jumps.push_back({vec1(0.0), vec1(std::sqrt(gamma * nbar)), 0.0});
  return thirdq::make_model(h, d, {}, jumps);
}

inline LindbladModel thermal(double gamma, double nbar) { return parametric(gamma, 0.0, 0.0, nbar); }

inline LindbladModel driven(double gamma, Complex alpha, double nbar = 0.0) {
  LindbladModel m = parametric(gamma, 0.0, 0.0, nbar);
  m.alpha = vec1(alpha);
  return m;
}

// H = g/2 (a b^dag + a^dag b), loss on a, gain on b.
inline LindbladModel coupled(double g, double gl, double gg) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = g / 2.0;
  std::vector<JumpOperator> jumps;
  jumps.push_back({vec2(std::sqrt(gl), 0.0), vec2(0.0, 0.0), 0.0});
  jumps.push_back({vec2(0.0, 0.0), vec2(0.0, std::sqrt(gg)), 0.0});
  return thirdq::make_model(h, {}, {}, jumps);
}

inline LindbladModel damped(double gamma) { return thermal(gamma, 0.0); }

// Random single-mode model, dissipation-dominated so that low-lying oracle
// eigenvalues converge at moderate cutoff.
inline LindbladModel random_stable_single_mode(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplexMatrix h(1, 1), d(1, 1);
  h << u(rng);
  d << Complex(0.15 * u(rng), 0.15 * u(rng)) / std::sqrt(2.0);
  ComplexVector alpha = vec1(Complex(0.3 * u(rng), 0.3 * u(rng)) / std::sqrt(2.0));
  const double gl = 0.8 + 0.7 * unit(rng);
  const double gg = 0.2 * gl * unit(rng);
  std::vector<JumpOperator> jumps;
  jumps.push_back({vec1(std::sqrt(gl)), vec1(0.0), Complex(0.2 * u(rng), 0.2 * u(rng))});
  jumps.push_back({vec1(0.0), vec1(std::sqrt(gg)), Complex(0.2 * u(rng), 0.2 * u(rng))});
  const Complex ph = std::polar(1.0, 3.14159 * u(rng));
  jumps.push_back({vec1(0.3 * std::sqrt(gl) * ph), vec1(0.3 * std::sqrt(gg)), Complex(0.2 * u(rng), 0.0)});
  return thirdq::make_model(h, d, alpha, jumps);
}

}  // namespace fixtures
