#include "thirdq/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thirdq/error.hpp"
#include "thirdq/third_quantization.hpp"

namespace thirdq {

namespace {

constexpr double kMinOverlap = 0.7;
constexpr int kMaxRefinements = 10;

std::string fmt(Complex s) {
  std::ostringstream os;
  os << "s = (" << s.real() << ", " << s.imag() << ")";
  return os.str();
}

struct Decomposition {
  ComplexVector values;
  ComplexMatrix vectors;  // unit columns
};

Decomposition decompose(const LiouvillianBlocks& b) {
  const ComplexMatrix M = -b.J * b.L;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(M);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NonDiagonalizableOnPath, "eigensolver failed on the tilted Liouvillian");
  }
  Decomposition d{es.eigenvalues(), es.eigenvectors()};
  d.vectors.colwise().normalize();
  return d;
}

// Groups indices by single linkage at the given tolerance.
std::vector<std::vector<int>> cluster(const ComplexVector& v, double tol) {
  const int n = static_cast<int>(v.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v(i) - v(j)) <= tol) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

struct StepResult {
  bool ok = false;
  bool rank_deficient = false;
  double overlap = 0.0;
  std::vector<Complex> values;
  ComplexMatrix vectors;
};

// Matches the previous branches to the spectrum at the new point by subspace
// overlap; degenerate clusters are handled as a whole.
StepResult match(const Decomposition& d, const std::vector<Complex>& prev_values,
                 const ComplexMatrix& prev_vectors, double tol) {
  StepResult r;
  const auto groups = cluster(d.values, tol);
  const int nb = static_cast<int>(prev_values.size());
  std::vector<ComplexMatrix> bases;
  for (const auto& g : groups) {
    ComplexMatrix V(d.vectors.rows(), static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) V.col(k) = d.vectors.col(g[k]);
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(V);
    qr.setThreshold(1e-8);
    if (qr.rank() < V.cols()) {
      r.rank_deficient = true;
      return r;
    }
    bases.push_back(ComplexMatrix(qr.householderQ()).leftCols(V.cols()));
  }

  struct Cand {
    double overlap;
    int branch, group;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < nb; ++i)
    for (std::size_t g = 0; g < groups.size(); ++g)
      cands.push_back({(bases[g].adjoint() * prev_vectors.col(i)).norm(), i, static_cast<int>(g)});
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.overlap > b.overlap; });

  std::vector<int> assigned(nb, -1);
  std::vector<int> used(groups.size(), 0);
  double worst = 1.0;
  for (const auto& c : cands) {
    if (assigned[c.branch] >= 0 || used[c.group] >= static_cast<int>(groups[c.group].size())) continue;
    assigned[c.branch] = c.group;
    ++used[c.group];
    worst = std::min(worst, c.overlap);
  }
  r.overlap = worst;
  if (worst < kMinOverlap) return r;

  r.values.resize(nb);
  r.vectors.resize(prev_vectors.rows(), nb);
  std::vector<std::vector<bool>> taken(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) taken[g].assign(groups[g].size(), false);
  for (int i = 0; i < nb; ++i) {
    const int g = assigned[i];
    int best = -1;
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      if (taken[g][k]) continue;
      if (best < 0 || std::abs(d.values(groups[g][k]) - prev_values[i]) <
                          std::abs(d.values(groups[g][best]) - prev_values[i]))
        best = static_cast<int>(k);
    }
    taken[g][best] = true;
    r.values[i] = d.values(groups[g][best]);
    const ComplexVector p = bases[g] * (bases[g].adjoint() * prev_vectors.col(i));
    r.vectors.col(i) = p / p.norm();
  }
  r.ok = true;
  return r;
}

Complex drive_offset(const LiouvillianBlocks& t, const QuadraticObservable& obs, Complex s) {
  if (s == Complex(0.0, 0.0)) return {0.0, 0.0};
  const int n = 2 * t.m;
  ComplexVector ell(2 * n);
  ell << t.eta_c, t.eta;
  Complex out = s * obs.constant;
  if (max_abs(ell) == 0.0) return out;
  if (inverse_condition(t.L) < 1e-14) {
    throw Error(ErrorCode::SingularInput, "tilted L is singular; drive displacement undefined", fmt(s));
  }
  const ComplexVector x = t.L.partialPivLu().solve(ell);
  return out - 0.5 * (ell.transpose() * x)(0);
}

}  // namespace

QuadraticObservable photon_current_observable(const LiouvillianBlocks& blocks, int mode, double gamma) {
  const int m = blocks.m;
  if (mode < 0 || mode >= m) {
    throw Error(ErrorCode::IndexOutOfRange, "counted mode out of range", "mode " + std::to_string(mode));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidInput, "counting rate must be finite and non-negative");
  }
  QuadraticObservable o;
  o.quad = ComplexMatrix::Zero(4 * m, 4 * m);
  o.lin = ComplexVector::Zero(4 * m);
  const int c = mode, cd = m + mode, qd = 2 * m + mode, q = 3 * m + mode;
  // gamma (a_c + a_q/2)(a_c^dag - a_q^dag/2) with b_q = -a_q.
  auto set = [&](int i, int j, double v) { o.quad(i, j) = o.quad(j, i) = v; };
  set(c, cd, gamma);
  set(c, qd, -gamma / 2.0);
  set(cd, q, -gamma / 2.0);
  set(qd, q, gamma / 4.0);
  o.constant = 0.0;
  return o;
}

LiouvillianBlocks tilt(const LiouvillianBlocks& blocks, const QuadraticObservable& obs, Complex s) {
  const Eigen::Index n4 = blocks.L.rows();
  if (obs.quad.rows() != n4 || obs.quad.cols() != n4 || obs.lin.size() != n4) {
    throw Error(ErrorCode::DimensionMismatch, "observable does not match the Liouvillian dimension");
  }
  LiouvillianBlocks t = blocks;
  if (s == Complex(0.0, 0.0)) return t;
  const Eigen::Index n = n4 / 2;
  t.L += s * obs.quad;
  if (t.eta_c.size() != n) t.eta_c = ComplexVector::Zero(n);
  t.eta_c += s * obs.lin.head(n);
  t.eta += s * obs.lin.tail(n);
  t.L0 += s * obs.constant;
  return t;
}

TiltedBranchSet track_branches(const LiouvillianBlocks& blocks, const QuadraticObservable& obs,
                               Complex sMax, int steps) {
  if (steps < 8) throw Error(ErrorCode::InvalidInput, "branch tracking needs at least 8 steps");
  tilt(blocks, obs, 0.0);  // dimension check

  const ThirdQuantizedForm form = third_quantize(blocks);
  const int nb = static_cast<int>(form.lambdas.size());
  const double scale = std::max(1.0, inf_norm(blocks.L));
  const double ctol = 1e-6 * scale;

  // Select the gauge-fixed half of the s = 0 spectrum.
  const Decomposition d0 = decompose(blocks);
  std::vector<bool> used(d0.values.size(), false);
  std::vector<Complex> values(nb);
  ComplexMatrix vectors(d0.vectors.rows(), nb);
  const Eigen::Index half = d0.vectors.rows() / 2;
  for (int i = 0; i < nb; ++i) {
    int best = -1;
    double best_d = 0.0, best_q = 0.0;
    for (Eigen::Index j = 0; j < d0.values.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(d0.values(j) - form.lambdas(i));
      const double qn = d0.vectors.col(j).tail(half).norm();
      if (best < 0 || dist < best_d - ctol || (dist <= best_d + ctol && qn > best_q)) {
        best = static_cast<int>(j);
        best_d = dist;
        best_q = qn;
      }
    }
    if (best_d > 1e-6 * scale) {
      throw Error(ErrorCode::GaugeFixFailure, "untilted spectrum does not contain the gauge-fixed eigenvalues");
    }
    used[best] = true;
    values[i] = d0.values(best);  // same solver as later grid points
    vectors.col(i) = d0.vectors.col(best);
  }

  TiltedBranchSet set;
  set.branches.assign(nb, {});
  auto record = [&](Complex s, const std::vector<Complex>& vals, const LiouvillianBlocks& t) {
    set.sGrid.push_back(s);
    for (int i = 0; i < nb; ++i) set.branches[i].push_back(vals[i]);
    set.offset.push_back(drive_offset(t, obs, s));
  };
  record(0.0, values, blocks);
  if (sMax == Complex(0.0, 0.0)) return set;

  const Complex h = sMax / static_cast<double>(steps);
  Complex s = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const Complex target = h * static_cast<double>(k);
    Complex dt = h;
    int refinements = 0;
    LiouvillianBlocks t = blocks;
    while (std::abs(target - s) > 1e-14 * std::abs(h)) {
      if (std::abs(dt) > std::abs(target - s)) dt = target - s;
      const Complex next = s + dt;
      t = tilt(blocks, obs, next);
      const StepResult r = match(decompose(t), values, vectors, ctol);
      if (!r.ok) {
        if (++refinements > kMaxRefinements) {
          if (r.rank_deficient) {
            throw Error(ErrorCode::NonDiagonalizableOnPath, "tilted Liouvillian is defective on the path",
                        fmt(next));
          }
          throw Error(ErrorCode::BranchCollision, "branches cannot be resolved along the path", fmt(next));
        }
        dt *= 0.5;
        continue;
      }
      set.overlapLog = std::min(set.overlapLog, r.overlap);
      values = r.values;
      vectors = r.vectors;
      s = next;
    }
    s = target;
    record(target, values, t);
  }
  return set;
}

TiltedBranchSet track_branches_symmetric(const LiouvillianBlocks& blocks, const QuadraticObservable& obs,
                                         Complex sMax, int steps) {
  TiltedBranchSet up = track_branches(blocks, obs, sMax, steps);
  if (sMax == Complex(0.0, 0.0)) return up;
  TiltedBranchSet down = track_branches(blocks, obs, -sMax, steps);
  TiltedBranchSet out;
  out.overlapLog = std::min(up.overlapLog, down.overlapLog);
  out.branches.assign(up.branches.size(), {});
  const std::size_t nd = down.sGrid.size();
  for (std::size_t k = nd; k-- > 1;) {
    out.sGrid.push_back(down.sGrid[k]);
    out.offset.push_back(down.offset[k]);
    for (std::size_t i = 0; i < out.branches.size(); ++i) out.branches[i].push_back(down.branches[i][k]);
  }
  out.origin = out.sGrid.size();
  for (std::size_t k = 0; k < up.sGrid.size(); ++k) {
    out.sGrid.push_back(up.sGrid[k]);
    out.offset.push_back(up.offset[k]);
    for (std::size_t i = 0; i < out.branches.size(); ++i) out.branches[i].push_back(up.branches[i][k]);
  }
  return out;
}

namespace {

Complex sample(const TiltedBranchSet& set, std::size_t k) {
  Complex g = set.offset[k];
  Complex sum = 0.0;
  for (const auto& br : set.branches) sum += br[k] - br[set.origin];
  return 0.5 * sum + g;
}

}  // namespace

Complex generating_function(const TiltedBranchSet& set, Complex s) {
  for (std::size_t k = 0; k < set.sGrid.size(); ++k) {
    if (std::abs(set.sGrid[k] - s) <= 1e-12 * std::max(1.0, std::abs(s))) return sample(set, k);
  }
  throw Error(ErrorCode::OffGrid, "s is not a grid point of the tracked branch set", fmt(s));
}

std::vector<Complex> generating_function_samples(const TiltedBranchSet& set) {
  std::vector<Complex> out;
  for (std::size_t k = 0; k < set.sGrid.size(); ++k) out.push_back(sample(set, k));
  return out;
}

std::vector<Complex> factorial_cumulants(const TiltedBranchSet& set, int order) {
  if (order < 1 || order > 4) throw Error(ErrorCode::InvalidInput, "cumulant order must be 1..4");
  const int need = order <= 2 ? 2 : 4;  // points per side for the Richardson stencil
  const long o = static_cast<long>(set.origin);
  const long last = static_cast<long>(set.sGrid.size()) - 1;
  if (o < need || last - o < need) {
    throw Error(ErrorCode::InsufficientGrid, "grid too small around s = 0 for the requested order",
                "need " + std::to_string(need) + " points on each side");
  }
  const Complex h = set.sGrid[o + 1] - set.sGrid[o];
  for (long j = 1; j <= need; ++j) {
    const double tol = 1e-9 * std::abs(h);
    if (std::abs(set.sGrid[o + j] - static_cast<double>(j) * h) > tol ||
        std::abs(set.sGrid[o - j] + static_cast<double>(j) * h) > tol) {
      throw Error(ErrorCode::InsufficientGrid, "grid is not uniform and symmetric around s = 0");
    }
  }
  auto f = [&](long j) { return sample(set, static_cast<std::size_t>(o + j)); };
  auto diff = [&](int k, long st) -> Complex {
    const Complex hh = h * static_cast<double>(st);
    switch (k) {
      case 1: return (f(st) - f(-st)) / (2.0 * hh);
      case 2: return (f(st) - 2.0 * f(0) + f(-st)) / (hh * hh);
      case 3: return (f(2 * st) - 2.0 * f(st) + 2.0 * f(-st) - f(-2 * st)) / (2.0 * hh * hh * hh);
      default:
        return (f(2 * st) - 4.0 * f(st) + 6.0 * f(0) - 4.0 * f(-st) + f(-2 * st)) / (hh * hh * hh * hh);
    }
  };
  std::vector<Complex> out;
  for (int k = 1; k <= order; ++k) out.push_back((4.0 * diff(k, 1) - diff(k, 2)) / 3.0);
  return out;
}

std::vector<Complex> factorial_to_ordinary(const std::vector<Complex>& F) {
  // Stirling numbers of the second kind.
  static const double S[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 3, 1, 0}, {1, 7, 6, 1}};
  if (F.size() > 4) throw Error(ErrorCode::InvalidInput, "cumulant order must be 1..4");
  std::vector<Complex> out;
  for (std::size_t n = 0; n < F.size(); ++n) {
    Complex c = 0.0;
    for (std::size_t k = 0; k <= n; ++k) c += S[n][k] * F[k];
    out.push_back(c);
  }
  return out;
}

std::vector<Complex> ordinary_cumulants(const TiltedBranchSet& set, int order) {
  return factorial_to_ordinary(factorial_cumulants(set, order));
}

}  // namespace thirdq
