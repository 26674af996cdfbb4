#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/parallel.hpp"
#include "polyschwarz/rng.hpp"
#include "polyschwarz/schwarzian.hpp"

namespace polyschwarz {

/// Length of a tangent vector in the Bergman metric of the unit polydisk,
/// ds^2 = sum_k 2 |dz_k|^2 / (1 - |z_k|^2)^2.
inline double bergman_norm(const Point& z, const std::vector<cxd>& v) {
  if (z.size() != v.size()) throw precondition_error("bergman_norm: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double room = 1.0 - std::norm(z[k]);
    if (room < 1e-12)
      throw precondition_error("bergman_norm: point is not interior to the polydisk");
    acc += 2.0 * std::norm(v[k]) / (room * room);
  }
  return std::sqrt(acc);
}

struct OperatorNormResult {
  double value = 0.0;
  std::vector<cxd> argmax;  // Bergman-unit vector realizing the supremum
  bool converged = false;
  int starts = 0;
  int iterations = 0;  // ascent iterations summed over starts
};

namespace bergman_detail {

/// The substituted objective: with v = D w, D = diag((1-|z_k|^2)/sqrt(2)),
/// the Bergman norm of v is the euclidean norm of w and
///   |S(v,v)|_z^2 = sum_k c_k |w^T B_k w|^2,  B_k = D S[k] D,
/// so the operator norm is the max of sqrt(h) over the euclidean sphere.
struct SphereObjective {
  std::vector<CMat> b;
  std::vector<double> c;
  int n = 0;

  explicit SphereObjective(const SchwarzianTensor& t) : n(t.n) {
    std::vector<double> d(n);
    c.resize(n);
    for (int k = 0; k < n; ++k) {
      const double room = 1.0 - std::norm(t.point[k]);
      if (room < 1e-12)
        throw precondition_error("operator_norm: point is not interior to the polydisk");
      d[k] = room / std::sqrt(2.0);
      c[k] = 2.0 / (room * room);
    }
    b.assign(n, CMat(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[k](i, j) = d[i] * t.S[k](i, j) * d[j];
  }

  double value(const std::vector<cxd>& w) const {
    double h = 0.0;
    for (int k = 0; k < n; ++k) {
      cxd q = 0.0;
      for (int i = 0; i < n; ++i) {
        cxd row = 0.0;
        for (int j = 0; j < n; ++j) row += b[k](i, j) * w[j];
        q += w[i] * row;
      }
      h += c[k] * std::norm(q);
    }
    return h;
  }

  /// Steepest-ascent direction of h as a complex vector: conj(dh/dw) with
  /// dh/dw_j = sum_k 2 c_k conj(q_k) (B_k w)_j.
  std::vector<cxd> gradient(const std::vector<cxd>& w) const {
    std::vector<cxd> g(n);
    for (int k = 0; k < n; ++k) {
      std::vector<cxd> bw(n);
      cxd q = 0.0;
      for (int i = 0; i < n; ++i) {
        cxd row = 0.0;
        for (int j = 0; j < n; ++j) row += b[k](i, j) * w[j];
        bw[i] = row;
        q += w[i] * row;
      }
      for (int i = 0; i < n; ++i) g[i] += 2.0 * c[k] * q * std::conj(bw[i]);
    }
    return g;
  }
};

inline void normalize(std::vector<cxd>& w) {
  double norm2 = 0.0;
  for (const auto& c : w) norm2 += std::norm(c);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : w) c *= inv;
}

/// Projected gradient ascent on the unit sphere with backtracking line
/// search. Returns the best objective value; `iterations` accumulates.
inline double ascend(const SphereObjective& obj, std::vector<cxd> w, double tol, int max_iters,
                     std::vector<cxd>& w_out, int& iterations, bool& converged) {
  normalize(w);
  double h = obj.value(w);
  double step = 0.5;
  for (int it = 0; it < max_iters; ++it) {
    ++iterations;
    std::vector<cxd> g = obj.gradient(w);
    double radial = 0.0;  // real part of <w, g>: the normal component
    for (int i = 0; i < obj.n; ++i)
      radial += w[i].real() * g[i].real() + w[i].imag() * g[i].imag();
    double tail = 0.0;
    for (int i = 0; i < obj.n; ++i) {
      g[i] -= radial * w[i];
      tail += std::norm(g[i]);
    }
    if (tail <= 1e-28 * std::max(1.0, h * h)) {
      converged = true;
      break;
    }
    bool moved = false;
    double trial_step = step * 2.0;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<cxd> wt(w);
      for (int i = 0; i < obj.n; ++i) wt[i] += trial_step * g[i];
      normalize(wt);
      const double ht = obj.value(wt);
      if (ht > h) {
        const double gain = ht - h;
        w = std::move(wt);
        h = ht;
        step = trial_step;
        moved = true;
        if (gain <= tol * std::max(1e-300, h)) converged = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!moved) {
      converged = true;  // no ascent direction improves: local max to line-search resolution
      break;
    }
    if (converged) break;
  }
  w_out = std::move(w);
  return h;
}

inline std::vector<std::vector<cxd>> deterministic_starts(int n) {
  std::vector<std::vector<cxd>> starts;
  for (int i = 0; i < n && static_cast<int>(starts.size()) < 8; ++i) {
    std::vector<cxd> e(n);
    e[i] = 1.0;
    starts.push_back(std::move(e));
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  int pattern = 1;
  while (static_cast<int>(starts.size()) < 8) {
    std::vector<cxd> w(n);
    for (int i = 0; i < n; ++i) {
      const double phi = 0.78539816339744831 * pattern * (i + 1);  // pi/4 spacing
      w[i] = cxd{std::cos(phi) * inv, std::sin(phi) * inv};
    }
    starts.push_back(std::move(w));
    ++pattern;
  }
  return starts;
}

}  // namespace bergman_detail

/// Operator norm of the Schwarzian tensor at its base point: the supremum of
/// |S(v,v)|_z over Bergman-unit v, via multistart projected ascent on the
/// equivalent euclidean sphere problem. `budget` adds seeded random starts on
/// top of the 8 deterministic ones.
inline OperatorNormResult operator_norm(const SchwarzianTensor& t, int budget = 8,
                                        double tol = 1e-12,
                                        std::uint64_t seed = kDefaultSeed) {
  const bergman_detail::SphereObjective obj(t);
  std::vector<std::vector<cxd>> starts = bergman_detail::deterministic_starts(t.n);
  Rng rng(seed);
  for (int extra = 0; extra < budget; ++extra) starts.push_back(rng.unit_vector(t.n));

  OperatorNormResult result;
  result.starts = static_cast<int>(starts.size());
  double best_h = -1.0;
  std::vector<cxd> best_w;
  for (const auto& start : starts) {
    std::vector<cxd> w_out;
    bool conv = false;
    const double h =
        bergman_detail::ascend(obj, start, tol, 2000, w_out, result.iterations, conv);
    if (h > best_h) {
      best_h = h;
      best_w = std::move(w_out);
      result.converged = conv;
    }
  }

  result.value = std::sqrt(std::max(0.0, best_h));
  // Report the witness in original coordinates, canonical phase: the largest
  // component is made real positive.
  int anchor = 0;
  double mag = 0.0;
  for (int i = 0; i < t.n; ++i)
    if (std::abs(best_w[i]) > mag) {
      mag = std::abs(best_w[i]);
      anchor = i;
    }
  if (mag > 0.0) {
    const cxd phase = std::abs(best_w[anchor]) / best_w[anchor];
    for (auto& c : best_w) c *= phase;
  }
  result.argmax.resize(t.n);
  for (int i = 0; i < t.n; ++i) {
    const double room = 1.0 - std::norm(t.point[i]);
    result.argmax[i] = best_w[i] * room / std::sqrt(2.0);
  }
  return result;
}

inline OperatorNormResult operator_norm(const MapExpr& f, const Point& z, int budget = 8,
                                        double tol = 1e-12,
                                        std::uint64_t seed = kDefaultSeed) {
  return operator_norm(schwarzian_tensor(f, z), budget, tol, seed);
}

struct SupNormGrid {
  int radii = 12;
  int phases = 16;
};

/// Grid sizes tuned so the product grid stays tractable as n grows.
inline SupNormGrid default_sup_grid(int n) {
  if (n <= 2) return {12, 16};
  if (n == 3) return {6, 8};
  return {4, 6};
}

struct SupNormResult {
  double value = 0.0;
  Point witness;
  OperatorNormResult at_witness;
  SupNormGrid grid;
  int refine = 0;
  long points_evaluated = 0;
  long points_skipped = 0;             // singular tensor or evaluation failure
  bool lower_bound_only = true;        // sampling certifies only a lower bound
};

namespace bergman_detail {

struct GridBest {
  double value = -1.0;
  Point witness;

  // Ties resolve to the lexicographically smallest witness so results do not
  // depend on enumeration or thread layout.
  void consider(double v, const Point& z) {
    if (v < value) return;
    if (v == value && !lex_less(z, witness)) return;
    value = v;
    witness = z;
  }

  static bool lex_less(const Point& a, const Point& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
      if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
  }
};

}  // namespace bergman_detail

/// Lower bound for sup over the closed polydisk of radius `radius` of the
/// tensor operator norm, by exhaustive product-grid search plus local grid
/// refinement around the best cell. Radii cluster toward the outer radius
/// (sine spacing), where the Bergman weights make the norm largest.
inline SupNormResult sup_norm(const MapExpr& f, double radius,
                              SupNormGrid grid = SupNormGrid{}, int refine = 2, int budget = 0,
                              double tol = 1e-10, std::uint64_t seed = kDefaultSeed,
                              int threads = 0) {
  if (!(radius > 0.0) || radius >= 1.0)
    throw precondition_error("sup_norm: radius must lie in (0, 1)");
  const int n = f.dim();
  const double two_pi = 6.28318530717958647692;

  std::vector<double> radii(grid.radii);
  for (int k = 0; k < grid.radii; ++k)
    radii[k] = radius * std::sin(0.5 * 3.14159265358979324 * (k + 1) / grid.radii);
  std::vector<double> phases(grid.phases);
  for (int m = 0; m < grid.phases; ++m) phases[m] = two_pi * m / grid.phases;

  SupNormResult result;
  result.grid = grid;
  result.refine = refine;

  const long axis = static_cast<long>(grid.radii) * grid.phases;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= axis;

  std::vector<double> values(static_cast<std::size_t>(total), -1.0);
  std::vector<signed char> skipped(static_cast<std::size_t>(total), 0);
  auto point_at = [&](long index) {
    Point z(n);
    for (int i = 0; i < n; ++i) {
      const long slot = index % axis;
      index /= axis;
      const double r = radii[slot / grid.phases];
      const double th = phases[slot % grid.phases];
      z[i] = cxd{r * std::cos(th), r * std::sin(th)};
    }
    return z;
  };

  parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t idx) {
    try {
      const SchwarzianTensor t = schwarzian_tensor(f, point_at(static_cast<long>(idx)));
      values[idx] = operator_norm(t, budget, tol, seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1))).value;
    } catch (const singular_error&) {
      skipped[idx] = 1;
    } catch (const precondition_error&) {
      skipped[idx] = 1;
    }
  });

  bergman_detail::GridBest best;
  for (long idx = 0; idx < total; ++idx) {
    if (skipped[idx]) {
      ++result.points_skipped;
      continue;
    }
    ++result.points_evaluated;
    best.consider(values[idx], point_at(idx));
  }
  if (best.value < 0.0)
    throw singular_error("sup_norm: every grid point failed to evaluate", 0.0);

  // Local refinement: shrink a 5-point stencil per axis coordinate around the
  // current witness, halving the spacing each round.
  double dr = radius * 0.5 * 3.14159265358979324 / grid.radii;
  double dth = two_pi / grid.phases;
  for (int round = 0; round < refine; ++round) {
    dr *= 0.5;
    dth *= 0.5;
    std::vector<std::vector<cxd>> axis_values(n);
    for (int i = 0; i < n; ++i) {
      const double r0 = std::abs(best.witness[i]);
      const double th0 = std::arg(best.witness[i]);
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          const double r = std::clamp(r0 + 0.5 * a * dr, 0.0, radius);
          const double th = th0 + 0.5 * b * dth;
          axis_values[i].push_back(cxd{r * std::cos(th), r * std::sin(th)});
        }
    }
    long rtotal = 1;
    for (int i = 0; i < n; ++i) rtotal *= static_cast<long>(axis_values[i].size());
    std::vector<double> rvalues(static_cast<std::size_t>(rtotal), -1.0);
    auto rpoint = [&](long index) {
      Point z(n);
      for (int i = 0; i < n; ++i) {
        z[i] = axis_values[i][index % axis_values[i].size()];
        index /= static_cast<long>(axis_values[i].size());
      }
      return z;
    };
    parallel_for(static_cast<std::size_t>(rtotal), threads, [&](std::size_t idx) {
      try {
        const SchwarzianTensor t = schwarzian_tensor(f, rpoint(static_cast<long>(idx)));
        rvalues[idx] =
            operator_norm(t, budget, tol, seed ^ (0xda942042e4dd58b5ULL * (idx + 1))).value;
      } catch (const singular_error&) {
      } catch (const precondition_error&) {
      }
    });
    for (long idx = 0; idx < rtotal; ++idx) {
      if (rvalues[idx] < 0.0) {
        ++result.points_skipped;
        continue;
      }
      ++result.points_evaluated;
      best.consider(rvalues[idx], rpoint(idx));
    }
  }

  result.witness = best.witness;
  result.at_witness = operator_norm(schwarzian_tensor(f, best.witness), std::max(budget, 8), tol,
                                    seed ^ 0xc2b2ae3d27d4eb4fULL);
  result.value = std::max(best.value, result.at_witness.value);
  return result;
}

}  // namespace polyschwarz
