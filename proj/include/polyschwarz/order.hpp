#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "polyschwarz/bergman.hpp"
#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/maps.hpp"
#include "polyschwarz/rng.hpp"

namespace polyschwarz {

/// Lower-bound search result for the family order at a restricted radius.
/// lambda_lower is the best |grad J_f(0)| found over the search family; it is
/// a lower bound for the true supremum, never an estimate of it.
struct OrderReport {
  int n = 0;
  double alpha = 0;
  double r = 0;
  double lambda_lower = 0;
  std::optional<MapExpr> witness;
  /// (1 - r^2) / (1 - 5 r^2); NaN when r^2 >= 1/5.
  double C_r = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> growth_bound_at;
  bool lower_bound_only = true;
  int evaluations = 0;
};

struct MoebiusOrderResult {
  /// Closed-form maximum n + 1.
  double value = 0;
  /// Value reached by the simplex ascent (should agree to 1e-6).
  double search_value = 0;
  /// Extremal moduli configuration on the simplex sum |a_i| <= 1.
  std::vector<double> argmax;
};

namespace order_detail {

/// Euclidean projection onto {x >= 0, sum x <= 1}.
inline void simplex_project(std::vector<double>& x) {
  double sum = 0;
  for (double& v : x) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (sum <= 1.0) return;
  std::vector<double> s = x;
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0, theta = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    const double cand = (cum - 1.0) / static_cast<double>(k + 1);
    if (cand < s[k]) theta = cand;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

/// z_k -> z_k everywhere except z_1 -> z_1 - sigma z_1^2 / 2.
inline MapExpr make_squares(int n, double sigma) {
  std::vector<PolyTerm> terms;
  for (int k = 0; k < n; ++k) {
    std::vector<int> lin(n, 0);
    lin[k] = 1;
    terms.push_back({k, lin, cxd{1.0, 0.0}});
  }
  std::vector<int> sq(n, 0);
  sq[0] = 2;
  terms.push_back({0, sq, cxd{-0.5 * sigma, 0.0}});
  return MapExpr::polynomial(n, terms);
}

}  // namespace order_detail

/// Order of the normalized Moebius subfamily: maximizes (n+1) |a|_2 over the
/// moduli simplex sum |a_i| <= 1 (phases do not move the objective). The
/// maximum n + 1 sits at a simplex vertex; the projected ascent is kept as a
/// cross-check of the closed form.
inline MoebiusOrderResult moebius_order(int n) {
  if (n < 2) throw precondition_error("moebius_order requires dimension >= 2");
  MoebiusOrderResult out;
  out.value = n + 1.0;

  double best = 0;
  std::vector<double> best_a;
  for (int start = 0; start <= n; ++start) {
    std::vector<double> a(n, 0.1 / n);
    if (start < n)
      a[start] = 0.6;
    else
      a.assign(n, 0.9 / n);
    order_detail::simplex_project(a);
    for (int iter = 0; iter < 400; ++iter) {
      double norm = 0;
      for (double v : a) norm += v * v;
      norm = std::sqrt(std::max(norm, 1e-300));
      for (double& v : a) v += 0.05 * (n + 1.0) * v / norm;
      order_detail::simplex_project(a);
    }
    double norm = 0;
    for (double v : a) norm += v * v;
    const double val = (n + 1.0) * std::sqrt(norm);
    if (val > best) {
      best = val;
      best_a = a;
    }
  }
  out.search_value = best;
  out.argmax = best_a;
  return out;
}

/// grad(det Df)(0) for a normalized map (f(0) = 0, Df(0) = I within 1e-10).
inline std::vector<cxd> grad_jacobian_at_zero(const MapExpr& f) {
  const int n = f.dim();
  const MapJet mj = map_jet(f, origin(n));
  double dev = 0.0;
  for (int i = 0; i < n; ++i) {
    dev = std::max(dev, std::abs(mj.jets[i].value));
    for (int l = 0; l < n; ++l)
      dev = std::max(dev, std::abs(mj.jacobian(i, l) - (i == l ? cxd{1.0} : cxd{})));
  }
  if (dev > 1e-10)
    throw precondition_error("grad_jacobian_at_zero: map must satisfy f(0) = 0 and Df(0) = I");
  const Jet3 det = jacobian_det_jet(mj);
  std::vector<cxd> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) g[j] = det.grad(j);
  return g;
}

/// Dilation g(z) = f(sz)/s shrinks the measured tensor sup on radius r by at
/// least s ((1 - s^2 r^2)/(1 - r^2))^2, which is < 1 whenever r^2 < 1/5, and
/// scales grad J(0) by exactly s.
struct DilationReport {
  double r = 0, s = 0;
  double factor = 0;
  double norm_f = 0, norm_g = 0;
  double ratio = 0;
  double grad_f = 0, grad_g = 0;
  bool contraction_ok = false;
  bool grad_ok = false;
  bool ok = false;
};

inline DilationReport dilation_contraction_check(const MapExpr& f, double r, double s,
                                                 SupNormGrid grid = SupNormGrid{},
                                                 std::uint64_t seed = kDefaultSeed) {
  if (!(r > 0) || r * r >= 0.2)
    throw precondition_error("dilation_contraction_check requires r^2 < 1/5");
  if (!(s > 0) || s > 1.0) throw precondition_error("dilation factor must lie in (0, 1]");
  DilationReport rep;
  rep.r = r;
  rep.s = s;
  rep.factor = s * std::pow((1.0 - s * s * r * r) / (1.0 - r * r), 2.0);
  const MapExpr g = MapExpr::dilation(s, f);
  rep.norm_f = sup_norm(f, r, grid, 2, 0, 1e-10, seed).value;
  rep.norm_g = sup_norm(g, r, grid, 2, 0, 1e-10, seed).value;
  rep.ratio = rep.norm_g / std::max(rep.norm_f, 1e-300);
  rep.contraction_ok = rep.norm_g <= rep.factor * rep.norm_f + 1e-7;

  const Jet3 df = jacobian_det_jet(map_jet(f, origin(f.dim())));
  const Jet3 dg = jacobian_det_jet(map_jet(g, origin(f.dim())));
  double nf = 0, ng = 0;
  for (int j = 0; j < f.dim(); ++j) {
    nf += std::norm(df.grad(j));
    ng += std::norm(dg.grad(j));
  }
  rep.grad_f = std::sqrt(nf);
  rep.grad_g = std::sqrt(ng);
  rep.grad_ok = std::abs(rep.grad_g - s * rep.grad_f) <= 1e-10 * std::max(1.0, rep.grad_f);
  rep.ok = rep.contraction_ok && rep.grad_ok;
  return rep;
}

/// Order growth transfer: lambda_alpha <= mu1 / alpha1^{C(r)} * alpha^{C(r)}
/// with C(r) = (1 - r^2)/(1 - 5 r^2).
inline double growth_bound(double alpha, double alpha1, double mu1, double r) {
  if (!(alpha1 > 0) || alpha < alpha1) throw precondition_error("growth_bound needs alpha >= alpha1 > 0");
  if (!(mu1 > 0)) throw precondition_error("growth_bound needs mu1 > 0");
  if (!(r > 0) || r * r >= 0.2) throw precondition_error("growth_bound requires r^2 < 1/5");
  const double C = (1.0 - r * r) / (1.0 - 5.0 * r * r);
  return mu1 / std::pow(alpha1, C) * std::pow(alpha, C);
}

/// Search lower bound for the restricted-radius order. The family is
///   h = moebius(a e_1) o g_sigma,   g_sigma(z) = z with z_1 - sigma z_1^2 / 2,
/// whose tensor equals the tensor of g_sigma (the Moebius factor contributes
/// nothing), so the constraint sup-norm(h) <= alpha is enforced on g_sigma by
/// bisection on sigma. The pole moves to r (1 - sigma r / 2), which lets
/// |a| grow past 1/r while grad J(0) = (n+1) a - sigma e_1 stays aligned:
///   value(sigma) = (n+1) / (r (1 - sigma r / 2)) - sigma,
/// increasing in sigma for n >= 2. sigma = 0 recovers the Moebius closed form
/// (n+1)/r. budget counts sup-norm probes; 0 skips the search entirely.
inline OrderReport mu_r_lower(int n, double alpha, double r, int budget = 16,
                              std::uint64_t seed = kDefaultSeed,
                              SupNormGrid grid = SupNormGrid{6, 8}) {
  if (n < 2) throw precondition_error("mu_r_lower requires dimension >= 2");
  if (!(r > 0 && r < 1)) throw precondition_error("mu_r_lower requires r in (0, 1)");
  if (!(alpha >= 0)) throw precondition_error("mu_r_lower requires alpha >= 0");
  OrderReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.r = r;
  if (r * r < 0.2) rep.C_r = (1.0 - r * r) / (1.0 - 5.0 * r * r);

  auto candidate = [&](double sigma) {
    const MapExpr g = order_detail::make_squares(n, sigma);
    CMat m(n + 1, n + 1);
    m(0, 0) = 1.0;
    m(0, 1) = -1.0 / (r * (1.0 - 0.5 * sigma * r));
    for (int i = 1; i <= n; ++i) m(i, i) = 1.0;
    const MapExpr h = MapExpr::compose(MapExpr::moebius(n, m), g);
    return std::make_pair((n + 1.0) / (r * (1.0 - 0.5 * sigma * r)) - sigma, h);
  };

  auto [base_value, base_witness] = candidate(0.0);
  rep.lambda_lower = base_value;
  rep.witness = base_witness;

  if (budget > 0 && alpha > 0) {
    auto feasible = [&](double sigma) {
      ++rep.evaluations;
      const MapExpr g = order_detail::make_squares(n, sigma);
      return sup_norm(g, r, grid, 1, 0, 1e-10, seed).value <= alpha;
    };
    double lo = 0.0, hi = 0.45 / r;
    int probes = budget;
    if (feasible(hi)) {
      lo = hi;
      --probes;
    } else {
      --probes;
      while (probes-- > 0 && hi - lo > 1e-6 / r) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
          lo = mid;
        else
          hi = mid;
      }
    }
    if (lo > 0) {
      auto [val, wit] = candidate(lo);
      if (val > rep.lambda_lower) {
        rep.lambda_lower = val;
        rep.witness = wit;
      }
    }
  }

  if (alpha > 0 && r * r < 0.2) {
    for (double mult : {1.0, 2.0, 4.0})
      rep.growth_bound_at.emplace_back(mult * alpha,
                                       growth_bound(mult * alpha, alpha, rep.lambda_lower, r));
  }
  return rep;
}

/// Truncated-domain covering proxy: the smallest Euclidean distance from
/// g(0) = 0 to the image of the distinguished boundary |z_i| = radius. Also
/// audits the half-radius transfer: for f = g / (1 + b . g) with
/// |b . g| <= 1 on the sampled torus, min |f| >= radius_lower / 2.
struct CoveringEstimate {
  Point center;
  double radius_lower = 0;
  long boundary_samples = 0;
  long skipped = 0;
  double s0_proxy = 0;
  double half_radius_min = 0;
  bool half_radius_ok = false;
};

inline CoveringEstimate covering_estimate(const MapExpr& g, double radius,
                                          int phases_per_axis = 48) {
  const int n = g.dim();
  if (!(radius > 0 && radius < 1)) throw precondition_error("covering radius must lie in (0, 1)");
  if (phases_per_axis < 4) throw precondition_error("need at least 4 phases per axis");
  const Point at0 = eval_map(g, origin(n));
  if (max_abs(at0) > 1e-10)
    throw precondition_error("covering_estimate: map must satisfy g(0) = 0");

  CoveringEstimate est;
  est.center = at0;

  std::vector<Point> images;
  images.reserve(static_cast<std::size_t>(std::pow(phases_per_axis, n)));
  std::vector<int> idx(n, 0);
  double sup_inf = 0;
  double min_norm = std::numeric_limits<double>::infinity();
  while (true) {
    const double two_pi = 6.28318530717958647692;
    Point z(n);
    for (int i = 0; i < n; ++i) {
      const double th = two_pi * idx[i] / phases_per_axis;
      z[i] = radius * cxd{std::cos(th), std::sin(th)};
    }
    ++est.boundary_samples;
    try {
      Point w = eval_map(g, z);
      double norm = 0;
      for (const cxd& c : w) norm += std::norm(c);
      min_norm = std::min(min_norm, std::sqrt(norm));
      sup_inf = std::max(sup_inf, max_abs(w));
      images.push_back(std::move(w));
    } catch (const singular_error&) {
      ++est.skipped;
    }
    int axis = 0;
    while (axis < n && ++idx[axis] == phases_per_axis) idx[axis++] = 0;
    if (axis == n) break;
  }
  if (images.empty()) throw singular_error("covering_estimate: all boundary samples singular", 0.0);
  est.radius_lower = min_norm;
  est.s0_proxy = min_norm;

  const double b = 1.0 / std::max(sup_inf, 1e-300);
  double min_f = std::numeric_limits<double>::infinity();
  for (const Point& w : images) {
    const cxd l = cxd{1.0, 0.0} + b * w[0];
    double norm = 0;
    for (const cxd& c : w) norm += std::norm(c / l);
    min_f = std::min(min_f, std::sqrt(norm));
  }
  est.half_radius_min = min_f;
  est.half_radius_ok = min_f >= 0.5 * est.radius_lower - 1e-9;
  return est;
}

/// Local covering radius at an interior point: (1/2)(1 - |z|_inf) eta(z)
/// s0(n, beta) with eta the smallest singular value of Df(z) and
/// beta = alpha + 2 sqrt(2) |z|_inf.
template <typename S0Fn>
double local_covering_bound(const MapExpr& f, const Point& z, double alpha, S0Fn&& s0_fn) {
  const int n = f.dim();
  const MapJet mj = map_jet(f, z);
  if (mj.near_singular) throw singular_error("local_covering_bound: singular Jacobian",
                                             std::abs(mj.jacobian_det));
  const double eta = smallest_singular_value(mj.jacobian);
  const double zi = max_abs(z);
  const double beta = alpha + 2.0 * std::sqrt(2.0) * zi;
  return 0.5 * (1.0 - zi) * eta * s0_fn(n, beta);
}

/// Interior gradient bound |grad J_f(z)|_inf <= (lambda_beta + 2 |z|_inf)
/// / (1 - |z|_inf^2) |J_f(z)| with a caller-supplied lambda_beta.
struct GradJacobianReport {
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  double eta = 0;
  bool ok = false;
};

inline GradJacobianReport grad_jacobian_bound_check(const MapExpr& f, const Point& z,
                                                    double lambda_beta) {
  const MapJet mj = map_jet(f, z);
  if (std::abs(mj.jacobian_det) < 1e-12)
    throw singular_error("grad_jacobian_bound_check: singular Jacobian",
                         std::abs(mj.jacobian_det));
  const Jet3 det = jacobian_det_jet(mj);
  double lhs = 0;
  for (int j = 0; j < f.dim(); ++j) lhs = std::max(lhs, std::abs(det.grad(j)));
  const double zi = max_abs(z);
  GradJacobianReport rep;
  rep.lhs = lhs;
  rep.rhs = (lambda_beta + 2.0 * zi) / (1.0 - zi * zi) * std::abs(mj.jacobian_det);
  rep.margin = rep.rhs - rep.lhs;
  rep.eta = smallest_singular_value(mj.jacobian);
  rep.ok = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

}  // namespace polyschwarz
