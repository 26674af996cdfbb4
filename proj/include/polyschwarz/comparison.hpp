#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "polyschwarz/errors.hpp"
#include "polyschwarz/maps.hpp"
#include "polyschwarz/ode.hpp"
#include "polyschwarz/rng.hpp"
#include "polyschwarz/schwarzian.hpp"

namespace polyschwarz {

/// The exponent gamma admits two readings: the published statement has
/// 2*gamma = sqrt(1 + b + a^2) - 1, while the argument that produces it gives
/// 2*gamma = a + sqrt(1 + b + a^2) - 1. The larger (argument) exponent is the
/// default; both are available so the discrepancy stays visible.
enum class GammaVariant { proof, statement };

/// Constants that feed the scalar comparison equations, all derived from the
/// dimension and a tensor bound alpha:
///   a     = 0.8 n sqrt(n) alpha        (gradient-coupling coefficient)
///   b     = 2 (3 + 2 alpha) sqrt(n) a  (zeroth-order coefficient)
///   c     = sqrt(1 + b + a^2)
///   tau   = 1.6 n sqrt(n) alpha        (first-derivative tensor bound)
///   c1    = (2 sqrt(2n) / (n-1)) (2 + (n-1)^2)
///   c2    = (2 sqrt(n) / (n-1)) (n + (n-1)^2)
///   eps   = 5 n^2 alpha + 2 n (n+1) alpha^2
///   delta = 3 n alpha * 2 (1 + 2 gamma)
struct BoundParams {
  int n = 0;
  double alpha = 0;
  GammaVariant variant = GammaVariant::proof;
  double a = 0, b = 0, c = 0, gamma = 0, tau = 0;
  double c1 = 0, c2 = 0, eps = 0, delta = 0;

  static BoundParams make(int n, double alpha, GammaVariant variant = GammaVariant::proof) {
    if (n < 2) throw precondition_error("BoundParams requires dimension >= 2");
    if (!(alpha >= 0)) throw precondition_error("BoundParams requires alpha >= 0");
    BoundParams p;
    p.n = n;
    p.alpha = alpha;
    p.variant = variant;
    const double rn = std::sqrt(static_cast<double>(n));
    p.a = 0.8 * n * rn * alpha;
    p.b = 2.0 * (3.0 + 2.0 * alpha) * rn * p.a;
    p.c = std::sqrt(1.0 + p.b + p.a * p.a);
    p.gamma = (variant == GammaVariant::proof) ? 0.5 * (p.a + p.c - 1.0) : 0.5 * (p.c - 1.0);
    p.tau = 1.6 * n * rn * alpha;
    p.c1 = 2.0 * std::sqrt(2.0 * n) / (n - 1.0) * (2.0 + (n - 1.0) * (n - 1.0));
    p.c2 = 2.0 * rn / (n - 1.0) * (n + (n - 1.0) * (n - 1.0));
    p.eps = 5.0 * n * n * alpha + 2.0 * n * (n + 1.0) * alpha * alpha;
    p.delta = 3.0 * n * alpha * 2.0 * (1.0 + 2.0 * p.gamma);
    return p;
  }
};

enum class OdeStatusKind { completed, first_zero, blowup };

struct OdeStatus {
  OdeStatusKind kind = OdeStatusKind::completed;
  /// completed: last time reached; first_zero / blowup: bracket midpoint.
  double where = 0;
  double bracket_lo = 0, bracket_hi = 0;
  /// Set when integration stopped early for a benign reason (step underflow
  /// at a regular singular endpoint with no event detected).
  bool warning = false;
};

/// One accepted step of a comparison integration: time plus the named values
/// listed in OdeOutcome::value_names, in that order.
struct OdeSample {
  double t = 0;
  std::vector<double> v;
};

struct OdeOutcome {
  std::vector<std::string> value_names;
  std::vector<OdeSample> samples;
  OdeStatus status;
  bool envelope_ok = true;
  /// Smallest (bound - value) seen over all samples subject to an envelope,
  /// relative to the bound. +inf when no envelope applies.
  double worst_margin = std::numeric_limits<double>::infinity();
};

/// Coefficients of the transported linear system along a ray: at parameter t
/// fills A (n x n) and B (length n) so that u' = sum_k w_k zeta_k,
/// w_j' = sum_k A(j,k) w_k + B(j) u.
using RayCoefficients = std::function<void(double t, CMat& A, std::vector<cxd>& B)>;

namespace comparison_detail {

inline void require_boundary_direction(const std::vector<cxd>& zeta) {
  double m = 0;
  for (const cxd& z : zeta) m = std::max(m, std::abs(z));
  if (std::abs(m - 1.0) > 1e-9)
    throw precondition_error("ray direction must satisfy max_i |zeta_i| = 1");
}

inline OdeOptions comparison_defaults() {
  OdeOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  opt.h_init = 1e-4;
  opt.singular_time = 1.0;
  return opt;
}

}  // namespace comparison_detail

/// Contracts the tensor of `f` along the ray t -> t*zeta into the transport
/// coefficients A(j,k) = sum_i zeta_i S^k_{ij}, B(j) = sum_i zeta_i S^0_{ij}.
inline RayCoefficients map_ray_coefficients(const MapExpr& f, std::vector<cxd> zeta) {
  comparison_detail::require_boundary_direction(zeta);
  const int n = f.dim();
  if (static_cast<int>(zeta.size()) != n) throw precondition_error("direction dimension mismatch");
  return [f, zeta, n](double t, CMat& A, std::vector<cxd>& B) {
    Point z(n);
    for (int i = 0; i < n; ++i) z[i] = t * zeta[i];
    const SchwarzianTensor st = schwarzian_tensor(f, z);
    A = CMat(n, n);
    B.assign(n, cxd{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        cxd acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) acc += zeta[i] * st.S[k](i, j);
        A(j, k) = acc;
      }
      cxd acc0{0.0, 0.0};
      for (int i = 0; i < n; ++i) acc0 += zeta[i] * st.S0(i, j);
      B[j] = acc0;
    }
  };
}

/// Integrates u' = <w, zeta>, w' = A w + B u along t in [0, t_end] with
/// u(0) = u0, w(0) = grad0. Detects and brackets the first zero of |u|
/// (threshold 1e-10 times the running maximum of |u|). Samples carry
/// re_u, im_u, abs_u, abs_grad per accepted step.
inline OdeOutcome transport_ray(const RayCoefficients& coeffs, const std::vector<cxd>& zeta,
                                cxd u0, std::vector<cxd> grad0, double t_end,
                                OdeOptions opt = comparison_detail::comparison_defaults()) {
  comparison_detail::require_boundary_direction(zeta);
  const int n = static_cast<int>(zeta.size());
  if (static_cast<int>(grad0.size()) != n)
    throw precondition_error("initial gradient dimension mismatch");
  if (!(t_end > 0.0 && t_end < 1.0)) throw precondition_error("t_end must lie in (0, 1)");

  CMat A(n, n);
  std::vector<cxd> B(n);
  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    coeffs(t, A, B);
    const cxd u{y[0], y[1]};
    cxd du{0.0, 0.0};
    for (int k = 0; k < n; ++k) du += cxd{y[2 + 2 * k], y[3 + 2 * k]} * zeta[k];
    dy.assign(2 * n + 2, 0.0);
    dy[0] = du.real();
    dy[1] = du.imag();
    for (int j = 0; j < n; ++j) {
      cxd dw = B[j] * u;
      for (int k = 0; k < n; ++k) dw += A(j, k) * cxd{y[2 + 2 * k], y[3 + 2 * k]};
      dy[2 + 2 * j] = dw.real();
      dy[3 + 2 * j] = dw.imag();
    }
  };

  std::vector<double> y(2 * n + 2, 0.0);
  y[0] = u0.real();
  y[1] = u0.imag();
  for (int k = 0; k < n; ++k) {
    y[2 + 2 * k] = grad0[k].real();
    y[3 + 2 * k] = grad0[k].imag();
  }

  auto abs_u = [](const std::vector<double>& s) { return std::hypot(s[0], s[1]); };
  auto abs_grad = [n](const std::vector<double>& s) {
    double acc = 0;
    for (int k = 0; k < n; ++k)
      acc += s[2 + 2 * k] * s[2 + 2 * k] + s[3 + 2 * k] * s[3 + 2 * k];
    return std::sqrt(acc);
  };

  OdeOutcome out;
  out.value_names = {"re_u", "im_u", "abs_u", "abs_grad"};
  double run_max = std::max(abs_u(y), 1e-300);
  double prev_t = 0.0;
  std::vector<double> prev_y = y;
  bool zero_hit = false;
  auto observe = [&](double t, const std::vector<double>& s) {
    out.samples.push_back({t, {s[0], s[1], abs_u(s), abs_grad(s)}});
    if (abs_u(s) < 1e-10 * run_max) {
      zero_hit = true;
      return false;
    }
    run_max = std::max(run_max, abs_u(s));
    prev_t = t;
    prev_y = s;
    return true;
  };

  const OdeEnd end = integrate_rk45(rhs, 0.0, t_end, y, opt, observe);
  if (zero_hit) {
    const double threshold = 1e-10 * run_max;
    auto crossed = [&](const std::vector<double>& s) { return abs_u(s) < threshold; };
    const auto [lo, hi] = bracket_event(rhs, opt, prev_t, prev_y, out.samples.back().t,
                                        crossed, 1e-9);
    out.status.kind = OdeStatusKind::first_zero;
    out.status.bracket_lo = lo;
    out.status.bracket_hi = hi;
    out.status.where = 0.5 * (lo + hi);
  } else {
    out.status.kind = OdeStatusKind::completed;
    out.status.where = out.samples.back().t;
    out.status.warning = (end == OdeEnd::underflow);
  }
  return out;
}

inline OdeOutcome transport_ray(const MapExpr& f, const std::vector<cxd>& zeta, cxd u0,
                                std::vector<cxd> grad0, double t_end,
                                OdeOptions opt = comparison_detail::comparison_defaults()) {
  return transport_ray(map_ray_coefficients(f, zeta), zeta, u0, std::move(grad0), t_end, opt);
}

/// Closed-form majorant for solutions of h'' = 2a/(1-x^2) h' + b/(1-x^2)^2 h
/// with h(0) <= 2, h'(0) = 0: with c = sqrt(1 + b + a^2),
///   h(x)  <= 2 ((1+x)/(1-x))^{(a+c-1)/2}
///   h'(x) <= (a+c)/(1-x^2) h(x).
/// Returns {h bound, h' bound}.
inline std::pair<double, double> linear_envelope(double a, double b, double x) {
  if (!(a >= 0 && b >= 0)) throw precondition_error("linear_envelope requires a, b >= 0");
  if (!(x >= 0 && x < 1)) throw precondition_error("linear_envelope requires 0 <= x < 1");
  const double c = std::sqrt(1.0 + b + a * a);
  const double h = 2.0 * std::pow((1.0 + x) / (1.0 - x), 0.5 * (a + c - 1.0));
  const double hp = (a + c) / (1.0 - x * x) * h;
  return {h, hp};
}

/// Integrates the linear comparison equation with h(0) = 1, h'(0) = 0 and
/// checks both envelope inequalities at every accepted step. Margins are
/// relative to the bound; samples carry h, dh, h_bound, dh_bound.
inline OdeOutcome linear_comparison_check(double a, double b, double x_end,
                                          OdeOptions opt = comparison_detail::comparison_defaults()) {
  if (!(a >= 0 && b >= 0)) throw precondition_error("linear_comparison_check requires a, b >= 0");
  if (!(x_end > 0 && x_end < 1)) throw precondition_error("x_end must lie in (0, 1)");
  auto rhs = [&](double x, const std::vector<double>& y, std::vector<double>& dy) {
    const double om = 1.0 - x * x;
    dy.assign(2, 0.0);
    dy[0] = y[1];
    dy[1] = 2.0 * a / om * y[1] + b / (om * om) * y[0];
  };
  OdeOutcome out;
  out.value_names = {"h", "dh", "h_bound", "dh_bound"};
  std::vector<double> y = {1.0, 0.0};
  auto observe = [&](double x, const std::vector<double>& s) {
    const auto [hb, hpb] = linear_envelope(a, b, x);
    out.samples.push_back({x, {s[0], s[1], hb, hpb}});
    out.worst_margin = std::min(out.worst_margin, (hb - s[0]) / hb);
    out.worst_margin = std::min(out.worst_margin, (hpb - s[1]) / hpb);
    return true;
  };
  const OdeEnd end = integrate_rk45(rhs, 0.0, x_end, y, opt, observe);
  out.status.kind = OdeStatusKind::completed;
  out.status.where = out.samples.back().t;
  out.status.warning = (end != OdeEnd::reached);
  out.envelope_ok = out.worst_margin >= -1e-9;
  return out;
}

/// Riccati equation h' = 1.6 c/(1-x^2) h + 4.5 c/(1-x^2)^2 + h^2, h(0) = 0,
/// integrated in the regularised variable phi = (1-x) h:
///   (1-x) phi' = -(1 - 1.6 c/(1+x)) phi + 4.5 c/(1+x)^2 + phi^2.
/// Blow-up is declared when phi exceeds 1e6 while increasing and is bracketed
/// to width 1e-7 (step underflow short of x_end is treated the same way).
/// For c <= 1/6.1 the solution is checked against h <= x/(1-x^2), i.e.
/// phi <= x/(1+x); margins are relative to that bound. Samples carry
/// phi, h, h_bound.
inline OdeOutcome riccati_solve(double c, double x_end,
                                OdeOptions opt = comparison_detail::comparison_defaults()) {
  if (!(c >= 0)) throw precondition_error("riccati_solve requires c >= 0");
  if (!(x_end > 0 && x_end < 1)) throw precondition_error("x_end must lie in (0, 1)");
  constexpr double kBlowup = 1e6;
  auto rhs = [&](double x, const std::vector<double>& y, std::vector<double>& dy) {
    const double phi = y[0];
    dy.assign(1, 0.0);
    dy[0] = (-(1.0 - 1.6 * c / (1.0 + x)) * phi + 4.5 * c / ((1.0 + x) * (1.0 + x)) +
             phi * phi) /
            (1.0 - x);
  };
  OdeOutcome out;
  out.value_names = {"phi", "h", "h_bound"};
  std::vector<double> y = {0.0};
  double prev_t = 0.0;
  std::vector<double> prev_y = y;
  bool exploded = false;
  const bool enforce = c <= 1.0 / 6.1 + 1e-12;
  auto observe = [&](double x, const std::vector<double>& s) {
    const double phi = s[0];
    const double om = std::max(1.0 - x, 1e-300);
    const double h = phi / om;
    const double hb = x / ((1.0 - x) * (1.0 + x));
    out.samples.push_back({x, {phi, h, hb}});
    if (enforce && x > 1e-12) {
      const double phib = x / (1.0 + x);
      out.worst_margin = std::min(out.worst_margin, (phib - phi) / phib);
    }
    if (phi > kBlowup) {
      std::vector<double> d;
      rhs(x, s, d);
      if (d[0] > 0) {
        exploded = true;
        return false;
      }
    }
    prev_t = x;
    prev_y = s;
    return true;
  };
  const OdeEnd end = integrate_rk45(rhs, 0.0, x_end, y, opt, observe);
  if (exploded) {
    auto crossed = [&](const std::vector<double>& s) { return s[0] > kBlowup; };
    const auto [lo, hi] = bracket_event(rhs, opt, prev_t, prev_y, out.samples.back().t,
                                        crossed, 1e-7);
    out.status.kind = OdeStatusKind::blowup;
    out.status.bracket_lo = lo;
    out.status.bracket_hi = hi;
    out.status.where = 0.5 * (lo + hi);
  } else if (end == OdeEnd::underflow) {
    out.status.kind = OdeStatusKind::blowup;
    out.status.bracket_lo = out.samples.back().t;
    out.status.bracket_hi = std::min(out.samples.back().t + 1e-7, 1.0);
    out.status.where = 0.5 * (out.status.bracket_lo + out.status.bracket_hi);
    out.status.warning = true;
  } else {
    out.status.kind = OdeStatusKind::completed;
    out.status.where = out.samples.back().t;
  }
  out.envelope_ok = enforce ? out.worst_margin >= -1e-9 : true;
  return out;
}

/// y'' + eps/(1-t^2)^2 y = -delta/(1-t^2)^p ((1+t)/(1-t))^gamma with
/// y(0) = 1, y'(0) = 0: locates and brackets (width 1e-8) the first zero of
/// y on (0, t_end]. No zero by t_end gives status completed; step underflow
/// near t = 1 without a sign change completes with a warning. Samples carry
/// y, dy.
inline OdeOutcome vanish_radius(double eps, double delta, double gamma, int rhs_power = 2,
                                double t_end = 1.0 - 1e-6,
                                OdeOptions opt = comparison_detail::comparison_defaults()) {
  if (!(eps >= 0 && delta >= 0)) throw precondition_error("vanish_radius requires eps, delta >= 0");
  if (!(rhs_power == 1 || rhs_power == 2)) throw precondition_error("rhs_power must be 1 or 2");
  if (!(t_end > 0 && t_end < 1)) throw precondition_error("t_end must lie in (0, 1)");
  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const double om = 1.0 - t * t;
    const double forcing = delta / std::pow(om, rhs_power) * std::pow((1.0 + t) / (1.0 - t), gamma);
    dy.assign(2, 0.0);
    dy[0] = y[1];
    dy[1] = -eps / (om * om) * y[0] - forcing;
  };
  OdeOutcome out;
  out.value_names = {"y", "dy"};
  std::vector<double> y = {1.0, 0.0};
  double prev_t = 0.0;
  std::vector<double> prev_y = y;
  bool hit = false;
  auto observe = [&](double t, const std::vector<double>& s) {
    out.samples.push_back({t, {s[0], s[1]}});
    if (s[0] <= 0.0) {
      hit = true;
      return false;
    }
    prev_t = t;
    prev_y = s;
    return true;
  };
  const OdeEnd end = integrate_rk45(rhs, 0.0, t_end, y, opt, observe);
  if (hit) {
    auto crossed = [](const std::vector<double>& s) { return s[0] <= 0.0; };
    const auto [lo, hi] = bracket_event(rhs, opt, prev_t, prev_y, out.samples.back().t,
                                        crossed, 1e-8);
    out.status.kind = OdeStatusKind::first_zero;
    out.status.bracket_lo = lo;
    out.status.bracket_hi = hi;
    out.status.where = 0.5 * (lo + hi);
  } else {
    out.status.kind = OdeStatusKind::completed;
    out.status.where = out.samples.back().t;
    out.status.warning = (end == OdeEnd::underflow);
  }
  return out;
}

/// Envelope audit for a normalized map (f(0) = 0, Df(0) = I). Transports
/// u = (det Dg)^{-1/(n+1)} for the renormalized g = T_a o f along boundary
/// rays and checks, at every accepted step with t = |z|_inf:
///   |grad u| / |u|   <=  t/(1-t^2)
///   (1-t^2)^{sqrt(n)/2}          <= |u|   <= (1-t^2)^{-sqrt(n)/2}
///   (1-t^2)^{sqrt(n)(n+1)/2}     <= |J_g| <= (1-t^2)^{-sqrt(n)(n+1)/2}
/// Margins are absolute (bound minus value, or value minus bound for lower
/// envelopes). Only applies when n sqrt(n) alpha <= 1/6.1; otherwise the
/// report comes back with applicable = false.
struct EnvelopeReport {
  bool applicable = false;
  int n = 0;
  double alpha = 0;
  /// n sqrt(n) alpha, compared against 1/6.1.
  double threshold_value = 0;
  int rays = 0;
  double t_end = 0;
  double worst_ratio_margin = std::numeric_limits<double>::infinity();
  double worst_u_lower = std::numeric_limits<double>::infinity();
  double worst_u_upper = std::numeric_limits<double>::infinity();
  double worst_jac_lower = std::numeric_limits<double>::infinity();
  double worst_jac_upper = std::numeric_limits<double>::infinity();
  /// Largest | |u(t)| - |J_g(t zeta)|^{-1/(n+1)} | over the audited points.
  double consistency_error = 0;
  int violations = 0;
  bool ok = false;
};

inline EnvelopeReport envelope_check_u(const MapExpr& f, double alpha, int rays, double t_end,
                                       std::uint64_t seed = kDefaultSeed,
                                       OdeOptions opt = comparison_detail::comparison_defaults()) {
  const int n = f.dim();
  if (rays < 1) throw precondition_error("envelope_check_u requires rays >= 1");
  if (!(t_end > 0 && t_end < 1)) throw precondition_error("t_end must lie in (0, 1)");
  EnvelopeReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.rays = rays;
  rep.t_end = t_end;
  rep.threshold_value = n * std::sqrt(static_cast<double>(n)) * alpha;
  if (rep.threshold_value > 1.0 / 6.1 + 1e-12) {
    rep.applicable = false;
    return rep;
  }
  rep.applicable = true;

  const MapExpr g = MapExpr::compose(make_normalizer(f), f);

  const double rn = std::sqrt(static_cast<double>(n));
  const double env_u = 0.5 * rn;
  const double env_j = 0.5 * rn * (n + 1);
  const double tol = 1e-9;

  Rng rng(seed);
  for (int r = 0; r < rays; ++r) {
    std::vector<cxd> zeta(n);
    if (r == 0) {
      for (int i = 0; i < n; ++i) zeta[i] = 1.0;
    } else if (r == 1) {
      for (int i = 0; i < n; ++i) zeta[i] = (i % 2 == 0) ? cxd{1.0, 0.0} : cxd{-1.0, 0.0};
    } else if (r == 2) {
      for (int i = 0; i < n; ++i) zeta[i] = (i % 2 == 0) ? cxd{1.0, 0.0} : cxd{0.0, 1.0};
    } else {
      for (int i = 0; i < n; ++i) zeta[i] = rng.unit_phase();
    }

    std::vector<cxd> grad0(n, cxd{0.0, 0.0});
    OdeOutcome ray = transport_ray(map_ray_coefficients(g, zeta), zeta, cxd{1.0, 0.0}, grad0,
                                   t_end, opt);
    for (const OdeSample& s : ray.samples) {
      const double t = s.t;
      const double om = 1.0 - t * t;
      const double au = s.v[2], ag = s.v[3];
      const double ratio_margin = t / om - ag / std::max(au, 1e-300);
      const double u_lower = au - std::pow(om, env_u);
      const double u_upper = std::pow(om, -env_u) - au;
      rep.worst_ratio_margin = std::min(rep.worst_ratio_margin, ratio_margin);
      rep.worst_u_lower = std::min(rep.worst_u_lower, u_lower);
      rep.worst_u_upper = std::min(rep.worst_u_upper, u_upper);
      if (ratio_margin < -tol || u_lower < -tol || u_upper < -tol) ++rep.violations;
    }
    if (ray.status.kind != OdeStatusKind::completed) ++rep.violations;

    const std::size_t stride = std::max<std::size_t>(1, ray.samples.size() / 8);
    for (std::size_t i = 0; i < ray.samples.size(); i += stride) {
      const OdeSample& s = ray.samples[i];
      Point z(n);
      for (int k = 0; k < n; ++k) z[k] = s.t * zeta[k];
      const MapJet mj = map_jet(g, z);
      const double aj = std::abs(mj.jacobian_det);
      const double om = 1.0 - s.t * s.t;
      const double j_lower = aj - std::pow(om, env_j);
      const double j_upper = std::pow(om, -env_j) - aj;
      rep.worst_jac_lower = std::min(rep.worst_jac_lower, j_lower);
      rep.worst_jac_upper = std::min(rep.worst_jac_upper, j_upper);
      if (j_lower < -tol || j_upper < -tol) ++rep.violations;
      rep.consistency_error =
          std::max(rep.consistency_error, std::abs(s.v[2] - std::pow(aj, -1.0 / (n + 1))));
    }
  }
  rep.ok = rep.violations == 0;
  return rep;
}

}  // namespace polyschwarz
