#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "polyschwarz/errors.hpp"

namespace polyschwarz {

/// Adaptive step control for the embedded 5(4) pair below. When
/// `singular_time` is finite the step is additionally capped at
/// singular_cap * (singular_time - t); the comparison equations all have a
/// regular singular point at t = 1 where coefficients grow like (1-t)^-2.
struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-4;
  double h_floor = 1e-12;
  double h_max = 0.05;
  double singular_time = std::numeric_limits<double>::quiet_NaN();
  double singular_cap = 0.05;
  long max_steps = 2000000;
};

enum class OdeEnd { reached, underflow, stopped };

/// Dormand-Prince 5(4) with FSAL. rhs(t, y, dy); obs(t, y) is called on the
/// initial state and after every accepted step, and may return false to stop
/// integration (the state then holds the last accepted step). Non-finite
/// stage values are treated as an overlarge error estimate, so the stepper
/// backs off and eventually reports underflow instead of propagating NaNs.
template <typename Rhs, typename Obs>
OdeEnd integrate_rk45(Rhs&& rhs, double t0, double t_end, std::vector<double>& y,
                      const OdeOptions& opt, Obs&& obs) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t dim = y.size();
  std::array<std::vector<double>, 7> k;
  for (auto& s : k) s.assign(dim, 0.0);
  std::vector<double> work(dim), y_new(dim);

  double t = t0;
  if (!obs(t, y)) return OdeEnd::stopped;
  if (t_end <= t0) return OdeEnd::reached;

  rhs(t, y, k[0]);
  double h = opt.h_init;
  bool rejected = false;
  const double t_eps = 1e-14 * std::max(1.0, std::abs(t_end));
  for (long step = 0; step < opt.max_steps; ++step) {
    if (t >= t_end - t_eps) return OdeEnd::reached;
    h = std::min(h, opt.h_max);
    h = std::min(h, t_end - t);
    if (std::isfinite(opt.singular_time)) h = std::min(h, opt.singular_cap * (opt.singular_time - t));
    if (h < opt.h_floor) return OdeEnd::underflow;

    auto stage = [&](std::vector<double>& out, double tc,
                     std::initializer_list<std::pair<double, int>> terms) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = y[i];
        for (const auto& [coef, idx] : terms) acc += h * coef * k[idx][i];
        work[i] = acc;
      }
      rhs(tc, work, out);
    };
    stage(k[1], t + h / 5, {{a21, 0}});
    stage(k[2], t + 3 * h / 10, {{a31, 0}, {a32, 1}});
    stage(k[3], t + 4 * h / 5, {{a41, 0}, {a42, 1}, {a43, 2}});
    stage(k[4], t + 8 * h / 9, {{a51, 0}, {a52, 1}, {a53, 2}, {a54, 3}});
    stage(k[5], t + h, {{a61, 0}, {a62, 1}, {a63, 2}, {a64, 3}, {a65, 4}});
    for (std::size_t i = 0; i < dim; ++i)
      y_new[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                             b6 * k[5][i]);
    rhs(t + h, y_new, k[6]);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < dim; ++i) {
      const double ei = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                             e6 * k[5][i] + e7 * k[6][i]);
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      if (!std::isfinite(y_new[i]) || !std::isfinite(ei)) finite = false;
      err = std::max(err, std::abs(ei) / scale);
    }
    if (!finite) err = 1e12;

    if (err <= 1.0) {
      t += h;
      y.swap(y_new);
      k[0].swap(k[6]);
      if (!obs(t, y)) return OdeEnd::stopped;
      double factor = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (rejected) factor = std::min(factor, 1.0);
      rejected = false;
      h *= factor;
    } else {
      rejected = true;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  return OdeEnd::underflow;
}

/// Quiet integration to a fixed time; empty when the step size underflows
/// before tau (used by the event bisection to probe inside a bracket).
template <typename Rhs>
std::optional<std::vector<double>> integrate_to(Rhs&& rhs, double t_lo, std::vector<double> y,
                                                double tau, const OdeOptions& opt) {
  const OdeEnd end = integrate_rk45(rhs, t_lo, tau, y, opt,
                                    [](double, const std::vector<double>&) { return true; });
  if (end != OdeEnd::reached) return std::nullopt;
  return y;
}

/// Bisection location of the first time in (t_lo, t_hi] where `crossed` turns
/// true, by re-integration from the bracket's left state. The left endpoint
/// state must not satisfy `crossed`; integration failure inside the bracket
/// counts as crossed (the event is a blow-up). Returns (lo, hi) with
/// hi - lo <= width.
template <typename Rhs, typename Pred>
std::pair<double, double> bracket_event(Rhs&& rhs, const OdeOptions& opt, double t_lo,
                                        std::vector<double> y_lo, double t_hi, Pred&& crossed,
                                        double width) {
  double lo = t_lo, hi = t_hi;
  for (int iter = 0; iter < 200 && hi - lo > width; ++iter) {
    const double mid = 0.5 * (lo + hi);
    std::optional<std::vector<double>> probe = integrate_to(rhs, lo, y_lo, mid, opt);
    if (!probe || crossed(*probe)) {
      hi = mid;
    } else {
      lo = mid;
      y_lo = std::move(*probe);
    }
  }
  return {lo, hi};
}

}  // namespace polyschwarz
