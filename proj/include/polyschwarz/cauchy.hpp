#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "polyschwarz/errors.hpp"
#include "polyschwarz/jet.hpp"
#include "polyschwarz/maps.hpp"

namespace polyschwarz {

/// Independent derivative oracle based on trigonometric quadrature of the
/// Cauchy integral over a polytorus around z. Exact for polynomial maps of
/// per-variable degree < nodes; otherwise the aliasing error decays
/// geometrically in the node count. Used to validate jet propagation, never
/// as a production path.
namespace cauchy_detail {

struct MultiIndex {
  std::vector<int> m;
  double factorial = 1.0;
};

inline double multi_factorial(const std::vector<int>& m) {
  double f = 1.0;
  for (int e : m)
    for (int i = 2; i <= e; ++i) f *= i;
  return f;
}

inline std::vector<double> contour_radii(const Point& z) {
  std::vector<double> r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double room = 1.0 - std::abs(z[i]);
    if (room <= 1e-9)
      throw contour_error("cauchy oracle: point is not interior to the unit polydisk");
    r[i] = std::min(0.5 * room, 0.25);
  }
  return r;
}

/// For every requested multi-index and every component, the quadrature sum
/// sum_grid f(z + r e^{i theta}) e^{-i m.theta}, in one pass over the grid.
inline std::vector<std::vector<cxd>> quadrature(const MapExpr& f, const Point& z,
                                                const std::vector<MultiIndex>& multis, int nodes) {
  const int n = f.dim();
  const std::vector<double> r = contour_radii(z);
  int max_order = 0;
  for (const auto& mi : multis)
    for (int e : mi.m) max_order = std::max(max_order, e);

  // phase(j, k) = e^{-i k theta_j}
  std::vector<std::vector<cxd>> phase(nodes, std::vector<cxd>(max_order + 1));
  std::vector<cxd> node_point(nodes);
  const double two_pi = 6.28318530717958647692;
  for (int j = 0; j < nodes; ++j) {
    const double theta = two_pi * j / nodes;
    node_point[j] = {std::cos(theta), std::sin(theta)};
    for (int k = 0; k <= max_order; ++k) phase[j][k] = {std::cos(k * theta), -std::sin(k * theta)};
  }

  std::vector<std::vector<cxd>> acc(multis.size(), std::vector<cxd>(n));
  std::vector<int> idx(n, 0);
  Point zeta(n);
  while (true) {
    for (int i = 0; i < n; ++i) zeta[i] = z[i] + r[i] * node_point[idx[i]];
    std::vector<cxd> val;
    try {
      val = eval_map(f, zeta);
    } catch (const singular_error& e) {
      throw contour_error(std::string("cauchy oracle: map is singular on the contour (") +
                          e.what() + ")");
    }
    for (const auto& c : val)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw contour_error("cauchy oracle: non-finite map value on the contour");
    for (std::size_t t = 0; t < multis.size(); ++t) {
      cxd weight = 1.0;
      for (int i = 0; i < n; ++i) weight *= phase[idx[i]][multis[t].m[i]];
      for (int c = 0; c < n; ++c) acc[t][c] += val[c] * weight;
    }
    int carry = 0;
    while (carry < n && ++idx[carry] == nodes) idx[carry++] = 0;
    if (carry == n) break;
  }

  const double cells = std::pow(static_cast<double>(nodes), n);
  for (std::size_t t = 0; t < multis.size(); ++t) {
    double rpow = 1.0;
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < multis[t].m[i]; ++e) rpow *= r[i];
    const double scale = multis[t].factorial / (cells * rpow);
    for (int c = 0; c < n; ++c) acc[t][c] *= scale;
  }
  return acc;
}

}  // namespace cauchy_detail

/// One partial derivative of one component, |multi| arbitrary (within
/// aliasing limits of the node count).
inline cxd cauchy_derivative(const MapExpr& f, const Point& z, int component,
                             const std::vector<int>& multi, int nodes = 64) {
  if (component < 0 || component >= f.dim())
    throw precondition_error("cauchy_derivative: component out of range");
  if (static_cast<int>(multi.size()) != f.dim())
    throw precondition_error("cauchy_derivative: multi-index has wrong length");
  cauchy_detail::MultiIndex mi{multi, cauchy_detail::multi_factorial(multi)};
  return cauchy_detail::quadrature(f, z, {mi}, nodes)[0][component];
}

/// Order-3 jets of every component, assembled from one quadrature pass.
inline std::vector<Jet3> cauchy_jets(const MapExpr& f, const Point& z, int nodes = 64) {
  const int n = f.dim();
  std::vector<cauchy_detail::MultiIndex> multis;
  std::vector<std::array<int, 3>> slots;  // parallel list: sorted indices, -1 padded
  auto add = [&](std::array<int, 3> s) {
    std::vector<int> m(n, 0);
    for (int v : s)
      if (v >= 0) ++m[v];
    multis.push_back({m, cauchy_detail::multi_factorial(m)});
    slots.push_back(s);
  };
  add({-1, -1, -1});
  for (int i = 0; i < n; ++i) add({i, -1, -1});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) add({i, j, -1});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) add({i, j, k});

  const auto acc = cauchy_detail::quadrature(f, z, multis, nodes);
  std::vector<Jet3> jets(static_cast<std::size_t>(n), Jet3(n));
  for (std::size_t t = 0; t < multis.size(); ++t) {
    const auto& s = slots[t];
    for (int c = 0; c < n; ++c) {
      Jet3& jet = jets[static_cast<std::size_t>(c)];
      if (s[0] < 0)
        jet.value = acc[t][c];
      else if (s[1] < 0)
        jet.grad(s[0]) = acc[t][c];
      else if (s[2] < 0)
        jet.hess(s[0], s[1]) = acc[t][c];
      else
        jet.third(s[0], s[1], s[2]) = acc[t][c];
    }
  }
  return jets;
}

}  // namespace polyschwarz
