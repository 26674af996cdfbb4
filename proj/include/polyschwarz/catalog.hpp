#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/maps.hpp"
#include "polyschwarz/rng.hpp"

namespace polyschwarz {

/// A named map together with the polydisk radius on which it (and every jet
/// the test harness takes of it, including quadrature contours reaching
/// about 0.25 beyond the sample point) is comfortably holomorphic.
struct NamedMap {
  std::string name;
  MapExpr map;
  double safe_radius;
};

namespace catalog_detail {

inline MapExpr single_pole_moebius(int n, cxd a1) {
  CMat m(n + 1, n + 1);
  m(0, 0) = 1.0;
  m(0, 1) = -a1;
  for (int i = 1; i <= n; ++i) m(i, i) = 1.0;
  return MapExpr::moebius(n, m);
}

inline MapExpr mixed_moebius(int n) {
  // l0 = 1 - 0.3 z_1 + 0.2 z_2: coefficient l1-norm 0.5 keeps the pole off
  // the closed unit polydisk with slack.
  CMat m(n + 1, n + 1);
  m(0, 0) = 1.0;
  m(0, 1) = -0.3;
  m(0, 2) = 0.2;
  for (int i = 1; i <= n; ++i) m(i, i) = 1.0;
  m(1, 2) = 0.1;  // mild upper-row mixing, still well conditioned
  return MapExpr::moebius(n, m);
}

inline MapExpr cyclic_perturbation(int n, double eps, int degree) {
  std::vector<PolyTerm> terms;
  for (int k = 0; k < n; ++k) {
    std::vector<int> lin(n, 0);
    lin[k] = 1;
    terms.push_back({k, lin, cxd{1.0, 0.0}});
    std::vector<int> mono(n, 0);
    mono[(k + 1) % n] = degree;
    terms.push_back({k, mono, cxd{eps, 0.0}});
  }
  return MapExpr::polynomial(n, terms);
}

inline std::vector<cxd> pattern_a(int n, double base) {
  std::vector<cxd> a(n);
  for (int j = 0; j < n; ++j) {
    const double mod = base * (1.0 - 0.25 * j);
    const double th = 0.78539816339744831 * (j + 1);  // pi/4 spacing
    a[j] = mod * cxd{std::cos(th), std::sin(th)};
  }
  return a;
}

}  // namespace catalog_detail

/// Built-in map corpus used by the cross-checking suites. Every entry is
/// locally biholomorphic on the polydisk of its safe_radius and stays
/// evaluable 0.25 beyond it (quadrature contours included).
inline std::vector<NamedMap> catalog(int n) {
  if (n < 2) throw precondition_error("catalog requires dimension >= 2");
  using namespace catalog_detail;
  std::vector<NamedMap> maps;
  maps.push_back({"identity", MapExpr::identity(n), 0.95});
  maps.push_back({"moebius_half_pole", single_pole_moebius(n, cxd{0.5, 0.0}), 0.95});
  maps.push_back({"moebius_mixed", mixed_moebius(n), 0.95});

  std::vector<cxd> a_real(n, cxd{0.0, 0.0});
  a_real[0] = cxd{0.5, 0.0};
  maps.push_back({"automorphism_real", MapExpr::automorphism(a_real), 0.95});
  maps.push_back({"automorphism_complex", MapExpr::automorphism(pattern_a(n, 0.4)), 0.95});

  maps.push_back({"perturbation_quadratic", cyclic_perturbation(n, 0.05, 2), 0.95});
  maps.push_back({"perturbation_cubic", cyclic_perturbation(n, 0.03, 3), 0.95});

  maps.push_back({"dilated_automorphism",
                  MapExpr::dilation(0.8, MapExpr::automorphism(pattern_a(n, 0.4))), 0.95});
  maps.push_back({"composed_pair",
                  MapExpr::compose(MapExpr::automorphism(a_real), cyclic_perturbation(n, 0.05, 2)),
                  0.9});

  std::vector<cxd> b(n, cxd{0.0, 0.0});
  b[0] = cxd{0.2, 0.0};
  b[1] = cxd{-0.1, 0.0};
  maps.push_back({"renormalized_moebius",
                  MapExpr::compose(MapExpr::normalizer(b), mixed_moebius(n)), 0.9});
  return maps;
}

/// Random Moebius map with l0 = 1 + c . z, sum |c_j| <= 0.5 (no pole within
/// the closed polydisk) and a well-conditioned coefficient matrix.
inline MapExpr random_moebius(Rng& rng, int n) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    CMat m(n + 1, n + 1);
    m(0, 0) = 1.0;
    for (int j = 1; j <= n; ++j) m(0, j) = (0.5 / n) * rng.uniform(0.3, 1.0) * rng.unit_phase();
    for (int i = 1; i <= n; ++i) {
      m(i, 0) = 0.1 * rng.uniform() * rng.unit_phase();
      for (int j = 1; j <= n; ++j)
        m(i, j) = (i == j ? cxd{1.0, 0.0} : cxd{0.0, 0.0}) + 0.25 * rng.uniform() * rng.unit_phase();
    }
    if (smallest_singular_value(m) > 0.2) return MapExpr::moebius(n, m);
  }
  throw precondition_error("random_moebius: conditioning retry budget exhausted");
}

/// Random polydisk automorphism with per-coordinate centers of modulus in
/// [0.1, max_mod].
inline MapExpr random_automorphism(Rng& rng, int n, double max_mod = 0.6) {
  std::vector<cxd> a(n);
  for (int j = 0; j < n; ++j) a[j] = rng.uniform(0.1, max_mod) * rng.unit_phase();
  return MapExpr::automorphism(a);
}

/// Uniform sample from the polydisk of the given radius (area-uniform per
/// coordinate).
inline Point random_point(Rng& rng, int n, double radius) {
  Point z(n);
  for (int i = 0; i < n; ++i)
    z[i] = radius * std::sqrt(rng.uniform()) * rng.unit_phase();
  return z;
}

}  // namespace polyschwarz
