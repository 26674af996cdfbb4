#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "polyschwarz/bergman.hpp"
#include "polyschwarz/catalog.hpp"
#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/maps.hpp"
#include "polyschwarz/rng.hpp"
#include "polyschwarz/schwarzian.hpp"

namespace polyschwarz {

/// A failed check with enough recorded state to replay the single case in
/// isolation: the detail string carries every input at 17 significant digits.
struct Violation {
  std::string description;
  double margin = 0;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  long cases = 0;
  long skipped = 0;
  std::vector<Violation> violations;
  /// Smallest (bound - value) over all executed checks, passing or not.
  double worst_margin = std::numeric_limits<double>::infinity();
  bool pass() const { return violations.empty(); }
};

namespace verify_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt(cxd v) { return fmt(v.real()) + (v.imag() < 0 ? "" : "+") + fmt(v.imag()) + "i"; }

inline std::string fmt(const std::vector<cxd>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + ")";
}

inline void record(SuiteReport& rep, double margin, const std::string& what,
                   const std::string& detail) {
  ++rep.cases;
  rep.worst_margin = std::min(rep.worst_margin, margin);
  if (margin < 0) rep.violations.push_back({what, margin, detail});
}

}  // namespace verify_detail

/// One-variable sample for the bounded / growth derivative estimates:
/// bounded: |g| <= C on the disk implies |g'| <= C / (1 - |z|^2);
/// growth:  |g| <= C / (1 - |z|^2) implies |g'| <= 4C / (1 - |z|^2)^2.
/// C is the documented hypothesis constant of the sample.
enum class DiskKind { bounded, growth };

struct DiskSample {
  std::string name;
  std::function<cxd(cxd)> g;
  std::function<cxd(cxd)> dg;
  double C;
  DiskKind kind;
};

inline std::vector<DiskSample> disk_samples() {
  std::vector<DiskSample> s;
  s.push_back({"z", [](cxd z) { return z; }, [](cxd) { return cxd{1.0, 0.0}; }, 1.0,
               DiskKind::bounded});
  s.push_back({"z^2", [](cxd z) { return z * z; }, [](cxd z) { return 2.0 * z; }, 1.0,
               DiskKind::bounded});

  // Degree-3 Blaschke product with zeros 0, 0.5, -0.3i.
  auto factor = [](cxd z, cxd a) { return (z - a) / (cxd{1.0, 0.0} - std::conj(a) * z); };
  auto dfactor = [](cxd z, cxd a) {
    const cxd den = cxd{1.0, 0.0} - std::conj(a) * z;
    return (cxd{1.0, 0.0} - std::conj(a) * a) / (den * den);
  };
  const std::vector<cxd> zeros = {cxd{0.0, 0.0}, cxd{0.5, 0.0}, cxd{0.0, -0.3}};
  auto blaschke = [factor, zeros](cxd z) {
    cxd p{1.0, 0.0};
    for (cxd a : zeros) p *= factor(z, a);
    return p;
  };
  auto dblaschke = [factor, dfactor, zeros](cxd z) {
    cxd sum{0.0, 0.0};
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      cxd term = dfactor(z, zeros[k]);
      for (std::size_t j = 0; j < zeros.size(); ++j)
        if (j != k) term *= factor(z, zeros[j]);
      sum += term;
    }
    return sum;
  };
  s.push_back({"blaschke3", blaschke, dblaschke, 1.0, DiskKind::bounded});

  // |1 - z^2| >= 1 - |z|^2, so the hypothesis constant is 1.
  s.push_back({"1/(1-z^2)",
               [](cxd z) { return cxd{1.0, 0.0} / (cxd{1.0, 0.0} - z * z); },
               [](cxd z) {
                 const cxd d = cxd{1.0, 0.0} - z * z;
                 return 2.0 * z / (d * d);
               },
               1.0, DiskKind::growth});

  // |1 - z| >= 1 - |z| = (1 - |z|^2)/(1 + |z|), so the constant is 2.
  s.push_back({"1/(1-z)",
               [](cxd z) { return cxd{1.0, 0.0} / (cxd{1.0, 0.0} - z); },
               [](cxd z) {
                 const cxd d = cxd{1.0, 0.0} - z;
                 return cxd{1.0, 0.0} / (d * d);
               },
               2.0, DiskKind::growth});
  return s;
}

struct DiskGrid {
  int radii = 12;
  int phases = 16;
  double max_radius = 0.95;
};

/// Grid audit of one disk sample: the hypothesis is verified first at every
/// grid point (failure skips the point rather than flagging it), then the
/// derivative bound is asserted with tolerance 1e-9.
inline SuiteReport disk_lemma_check(const DiskSample& sample, DiskGrid grid = DiskGrid{}) {
  SuiteReport rep;
  rep.name = std::string("disk:") + sample.name;
  for (int i = 0; i < grid.radii; ++i) {
    const double r = grid.max_radius * (i + 1) / grid.radii;
    for (int p = 0; p < grid.phases; ++p) {
      const double th = 6.28318530717958647692 * p / grid.phases;
      const cxd z = r * cxd{std::cos(th), std::sin(th)};
      const double om = 1.0 - std::norm(z);
      const double hyp_bound =
          sample.kind == DiskKind::bounded ? sample.C : sample.C / om;
      if (std::abs(sample.g(z)) > hyp_bound + 1e-12) {
        ++rep.skipped;
        continue;
      }
      const double rhs = sample.kind == DiskKind::bounded ? sample.C / om
                                                          : 4.0 * sample.C / (om * om);
      const double lhs = std::abs(sample.dg(z));
      verify_detail::record(rep, rhs + 1e-9 - lhs, "derivative bound at sampled point",
                            "sample=" + sample.name + " z=" + verify_detail::fmt(z) +
                                " lhs=" + verify_detail::fmt(lhs) +
                                " rhs=" + verify_detail::fmt(rhs));
    }
  }
  return rep;
}

struct TensorGrid {
  int radii = 3;
  int phases = 6;
  int v_phases = 6;
  double max_radius = 0.9;
};

namespace verify_detail {

/// Enumerates the per-axis polar product grid; body(z).
template <typename Body>
void for_grid_points(int n, const TensorGrid& grid, Body&& body) {
  const int per_axis = grid.radii * grid.phases;
  std::vector<int> idx(n, 0);
  while (true) {
    Point z(n);
    for (int i = 0; i < n; ++i) {
      const double r = grid.max_radius * (idx[i] / grid.phases + 1) / grid.radii;
      const double th = 6.28318530717958647692 * (idx[i] % grid.phases) / grid.phases;
      z[i] = r * cxd{std::cos(th), std::sin(th)};
    }
    body(z);
    int axis = 0;
    while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == n) break;
  }
}

/// Enumerates torus directions |v_i| = 1 with the first phase fixed at 1
/// (a global phase does not move |S(v)|); body(v).
template <typename Body>
void for_torus_directions(int n, int phases, Body&& body) {
  std::vector<int> idx(n - 1, 0);
  while (true) {
    std::vector<cxd> v(n);
    v[0] = cxd{1.0, 0.0};
    for (int i = 1; i < n; ++i) {
      const double th = 6.28318530717958647692 * idx[i - 1] / phases;
      v[i] = cxd{std::cos(th), std::sin(th)};
    }
    body(v);
    int axis = 0;
    while (axis < n - 1 && ++idx[axis] == phases) idx[axis++] = 0;
    if (axis == n - 1) break;
  }
}

}  // namespace verify_detail

/// Componentwise tensor bounds under a measured sup-norm alpha, checked on a
/// polar z-grid against torus directions |v|_inf = 1:
///   |S^k(v)| <= 3 n alpha / (1 - |z|_inf^2)
///   |S^0(v)| <= (5 n^2 alpha + 2 n (n+1) alpha^2) / (1 - |z|_inf^2)^2.
inline SuiteReport tensor_bounds_check(const MapExpr& f, double alpha,
                                       TensorGrid grid = TensorGrid{}) {
  const int n = f.dim();
  SuiteReport rep;
  rep.name = "tensor_bounds";
  const double num_k = 3.0 * n * alpha;
  const double num_0 = 5.0 * n * n * alpha + 2.0 * n * (n + 1.0) * alpha * alpha;
  verify_detail::for_grid_points(n, grid, [&](const Point& z) {
    const SchwarzianTensor t = schwarzian_tensor(f, z);
    const double om = 1.0 - max_abs(z) * max_abs(z);
    const double rhs_k = num_k / om;
    const double rhs_0 = num_0 / (om * om);
    verify_detail::for_torus_directions(n, grid.v_phases, [&](const std::vector<cxd>& v) {
      const std::vector<cxd> sv = apply_tensor(t, v);
      for (int k = 0; k < n; ++k) {
        verify_detail::record(
            rep, rhs_k + 1e-7 * std::max(1.0, rhs_k) - std::abs(sv[k]),
            "component tensor bound",
            "z=" + verify_detail::fmt(z) + " v=" + verify_detail::fmt(v) + " k=" +
                std::to_string(k) + " lhs=" + verify_detail::fmt(std::abs(sv[k])) + " rhs=" +
                verify_detail::fmt(rhs_k) + " alpha=" + verify_detail::fmt(alpha));
      }
      const cxd s0 = apply_tensor0(t, v);
      verify_detail::record(
          rep, rhs_0 + 1e-7 * std::max(1.0, rhs_0) - std::abs(s0), "scalar tensor bound",
          "z=" + verify_detail::fmt(z) + " v=" + verify_detail::fmt(v) + " lhs=" +
              verify_detail::fmt(std::abs(s0)) + " rhs=" + verify_detail::fmt(rhs_0) +
              " alpha=" + verify_detail::fmt(alpha));
    });
  });
  return rep;
}

/// Transport-coefficient bounds along a fixed direction zeta (|zeta_i| <= 1):
/// with A(j,k) = sum_i zeta_i S^k(i,j) and B(j) = sum_i zeta_i S^0(i,j),
///   (1 - |z|_inf^2)   |A|_2 <= 1.6 n sqrt(n) alpha
///   (1 - |z|_inf^2)^2 |B|   <= c1 alpha + c2 alpha^2
/// and additionally <= 4.5 n sqrt(n) alpha when n sqrt(n) alpha <= 3 sqrt 2 - 4.
inline SuiteReport AB_bounds_check(const MapExpr& f, double alpha, const std::vector<cxd>& zeta,
                                   TensorGrid grid = TensorGrid{}) {
  const int n = f.dim();
  if (static_cast<int>(zeta.size()) != n)
    throw precondition_error("AB_bounds_check: direction dimension mismatch");
  for (const cxd& c : zeta)
    if (std::abs(c) > 1.0 + 1e-12)
      throw precondition_error("AB_bounds_check: direction must satisfy |zeta_i| <= 1");
  SuiteReport rep;
  rep.name = "ab_bounds";
  const double rn = std::sqrt(static_cast<double>(n));
  const double rhs_a = 1.6 * n * rn * alpha;
  const double c1 = 2.0 * std::sqrt(2.0 * n) / (n - 1.0) * (2.0 + (n - 1.0) * (n - 1.0));
  const double c2 = 2.0 * rn / (n - 1.0) * (n + (n - 1.0) * (n - 1.0));
  const double rhs_b = c1 * alpha + c2 * alpha * alpha;
  const bool small_branch = n * rn * alpha <= 3.0 * std::sqrt(2.0) - 4.0;
  const double rhs_b_small = 4.5 * n * rn * alpha;

  verify_detail::for_grid_points(n, grid, [&](const Point& z) {
    const SchwarzianTensor t = schwarzian_tensor(f, z);
    CMat A(n, n);
    std::vector<cxd> B(n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        cxd acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) acc += zeta[i] * t.S[k](i, j);
        A(j, k) = acc;
      }
      cxd acc0{0.0, 0.0};
      for (int i = 0; i < n; ++i) acc0 += zeta[i] * t.S0(i, j);
      B[j] = acc0;
    }
    const double om = 1.0 - max_abs(z) * max_abs(z);
    const double lhs_a = om * spectral_norm(A);
    double bn = 0;
    for (const cxd& c : B) bn += std::norm(c);
    const double lhs_b = om * om * std::sqrt(bn);
    const std::string where = "z=" + verify_detail::fmt(z) + " zeta=" + verify_detail::fmt(zeta) +
                              " alpha=" + verify_detail::fmt(alpha);
    verify_detail::record(rep, rhs_a + 1e-7 * std::max(1.0, rhs_a) - lhs_a,
                          "first-order coefficient bound",
                          where + " lhs=" + verify_detail::fmt(lhs_a) + " rhs=" +
                              verify_detail::fmt(rhs_a));
    verify_detail::record(rep, rhs_b + 1e-7 * std::max(1.0, rhs_b) - lhs_b,
                          "zeroth-order coefficient bound",
                          where + " lhs=" + verify_detail::fmt(lhs_b) + " rhs=" +
                              verify_detail::fmt(rhs_b));
    if (small_branch)
      verify_detail::record(rep, rhs_b_small + 1e-7 * std::max(1.0, rhs_b_small) - lhs_b,
                            "small-alpha zeroth-order bound",
                            where + " lhs=" + verify_detail::fmt(lhs_b) + " rhs=" +
                                verify_detail::fmt(rhs_b_small));
  });
  return rep;
}

/// Composition norm inequality at matched points: for psi an automorphism
/// (a Bergman isometry), ||S_{f o psi}(z)|| <= ||S_psi(z)|| + ||S_f(psi(z))||.
/// `scale` multiplies the right-hand side; 1 is the honest check and values
/// below about 0.9 must produce violations whenever the tensors are nonzero.
inline SuiteReport composition_norm_check(const MapExpr& f, const MapExpr& psi, double scale = 1.0,
                                          TensorGrid grid = TensorGrid{},
                                          std::uint64_t seed = kDefaultSeed) {
  if (psi.kind() != MapKind::automorphism)
    throw precondition_error("composition_norm_check: inner map must be an automorphism");
  const int n = f.dim();
  SuiteReport rep;
  rep.name = "composition_norm";
  const MapExpr chain = MapExpr::compose(f, psi);
  verify_detail::for_grid_points(n, grid, [&](const Point& z) {
    const Point w = eval_map(psi, z);
    const double lhs = operator_norm(chain, z, 4, 1e-12, seed).value;
    const double rhs =
        scale * (operator_norm(psi, z, 4, 1e-12, seed).value +
                 operator_norm(f, w, 4, 1e-12, seed).value) +
        1e-7;
    verify_detail::record(rep, rhs - lhs, "composition norm inequality",
                          "z=" + verify_detail::fmt(z) + " w=" + verify_detail::fmt(w) +
                              " lhs=" + verify_detail::fmt(lhs) + " rhs=" +
                              verify_detail::fmt(rhs) + " scale=" + verify_detail::fmt(scale));
  });
  return rep;
}

struct SuiteConfig {
  std::uint64_t seed = kDefaultSeed;
  /// Multiplies every measured alpha (and the composition right-hand side).
  /// 1.0 is the honest run; understating alpha must surface violations.
  double alpha_scale = 1.0;
  bool quick = true;
  double radius = 0.9;
  int threads = 0;
};

struct SuiteRun {
  std::vector<SuiteReport> suites;
  long total_cases = 0;
  long total_violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool pass = true;
};

/// Deterministic batch over the built-in samples: disk derivative bounds,
/// tensor and coefficient bounds with measured alpha, composition norms, the
/// Moebius annihilation spot check, and the cross-module residuals.
inline SuiteRun run_suite(const SuiteConfig& cfg = SuiteConfig{}) {
  SuiteRun run;
  auto add = [&](SuiteReport rep) {
    run.total_cases += rep.cases;
    run.total_violations += static_cast<long>(rep.violations.size());
    run.worst_margin = std::min(run.worst_margin, rep.worst_margin);
    if (!rep.pass()) run.pass = false;
    run.suites.push_back(std::move(rep));
  };

  DiskGrid dgrid;
  if (cfg.quick) dgrid = DiskGrid{8, 12, 0.95};
  for (const DiskSample& s : disk_samples()) add(disk_lemma_check(s, dgrid));

  TensorGrid tgrid = cfg.quick ? TensorGrid{3, 6, 6, cfg.radius} : TensorGrid{4, 10, 10, cfg.radius};
  const SupNormGrid sgrid = cfg.quick ? SupNormGrid{6, 8} : SupNormGrid{10, 12};

  const int n = 2;
  std::vector<NamedMap> family;
  for (NamedMap& m : catalog(n)) {
    if (m.name == "automorphism_real" || m.name == "automorphism_complex" ||
        m.name == "perturbation_quadratic" || m.name == "perturbation_cubic")
      family.push_back(std::move(m));
  }
  Rng rng(cfg.seed);
  for (const NamedMap& m : family) {
    const double alpha =
        cfg.alpha_scale *
        sup_norm(m.map, cfg.radius, sgrid, 1, 0, 1e-10, cfg.seed, cfg.threads).value;
    SuiteReport tb = tensor_bounds_check(m.map, alpha, tgrid);
    tb.name = "tensor_bounds:" + m.name;
    add(std::move(tb));

    std::vector<cxd> ones(n, cxd{1.0, 0.0});
    SuiteReport ab = AB_bounds_check(m.map, alpha, ones, tgrid);
    ab.name = "ab_bounds:" + m.name + ":ones";
    add(std::move(ab));
    std::vector<cxd> zr(n);
    for (int i = 0; i < n; ++i) zr[i] = rng.unit_phase();
    SuiteReport abr = AB_bounds_check(m.map, alpha, zr, tgrid);
    abr.name = "ab_bounds:" + m.name + ":random";
    add(std::move(abr));
  }

  const TensorGrid cgrid{2, 4, 4, 0.7};
  std::vector<cxd> a_real(n, cxd{0.0, 0.0});
  a_real[0] = cxd{0.5, 0.0};
  {
    SuiteReport c1 = composition_norm_check(catalog_detail::single_pole_moebius(n, cxd{0.5, 0.0}),
                                            MapExpr::automorphism(a_real), cfg.alpha_scale, cgrid,
                                            cfg.seed);
    c1.name = "composition:moebius_x_automorphism";
    add(std::move(c1));
    SuiteReport c2 = composition_norm_check(catalog_detail::cyclic_perturbation(n, 0.05, 2),
                                            random_automorphism(rng, n, 0.5), cfg.alpha_scale,
                                            cgrid, cfg.seed);
    c2.name = "composition:perturbation_x_automorphism";
    add(std::move(c2));
  }

  {
    SuiteReport ann;
    ann.name = "moebius_annihilation";
    const int maps = cfg.quick ? 5 : 20;
    for (int m = 0; m < maps; ++m) {
      const MapExpr f = random_moebius(rng, n);
      for (int p = 0; p < 10; ++p) {
        const Point z = random_point(rng, n, 0.6);
        const double worst = tensor_max_abs(schwarzian_tensor(f, z));
        verify_detail::record(ann, 1e-9 - worst, "moebius tensor annihilation",
                              "map_index=" + std::to_string(m) + " z=" + verify_detail::fmt(z) +
                                  " max_entry=" + verify_detail::fmt(worst));
      }
    }
    add(std::move(ann));
  }

  {
    SuiteReport cross;
    cross.name = "cross_properties";
    for (int i = 0; i < (cfg.quick ? 3 : 10); ++i) {
      const MapExpr f = random_automorphism(rng, n, 0.5);
      const MapExpr g = random_moebius(rng, n);
      const Point z = random_point(rng, n, 0.5);
      verify_detail::record(cross, 1e-8 - chain_rule_residual(g, f, z), "chain rule residual",
                            "z=" + verify_detail::fmt(z));
      std::vector<cxd> v = rng.unit_vector(n);
      verify_detail::record(cross, 1e-7 - hessian_residual(f, z, v), "hessian identity residual",
                            "z=" + verify_detail::fmt(z) + " v=" + verify_detail::fmt(v));
      verify_detail::record(cross, 1e-9 - canonical_residual(schwarzian_tensor(f, z)),
                            "canonical trace residual", "z=" + verify_detail::fmt(z));
    }
    add(std::move(cross));
  }

  return run;
}

}  // namespace polyschwarz
