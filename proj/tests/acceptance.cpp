// Acceptance gate: one line per criterion, exit 0 only if every criterion
// holds. Each check names the behavior it pins and the tolerance it uses.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "polyschwarz/catalog.hpp"
#include "polyschwarz/cauchy.hpp"
#include "polyschwarz/comparison.hpp"
#include "polyschwarz/order.hpp"
#include "polyschwarz/verify.hpp"

namespace ps = polyschwarz;
using ps::cxd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double max_canonical = 0.0;

void track_canonical(const ps::SchwarzianTensor& t) {
  max_canonical = std::max(max_canonical, ps::canonical_residual(t));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// 1: random Moebius maps have identically vanishing tensor.
Outcome moebius_annihilation() {
  ps::Rng rng(ps::kDefaultSeed);
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int m = 0; m < 50; ++m) {
      const ps::MapExpr f = ps::random_moebius(rng, n);
      for (int p = 0; p < 50; ++p) {
        const ps::SchwarzianTensor t = ps::schwarzian_tensor(f, ps::random_point(rng, n, 0.6));
        track_canonical(t);
        worst = std::max(worst, ps::tensor_max_abs(t));
      }
    }
  }
  return {worst < 1e-9, "100 maps x 50 points, max entry " + fmt(worst) + " (tol 1e-9)"};
}

// 2: the composition cocycle identity holds across the catalog.
Outcome chain_rule() {
  ps::Rng rng(ps::kDefaultSeed);
  double worst = 0.0;
  for (int n : {2, 3}) {
    const std::vector<ps::NamedMap> maps = ps::catalog(n);
    for (int pair = 0; pair < 25; ++pair) {
      const auto pick = [&]() -> const ps::MapExpr& {
        auto i = static_cast<std::size_t>(rng.uniform() * maps.size());
        if (i >= maps.size()) i = maps.size() - 1;
        return maps[i].map;
      };
      const ps::MapExpr& g = pick();
      const ps::MapExpr& f = pick();
      for (int p = 0; p < 20; ++p) {
        const ps::Point z = ps::random_point(rng, n, 0.25);
        worst = std::max(worst, ps::chain_rule_residual(g, f, z));
        track_canonical(ps::schwarzian_tensor(ps::MapExpr::compose(g, f), z));
        track_canonical(ps::schwarzian_tensor(f, z));
      }
    }
  }
  return {worst < 1e-8, "50 pairs x 20 points, max residual " + fmt(worst) + " (tol 1e-8)"};
}

// 3: the Jacobian-power function solves the second-order system.
Outcome jacobian_power_solution() {
  ps::Rng rng(ps::kDefaultSeed);
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (const ps::NamedMap& m : ps::catalog(n)) {
      for (int p = 0; p < 20; ++p) {
        const ps::Point z = ps::random_point(rng, n, 0.4);
        track_canonical(ps::schwarzian_tensor(m.map, z));
        for (int v = 0; v < 10; ++v)
          worst = std::max(worst, ps::hessian_residual(m.map, z, rng.unit_vector(n)));
      }
    }
  }
  return {worst < 1e-7,
          "all catalog maps, 20 points x 10 directions, max residual " + fmt(worst) +
              " (tol 1e-7)"};
}

// 4: every tensor produced above satisfies the trace normalization.
Outcome canonical_trace() {
  return {max_canonical < 1e-9,
          "max trace residual over all prior tensors " + fmt(max_canonical) + " (tol 1e-9)"};
}

// 5: automorphism norm closed form at the origin and the global rim bound.
Outcome automorphism_norm() {
  const ps::MapExpr psi0 = ps::MapExpr::automorphism({cxd{0.5, 0.0}, cxd{0.0, 0.0}});
  const double at_zero = ps::operator_norm(psi0, ps::origin(2)).value;
  const double oracle = std::sqrt(6.0) / 9.0;
  const double err = std::abs(at_zero - oracle);
  if (err > 1e-6) return {false, "origin norm " + fmt(at_zero) + " off oracle by " + fmt(err)};

  ps::Rng rng(ps::kDefaultSeed);
  double worst_excess = -1e300;
  for (int m = 0; m < 50; ++m) {
    const ps::MapExpr psi = ps::random_automorphism(rng, 2, 0.6);
    double amax = 0.0;
    for (const cxd& a : psi.params()) amax = std::max(amax, std::abs(a));
    const double sup = ps::sup_norm(psi, 0.95, ps::SupNormGrid{6, 8}, 1).value;
    worst_excess = std::max(worst_excess, sup - 2.0 * std::sqrt(2.0) * amax);
  }
  return {worst_excess <= 1e-9, "origin error " + fmt(err) + " (tol 1e-6); worst excess over "
                                    "2*sqrt(2)*|a| on 50 rim sups " +
                                    fmt(worst_excess) + " (tol 1e-9)"};
}

// 6: the componentwise and coefficient bound suites hold with measured alpha.
Outcome bound_suites() {
  ps::SuiteConfig cfg;
  cfg.quick = false;
  const ps::SuiteRun run = ps::run_suite(cfg);
  long cases = 0, violations = 0;
  for (const ps::SuiteReport& rep : run.suites) {
    if (rep.name.rfind("tensor_bounds:", 0) == 0 || rep.name.rfind("ab_bounds:", 0) == 0) {
      cases += rep.cases;
      violations += static_cast<long>(rep.violations.size());
    }
  }
  return {violations == 0 && cases > 0,
          std::to_string(cases) + " bound cases, " + std::to_string(violations) + " violations"};
}

// 7: the comparison Riccati equation completes below the threshold constant
// and blows up above it, with monotone statuses across the constant.
Outcome riccati_threshold() {
  const ps::OdeOutcome at = ps::riccati_solve(1.0 / 6.1, 0.999);
  if (at.status.kind != ps::OdeStatusKind::completed || !at.envelope_ok || at.worst_margin < 0)
    return {false, "threshold constant failed to complete under the envelope"};

  const ps::OdeOutcome over = ps::riccati_solve(0.2, 1.0 - 1e-6);
  const double width = over.status.bracket_hi - over.status.bracket_lo;
  if (over.status.kind != ps::OdeStatusKind::blowup || over.status.where >= 1.0 || width > 1e-6)
    return {false, "blow-up at c = 0.2 missing or bracket too wide (" + fmt(width) + ")"};

  bool seen_blowup = false;
  for (int i = 0; i < 20; ++i) {
    const double c = 0.5 * i / 19.0;
    const ps::OdeOutcome out = ps::riccati_solve(c, 1.0 - 1e-6);
    const bool blew = out.status.kind == ps::OdeStatusKind::blowup;
    if (seen_blowup && !blew)
      return {false, "status not monotone at c = " + fmt(c)};
    seen_blowup = seen_blowup || blew;
  }
  return {true, "threshold margin " + fmt(at.worst_margin) + ", blow-up bracket " + fmt(width) +
                    ", 20-point grid monotone"};
}

// 8: equality solutions of the linear comparison equation stay below the
// closed-form envelopes across the coefficient grid.
Outcome linear_envelopes() {
  double worst = 1e300;
  for (int ia = 0; ia <= 8; ++ia) {
    for (int ib = 0; ib <= 20; ++ib) {
      const ps::OdeOutcome out =
          ps::linear_comparison_check(0.25 * ia, 0.25 * ib, 0.99);
      if (out.status.kind != ps::OdeStatusKind::completed)
        return {false, "integration did not complete at a = " + fmt(0.25 * ia) +
                           ", b = " + fmt(0.25 * ib)};
      worst = std::min(worst, out.worst_margin);
    }
  }
  return {worst >= -1e-6,
          "189 coefficient pairs, worst relative margin " + fmt(worst) + " (tol 1e-6)"};
}

// 9: ray transport reproduces the closed-form solution of a Moebius source.
Outcome transport_fidelity() {
  ps::CMat m(3, 3);
  m(0, 0) = 1.0;
  m(0, 1) = -0.5;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  const ps::MapExpr f = ps::MapExpr::moebius(2, std::move(m));
  const ps::Jet3 u0 = ps::u0_jet(ps::map_jet(f, ps::origin(2)));
  std::vector<cxd> grad0 = {u0.grad(0), u0.grad(1)};
  const ps::OdeOutcome out =
      ps::transport_ray(f, {cxd{1.0, 0.0}, cxd{0.0, 0.0}}, u0.value, grad0, 0.99);
  if (out.status.kind != ps::OdeStatusKind::completed)
    return {false, "transport did not reach t = 0.99"};
  double worst = 0.0;
  for (const ps::OdeSample& s : out.samples) {
    worst = std::max(worst, std::abs(s.v[0] - (1.0 - 0.5 * s.t)));  // re u
    worst = std::max(worst, std::abs(s.v[1]));                      // im u
  }
  return {worst < 1e-8, std::to_string(out.samples.size()) + " samples, max |u - (1 - t/2)| " +
                            fmt(worst) + " (tol 1e-8)"};
}

// 10: the Moebius family order is exactly n + 1 and the search finds it.
Outcome moebius_family_order() {
  for (int n = 2; n <= 6; ++n) {
    const ps::MoebiusOrderResult r = ps::moebius_order(n);
    if (r.value != static_cast<double>(n + 1))
      return {false, "closed form wrong at n = " + std::to_string(n)};
    if (std::abs(r.search_value - r.value) > 1e-6)
      return {false, "search off by " + fmt(std::abs(r.search_value - r.value)) +
                         " at n = " + std::to_string(n)};
  }
  return {true, "n + 1 exact and search agrees within 1e-6 for n in {2..6}"};
}

// 11: dilation contracts the measured sup-norm by the predicted factor and
// scales the Jacobian gradient exactly.
Outcome dilation_contraction() {
  double worst_excess = -1e300;
  double worst_grad = 0.0;
  for (const ps::NamedMap& m : ps::catalog(2)) {
    for (double r : {0.1, 0.2, 0.3, 0.4}) {
      for (double s : {0.5, 0.7, 0.9}) {
        const ps::DilationReport rep =
            ps::dilation_contraction_check(m.map, r, s, ps::SupNormGrid{6, 8});
        worst_excess = std::max(worst_excess, rep.norm_g - rep.factor * rep.norm_f);
        worst_grad = std::max(worst_grad, std::abs(rep.grad_g - s * rep.grad_f));
      }
    }
  }
  const bool ok = worst_excess <= 1e-7 && worst_grad <= 1e-10;
  return {ok, "120 (map, r, s) cells, worst contraction excess " + fmt(worst_excess) +
                  " (tol 1e-7), worst gradient mismatch " + fmt(worst_grad) + " (tol 1e-10)"};
}

// 12: a small perturbation family satisfies the transported-ratio bound and
// the two-sided growth envelopes along 32 rays.
Outcome small_alpha_envelopes() {
  const ps::MapExpr f = ps::catalog_detail::cyclic_perturbation(2, 0.002, 2);
  const double alpha = ps::sup_norm(f, 0.95, ps::SupNormGrid{6, 8}, 1).value;
  const ps::EnvelopeReport rep = ps::envelope_check_u(f, alpha, 32, 0.95);
  if (!rep.applicable)
    return {false, "measured threshold value " + fmt(rep.threshold_value) + " exceeds 1/6.1"};
  return {rep.ok && rep.violations == 0,
          "alpha " + fmt(alpha) + ", threshold value " + fmt(rep.threshold_value) +
              ", 32 rays, violations " + std::to_string(rep.violations) + ", worst ratio margin " +
              fmt(rep.worst_ratio_margin)};
}

// 13: propagated jets match the contour-integration oracle on the catalog.
Outcome jets_match_oracle() {
  ps::Rng rng(ps::kDefaultSeed);
  double worst = 0.0;
  for (int n : {2, 3}) {
    const int nodes = n == 2 ? 32 : 16;
    for (const ps::NamedMap& m : ps::catalog(n)) {
      for (int p = 0; p < 50; ++p) {
        const ps::Point z = ps::random_point(rng, n, 0.45);
        const std::vector<ps::Jet3> jets = ps::eval_jets(m.map, ps::seed_jets(z));
        const std::vector<ps::Jet3> oracle = ps::cauchy_jets(m.map, z, nodes);
        for (int c = 0; c < n; ++c) {
          auto rel = [&](cxd got, cxd want) {
            worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
          };
          rel(jets[c].value, oracle[c].value);
          for (int i = 0; i < n; ++i) {
            rel(jets[c].grad(i), oracle[c].grad(i));
            for (int j = i; j < n; ++j) {
              rel(jets[c].hess(i, j), oracle[c].hess(i, j));
              for (int k = j; k < n; ++k) rel(jets[c].third(i, j, k), oracle[c].third(i, j, k));
            }
          }
        }
      }
    }
  }
  return {worst < 1e-8, "all catalog maps, 50 points each, worst relative error " + fmt(worst) +
                            " (tol 1e-8)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;  // 0 = no individual budget
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"moebius tensor annihilation", moebius_annihilation, 10.0},
      {"composition cocycle residual", chain_rule, 20.0},
      {"jacobian-power system solution", jacobian_power_solution, 0.0},
      {"canonical trace normalization", canonical_trace, 0.0},
      {"automorphism operator norm", automorphism_norm, 0.0},
      {"tensor and coefficient bound suites", bound_suites, 60.0},
      {"riccati threshold and blow-up", riccati_threshold, 5.0},
      {"linear comparison envelopes", linear_envelopes, 30.0},
      {"ray transport fidelity", transport_fidelity, 1.0},
      {"moebius family order", moebius_family_order, 0.0},
      {"dilation contraction", dilation_contraction, 0.0},
      {"small-alpha transport envelopes", small_alpha_envelopes, 0.0},
      {"jets match the contour oracle", jets_match_oracle, 30.0},
  };

  std::printf("acceptance suite: %zu criteria\n", criteria.size());
  const auto suite_start = std::chrono::steady_clock::now();
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    std::string detail = out.detail;
    if (pass && criteria[i].budget_seconds > 0 && secs > criteria[i].budget_seconds) {
      pass = false;
      detail += " [exceeded " + fmt(criteria[i].budget_seconds) + "s budget]";
    }
    passed += pass ? 1 : 0;
    std::printf("[%2zu] %s  %-36s %s (%.2fs)\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].name,
                detail.c_str(), secs);
    std::fflush(stdout);
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  std::printf("summary: %d/%zu passed in %.1fs\n", passed, criteria.size(), total);
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
