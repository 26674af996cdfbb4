#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "polyschwarz/catalog.hpp"
#include "polyschwarz/verify.hpp"

namespace ps = polyschwarz;
using ps::cxd;

TEST(DiskLemma, BuiltInSamplesPassWithoutSkips) {
  for (const ps::DiskSample& s : ps::disk_samples()) {
    const ps::SuiteReport rep = ps::disk_lemma_check(s);
    EXPECT_TRUE(rep.pass()) << s.name;
    EXPECT_EQ(rep.skipped, 0) << s.name;
    EXPECT_EQ(rep.cases, 12 * 16) << s.name;
    EXPECT_GT(rep.worst_margin, 0.0) << s.name;
  }
}

TEST(DiskLemma, HypothesisFailurePointsAreSkippedNotFlagged) {
  // Constant 2 exceeds 1/(1 - |z|^2) on inner rings; dg = 0 keeps the
  // conclusion trivially true wherever the hypothesis does hold.
  ps::DiskSample s{"const2", [](cxd) { return cxd{2.0, 0.0}; }, [](cxd) { return cxd{0.0, 0.0}; },
                   1.0, ps::DiskKind::growth};
  const ps::SuiteReport rep = ps::disk_lemma_check(s);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.skipped, 0);
  EXPECT_GT(rep.cases, 0);
  EXPECT_EQ(rep.cases + rep.skipped, 12 * 16);
}

TEST(TensorBounds, IdentityIsTrivialAtZeroAlpha) {
  const ps::SuiteReport rep = ps::tensor_bounds_check(ps::MapExpr::identity(2), 0.0);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.cases, 0);
}

TEST(TensorBounds, AutomorphismPassesWithMeasuredAlpha) {
  std::vector<cxd> a = {cxd{0.3, 0.0}, cxd{0.0, 0.0}};
  const ps::MapExpr f = ps::MapExpr::automorphism(a);
  const double alpha = ps::sup_norm(f, 0.9, ps::SupNormGrid{6, 8}, 1).value;
  EXPECT_GT(alpha, 0.0);
  const ps::SuiteReport rep = ps::tensor_bounds_check(f, alpha);
  EXPECT_TRUE(rep.pass());
  EXPECT_GT(rep.worst_margin, 0.0);

  std::vector<cxd> ones(2, cxd{1.0, 0.0});
  const ps::SuiteReport ab = ps::AB_bounds_check(f, alpha, ones);
  EXPECT_TRUE(ab.pass());
  EXPECT_GT(ab.worst_margin, 0.0);
}

TEST(TensorBounds, UnderstatedAlphaProducesLocatedViolations) {
  std::vector<cxd> a = {cxd{0.5, 0.0}, cxd{0.0, 0.0}};
  const ps::MapExpr f = ps::MapExpr::automorphism(a);
  // Far below the measured sup-norm: the component bound must break.
  const ps::SuiteReport rep = ps::tensor_bounds_check(f, 1e-6);
  EXPECT_FALSE(rep.pass());
  ASSERT_FALSE(rep.violations.empty());
  EXPECT_LT(rep.violations.front().margin, 0.0);
  EXPECT_NE(rep.violations.front().detail.find("z="), std::string::npos);
  EXPECT_NE(rep.violations.front().detail.find("lhs="), std::string::npos);
}

TEST(ABBounds, RejectsBadDirections) {
  const ps::MapExpr f = ps::MapExpr::identity(2);
  EXPECT_THROW(ps::AB_bounds_check(f, 0.1, {cxd{1.0, 0.0}}), ps::precondition_error);
  EXPECT_THROW(ps::AB_bounds_check(f, 0.1, {cxd{2.0, 0.0}, cxd{0.0, 0.0}}),
               ps::precondition_error);
}

TEST(CompositionNorm, HonestScaleHoldsForMoebiusOuter) {
  // Moebius outer maps have vanishing tensor, so the chained norm equals the
  // automorphism's and the inequality holds with margin ~ ||S_f(psi(z))||.
  const ps::MapExpr f = ps::catalog_detail::single_pole_moebius(2, cxd{0.5, 0.0});
  std::vector<cxd> a = {cxd{0.4, 0.0}, cxd{0.2, 0.1}};
  const ps::MapExpr psi = ps::MapExpr::automorphism(a);
  const ps::SuiteReport rep =
      ps::composition_norm_check(f, psi, 1.0, ps::TensorGrid{2, 4, 4, 0.7});
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.cases, 8 * 8);
}

TEST(CompositionNorm, HalfScaleIsFalsified) {
  const ps::MapExpr f = ps::catalog_detail::single_pole_moebius(2, cxd{0.5, 0.0});
  std::vector<cxd> a = {cxd{0.4, 0.0}, cxd{0.2, 0.1}};
  const ps::MapExpr psi = ps::MapExpr::automorphism(a);
  const ps::SuiteReport rep =
      ps::composition_norm_check(f, psi, 0.5, ps::TensorGrid{2, 4, 4, 0.7});
  EXPECT_FALSE(rep.pass());
  EXPECT_NE(rep.violations.front().detail.find("scale="), std::string::npos);
}

TEST(CompositionNorm, InnerMapMustBeAutomorphism) {
  const ps::MapExpr f = ps::MapExpr::identity(2);
  EXPECT_THROW(ps::composition_norm_check(f, f, 1.0), ps::precondition_error);
}

TEST(Catalog, EntriesEvaluateInsideSafeRadius) {
  for (int n : {2, 3}) {
    const std::vector<ps::NamedMap> maps = ps::catalog(n);
    EXPECT_GE(maps.size(), 8u);
    for (const ps::NamedMap& m : maps) {
      EXPECT_EQ(m.map.dim(), n) << m.name;
      EXPECT_GT(m.safe_radius, 0.5) << m.name;
      ps::Point z(n, cxd{0.0, 0.0});
      z[0] = cxd{0.4 * m.safe_radius, 0.1};
      const ps::Point w = ps::eval_map(m.map, z);
      for (const cxd& c : w) EXPECT_TRUE(std::isfinite(std::abs(c))) << m.name;
      const double residual = ps::canonical_residual(ps::schwarzian_tensor(m.map, z));
      EXPECT_LT(residual, 1e-9) << m.name;
    }
  }
}

TEST(Catalog, RandomGeneratorsAreDeterministicAndValid) {
  ps::Rng rng_a(1234);
  ps::Rng rng_b(1234);
  for (int i = 0; i < 5; ++i) {
    const ps::MapExpr f = ps::random_moebius(rng_a, 2);
    const ps::MapExpr g = ps::random_moebius(rng_b, 2);
    const ps::Point z = ps::random_point(rng_a, 2, 0.5);
    const ps::Point z2 = ps::random_point(rng_b, 2, 0.5);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(z[k], z2[k]);
    const ps::Point w = ps::eval_map(f, z);
    const ps::Point w2 = ps::eval_map(g, z2);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(w[k], w2[k]);
    EXPECT_LT(ps::tensor_max_abs(ps::schwarzian_tensor(f, z)), 1e-9);
  }
  for (int i = 0; i < 5; ++i) {
    const ps::MapExpr psi = ps::random_automorphism(rng_a, 3, 0.6);
    ps::Point zero(3, cxd{0.0, 0.0});
    const ps::Point img = ps::eval_map(psi, zero);
    for (const cxd& c : img) EXPECT_LT(std::abs(c), 0.6 + 1e-12);
  }
}

TEST(RunSuite, HonestConfigurationPasses) {
  const ps::SuiteRun run = ps::run_suite();
  EXPECT_TRUE(run.pass);
  EXPECT_EQ(run.total_violations, 0);
  EXPECT_GT(run.total_cases, 1000);
  EXPECT_GT(run.worst_margin, 0.0);
  EXPECT_GE(run.suites.size(), 12u);
}

TEST(RunSuite, UnderstatedAlphaScaleIsCaughtWithWitness) {
  ps::SuiteConfig cfg;
  cfg.alpha_scale = 0.5;
  const ps::SuiteRun run = ps::run_suite(cfg);
  EXPECT_FALSE(run.pass);
  EXPECT_GT(run.total_violations, 0);
  bool composition_flagged = false;
  for (const ps::SuiteReport& rep : run.suites) {
    if (rep.name.rfind("composition:", 0) == 0 && !rep.pass()) {
      composition_flagged = true;
      EXPECT_NE(rep.violations.front().detail.find("z="), std::string::npos);
      EXPECT_NE(rep.violations.front().detail.find("lhs="), std::string::npos);
    }
  }
  EXPECT_TRUE(composition_flagged);
}

TEST(RunSuite, DeterministicAcrossRuns) {
  const ps::SuiteRun a = ps::run_suite();
  const ps::SuiteRun b = ps::run_suite();
  EXPECT_EQ(a.total_cases, b.total_cases);
  EXPECT_EQ(a.total_violations, b.total_violations);
  EXPECT_EQ(a.worst_margin, b.worst_margin);
  ASSERT_EQ(a.suites.size(), b.suites.size());
  for (std::size_t i = 0; i < a.suites.size(); ++i) {
    EXPECT_EQ(a.suites[i].name, b.suites[i].name);
    EXPECT_EQ(a.suites[i].worst_margin, b.suites[i].worst_margin);
  }
}
