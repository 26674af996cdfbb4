#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "polyschwarz/order.hpp"
#include "test_util.hpp"

namespace ps = polyschwarz;
using ps::cxd;

namespace {

ps::MapExpr moebius_single_pole(int n, double a1) {
  ps::CMat m(n + 1, n + 1);
  m(0, 0) = 1.0;
  m(0, 1) = -a1;
  for (int i = 1; i <= n; ++i) m(i, i) = 1.0;
  return ps::MapExpr::moebius(n, m);
}

ps::MapExpr squares_map(double sigma) {
  std::vector<ps::PolyTerm> terms;
  terms.push_back({0, {1, 0}, cxd{1.0, 0.0}});
  terms.push_back({1, {0, 1}, cxd{1.0, 0.0}});
  terms.push_back({0, {2, 0}, cxd{-0.5 * sigma, 0.0}});
  return ps::MapExpr::polynomial(2, terms);
}

}  // namespace

TEST(MoebiusOrder, ClosedFormAndSearchAgree) {
  const ps::MoebiusOrderResult two = ps::moebius_order(2);
  EXPECT_DOUBLE_EQ(two.value, 3.0);
  EXPECT_NEAR(two.search_value, 3.0, 1e-6);
  double sum = 0, nrm = 0;
  for (double v : two.argmax) {
    sum += v;
    nrm += v * v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_NEAR(std::sqrt(nrm), 1.0, 1e-6);  // vertex configuration

  const ps::MoebiusOrderResult three = ps::moebius_order(3);
  EXPECT_DOUBLE_EQ(three.value, 4.0);
  EXPECT_NEAR(three.search_value, 4.0, 1e-6);
  EXPECT_THROW(ps::moebius_order(1), ps::precondition_error);
}

TEST(MoebiusOrder, InteriorPointIsNotExtremal) {
  // Objective at a = (0.5, 0.5): 3 sqrt(0.5) = 2.1213... < 3.
  const double interior = 3.0 * std::sqrt(0.5);
  EXPECT_NEAR(interior, 2.1213203435596426, 1e-15);
  EXPECT_LT(interior, ps::moebius_order(2).value);
}

TEST(GradJacobian, ClosedFormsAtZero) {
  const std::vector<cxd> zero = ps::grad_jacobian_at_zero(ps::MapExpr::identity(2));
  EXPECT_CNEAR(zero[0], (cxd{0.0, 0.0}), 1e-15);
  EXPECT_CNEAR(zero[1], (cxd{0.0, 0.0}), 1e-15);

  // z / (1 - a.z) has grad J(0) = (n+1) a.
  const std::vector<cxd> moeb = ps::grad_jacobian_at_zero(moebius_single_pole(2, 0.5));
  EXPECT_CNEAR(moeb[0], (cxd{1.5, 0.0}), 1e-12);
  EXPECT_CNEAR(moeb[1], (cxd{0.0, 0.0}), 1e-12);

  // Quadratic cross perturbation: Jacobian trace has no linear part.
  std::vector<ps::PolyTerm> terms = {{0, {1, 0}, cxd{1.0, 0.0}},
                                     {1, {0, 1}, cxd{1.0, 0.0}},
                                     {0, {0, 2}, cxd{0.05, 0.0}},
                                     {1, {2, 0}, cxd{0.05, 0.0}}};
  const std::vector<cxd> pert = ps::grad_jacobian_at_zero(ps::MapExpr::polynomial(2, terms));
  EXPECT_CNEAR(pert[0], (cxd{0.0, 0.0}), 1e-12);
  EXPECT_CNEAR(pert[1], (cxd{0.0, 0.0}), 1e-12);

  std::vector<cxd> a = {cxd{0.3, 0.0}, cxd{0.0, 0.0}};
  EXPECT_THROW(ps::grad_jacobian_at_zero(ps::MapExpr::automorphism(a)), ps::precondition_error);
}

TEST(Dilation, ContractionFactorAndGradScaling) {
  const ps::MapExpr f = squares_map(0.3);
  const ps::DilationReport rep = ps::dilation_contraction_check(f, 0.4, 0.9, ps::SupNormGrid{6, 8});
  EXPECT_NEAR(rep.factor, 0.96632163265306122, 1e-15);
  EXPECT_LT(rep.factor, 1.0);
  EXPECT_TRUE(rep.contraction_ok);
  EXPECT_TRUE(rep.grad_ok);
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.grad_f, 0.3, 1e-12);
  EXPECT_NEAR(rep.grad_g, 0.27, 1e-12);
  EXPECT_GT(rep.norm_f, 0.0);
}

TEST(Dilation, UnitFactorIsIdentityCheck) {
  const ps::MapExpr f = squares_map(0.2);
  const ps::DilationReport rep = ps::dilation_contraction_check(f, 0.3, 1.0, ps::SupNormGrid{5, 6});
  EXPECT_DOUBLE_EQ(rep.factor, 1.0);
  EXPECT_NEAR(rep.ratio, 1.0, 1e-12);
  EXPECT_TRUE(rep.ok);
  EXPECT_THROW(ps::dilation_contraction_check(f, 0.45, 0.9), ps::precondition_error);
  EXPECT_THROW(ps::dilation_contraction_check(f, 0.3, 1.5), ps::precondition_error);
}

TEST(GrowthBound, FormulaAndMonotonicity) {
  // C(0.4) = 4.2; bound at alpha = alpha1 is mu1 itself.
  EXPECT_NEAR(ps::growth_bound(0.1, 0.1, 5.0, 0.4), 5.0, 1e-12);
  EXPECT_NEAR(ps::growth_bound(0.2, 0.1, 5.0, 0.4), 5.0 * std::pow(2.0, 4.2), 1e-9);
  // Small r: exponent approaches 1.
  EXPECT_NEAR(ps::growth_bound(0.3, 0.1, 5.0, 1e-6), 15.0, 1e-6);
  EXPECT_LE(ps::growth_bound(0.15, 0.1, 5.0, 0.3), ps::growth_bound(0.25, 0.1, 5.0, 0.3));
  EXPECT_THROW(ps::growth_bound(0.05, 0.1, 5.0, 0.3), ps::precondition_error);
  EXPECT_THROW(ps::growth_bound(0.2, 0.1, 5.0, 0.5), ps::precondition_error);
  EXPECT_THROW(ps::growth_bound(0.2, 0.1, -1.0, 0.3), ps::precondition_error);
}

TEST(MuRLower, MoebiusBaselineAndBudgetZero) {
  const ps::OrderReport rep = ps::mu_r_lower(2, 0.0, 0.5, 0);
  EXPECT_NEAR(rep.lambda_lower, 6.0, 1e-12);  // (n+1)/r
  EXPECT_EQ(rep.evaluations, 0);
  EXPECT_TRUE(rep.lower_bound_only);
  ASSERT_TRUE(rep.witness.has_value());
  // The witness reproduces the reported value through the jet pipeline.
  const ps::Jet3 det = ps::jacobian_det_jet(ps::map_jet(*rep.witness, ps::origin(2)));
  double nrm = 0;
  for (int j = 0; j < 2; ++j) nrm += std::norm(det.grad(j));
  EXPECT_NEAR(std::sqrt(nrm), rep.lambda_lower, 1e-9);
}

TEST(MuRLower, SearchImprovesWithAlphaBudget) {
  const ps::OrderReport base = ps::mu_r_lower(2, 0.0, 0.5, 8);
  const ps::OrderReport rich = ps::mu_r_lower(2, 0.1, 0.5, 8);
  EXPECT_GE(rich.lambda_lower, base.lambda_lower);
  EXPECT_GT(rich.lambda_lower, base.lambda_lower + 1e-3);  // sigma search must engage
  EXPECT_GT(rich.evaluations, 0);
  ASSERT_TRUE(rich.witness.has_value());
  const ps::Jet3 det = ps::jacobian_det_jet(ps::map_jet(*rich.witness, ps::origin(2)));
  double nrm = 0;
  for (int j = 0; j < 2; ++j) nrm += std::norm(det.grad(j));
  EXPECT_NEAR(std::sqrt(nrm), rich.lambda_lower, 1e-9);
  // Witness stays inside the constraint set it was projected to.
  const double measured = ps::sup_norm(*rich.witness, 0.5, ps::SupNormGrid{6, 8}, 1).value;
  EXPECT_LE(measured, 0.1 + 1e-7);
  EXPECT_TRUE(std::isnan(rich.C_r));  // r = 0.5 sits outside r^2 < 1/5
}

TEST(MuRLower, GrowthAnchorsPopulated) {
  const ps::OrderReport rep = ps::mu_r_lower(2, 0.05, 0.4, 4);
  ASSERT_EQ(rep.growth_bound_at.size(), 3u);
  EXPECT_NEAR(rep.growth_bound_at[0].second, rep.lambda_lower, 1e-9);
  EXPECT_GE(rep.growth_bound_at[1].second, rep.growth_bound_at[0].second);
  EXPECT_GE(rep.growth_bound_at[2].second, rep.growth_bound_at[1].second);
}

TEST(Covering, IdentityTorusDistance) {
  const ps::CoveringEstimate est = ps::covering_estimate(ps::MapExpr::identity(2), 0.9, 32);
  EXPECT_NEAR(est.radius_lower, 1.2727922061357855, 1e-12);  // 0.9 sqrt(2)
  EXPECT_EQ(est.boundary_samples, 32 * 32);
  EXPECT_EQ(est.skipped, 0);
  EXPECT_TRUE(est.half_radius_ok);
  EXPECT_GE(est.half_radius_min, 0.5 * est.radius_lower - 1e-9);
}

TEST(Covering, MoebiusImageAndPreconditions) {
  const ps::CoveringEstimate est = ps::covering_estimate(moebius_single_pole(2, 0.3), 0.8, 24);
  EXPECT_GT(est.radius_lower, 0.8);  // expansion beats the identity floor here
  EXPECT_TRUE(est.half_radius_ok);
  std::vector<cxd> a = {cxd{0.4, 0.0}, cxd{0.0, 0.0}};
  EXPECT_THROW(ps::covering_estimate(ps::MapExpr::automorphism(a), 0.8), ps::precondition_error);
  EXPECT_THROW(ps::covering_estimate(ps::MapExpr::identity(2), 1.2), ps::precondition_error);
}

TEST(LocalCovering, OriginReducesToHalfS0) {
  auto s0 = [](int, double) { return 0.25; };
  const double r0 = ps::local_covering_bound(ps::MapExpr::identity(2), ps::origin(2), 0.1, s0);
  EXPECT_NEAR(r0, 0.5 * 0.25, 1e-12);  // eta = 1, |z| = 0
  const ps::Point z = {cxd{0.5, 0.0}, cxd{0.0, 0.0}};
  const double rz = ps::local_covering_bound(ps::MapExpr::identity(2), z, 0.0, s0);
  EXPECT_NEAR(rz, 0.5 * 0.5 * 0.25, 1e-12);
}

TEST(GradJacobianBound, IdentityAndMoebiusClosedForm) {
  const ps::Point z = {cxd{0.5, 0.0}, cxd{0.0, 0.0}};
  const ps::GradJacobianReport id = ps::grad_jacobian_bound_check(ps::MapExpr::identity(2), z, 3.0);
  EXPECT_NEAR(id.lhs, 0.0, 1e-14);
  EXPECT_TRUE(id.ok);
  EXPECT_NEAR(id.eta, 1.0, 1e-12);

  // l = 1 - 0.3 z1 at (0.5, 0): J = l^{-3}, |grad J|_inf = 0.9 |l|^{-4}.
  const ps::GradJacobianReport mb =
      ps::grad_jacobian_bound_check(moebius_single_pole(2, 0.3), z, 3.0);
  EXPECT_NEAR(mb.lhs, 1.7241172878677219, 1e-10);
  EXPECT_GT(mb.rhs, mb.lhs);
  EXPECT_TRUE(mb.ok);

  std::vector<ps::PolyTerm> collapse = {{0, {1, 0}, cxd{1.0, 0.0}}, {1, {1, 0}, cxd{1.0, 0.0}}};
  EXPECT_THROW(
      ps::grad_jacobian_bound_check(ps::MapExpr::polynomial(2, collapse), ps::origin(2), 3.0),
      ps::singular_error);
}
