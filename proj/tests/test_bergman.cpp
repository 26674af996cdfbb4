#include "polyschwarz/bergman.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "polyschwarz/errors.hpp"
#include "test_util.hpp"

namespace polyschwarz {
namespace {

using cx = std::complex<double>;

MapExpr half_pole_moebius() {
  CMat m(3, 3);
  m(0, 0) = 1.0;
  m(0, 1) = -0.5;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  return MapExpr::moebius(2, std::move(m));
}

TEST(BergmanNorm, ClosedFormAtCenterAndOffCenter) {
  const std::vector<cx> v{cx{1.0}, cx{0.0}};
  EXPECT_NEAR(bergman_norm(origin(2), v), std::sqrt(2.0), 1e-14);

  const Point z{cx{0.5}, cx{0.0}};
  // weight on axis 0 is 2/(1-0.25)^2 = 2/0.5625
  EXPECT_NEAR(bergman_norm(z, v), std::sqrt(2.0 / 0.5625), 1e-14);

  const std::vector<cx> w{cx{0.3, 0.4}, cx{-0.1, 0.2}};
  const double byhand = std::sqrt(2.0 * 0.25 / 0.5625 + 2.0 * 0.05);
  EXPECT_NEAR(bergman_norm(z, w), byhand, 1e-14);
}

TEST(BergmanNorm, BoundaryRejected) {
  EXPECT_THROW(bergman_norm(Point{cx{1.0}, cx{0.0}}, {cx{1.0}, cx{0.0}}), precondition_error);
}

TEST(OperatorNorm, MoebiusTensorHasZeroNorm) {
  const OperatorNormResult r = operator_norm(half_pole_moebius(), Point{cx{0.3, 0.1}, cx{-0.2, 0.4}});
  EXPECT_LT(r.value, 1e-10);
  EXPECT_TRUE(r.converged);
}

// Extremal computation on the sphere: for the automorphism with a = (0.5, 0)
// at the origin, h(p) = (4p - 3p^2)/18 with p = |w_1|^2, maximized at
// p = 2/3, giving operator norm sqrt(2/27) = sqrt(6)/9.
TEST(OperatorNorm, AutomorphismHalfExactValue) {
  const OperatorNormResult r =
      operator_norm(MapExpr::automorphism({cx{0.5}, cx{0.0}}), origin(2), 8, 1e-13);
  EXPECT_NEAR(r.value, std::sqrt(6.0) / 9.0, 1e-8);
  EXPECT_TRUE(r.converged);
  // witness has |w_1|^2 = 2/3 in sphere coordinates; in tangent coordinates
  // the Bergman-unit witness keeps the same proportions at the origin.
  EXPECT_NEAR(bergman_norm(origin(2), r.argmax), 1.0, 1e-9);
}

TEST(OperatorNorm, WitnessReproducesValue) {
  const std::vector<MapExpr> maps = {
      MapExpr::automorphism({cx{0.5, -0.3}, cx{0.25, 0.55}}),
      MapExpr::compose(MapExpr::automorphism({cx{0.3, 0.0}, cx{0.0, 0.4}}),
                       MapExpr::polynomial(2, {{0, {1, 0}, 1.0},
                                               {1, {0, 1}, 1.0},
                                               {0, {0, 2}, 0.05},
                                               {1, {2, 0}, 0.08}})),
  };
  const Point z{cx{0.2, 0.1}, cx{-0.15, 0.3}};
  for (const MapExpr& f : maps) {
    const SchwarzianTensor t = schwarzian_tensor(f, z);
    const OperatorNormResult r = operator_norm(t, 8, 1e-13, 99);
    ASSERT_GT(r.value, 0.0);
    EXPECT_NEAR(bergman_norm(z, r.argmax), 1.0, 1e-10);
    const std::vector<cx> sv = apply_tensor(t, r.argmax);
    EXPECT_NEAR(bergman_norm(z, sv), r.value, 1e-9);
  }
}

// Pointwise bound for products of disk automorphisms: the tensor norm never
// exceeds 2 sqrt(2) max_j |a_j|.
TEST(OperatorNorm, AutomorphismUniformBound) {
  const std::vector<std::vector<cx>> params = {
      {cx{0.5}, cx{0.0}},
      {cx{0.7, 0.1}, cx{-0.55, 0.2}},
      {cx{0.0, 0.9}, cx{0.3, -0.3}},
  };
  const std::vector<Point> points = {
      origin(2), {cx{0.6, 0.2}, cx{-0.5, 0.1}}, {cx{-0.35, -0.6}, cx{0.1, 0.75}}};
  for (const auto& a : params) {
    double amax = 0.0;
    for (const auto& c : a) amax = std::max(amax, std::abs(c));
    for (const auto& z : points) {
      const double norm = operator_norm(MapExpr::automorphism(a), z, 4, 1e-11).value;
      EXPECT_LE(norm, 2.0 * std::sqrt(2.0) * amax + 1e-9);
    }
  }
}

TEST(OperatorNorm, PhaseRotationInvariance) {
  // Rotating every coordinate by a unimodular constant is a Moebius map that
  // conjugates the tensor; the norm at rotated points must match.
  const MapExpr f = MapExpr::automorphism({cx{0.5, 0.2}, cx{-0.3, 0.1}});
  const cx u = std::polar(1.0, 0.7);
  CMat m(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = u;
  m(2, 2) = u;
  const MapExpr rot = MapExpr::moebius(2, std::move(m));
  const MapExpr fr = MapExpr::compose(f, rot);
  const Point z{cx{0.25, -0.1}, cx{0.3, 0.2}};
  Point zr(z);
  for (auto& c : zr) c /= u;
  EXPECT_NEAR(operator_norm(fr, zr, 6, 1e-12).value, operator_norm(f, z, 6, 1e-12).value, 1e-9);
}

TEST(SupNorm, MoebiusIsZeroEverywhere) {
  const SupNormResult r = sup_norm(half_pole_moebius(), 0.6, SupNormGrid{4, 6}, 1, 0);
  EXPECT_LT(r.value, 1e-10);
  EXPECT_TRUE(r.lower_bound_only);
  EXPECT_EQ(r.points_skipped, 0);
}

TEST(SupNorm, DominatesInteriorSamplesAndGrowsWithRadius) {
  const MapExpr f = MapExpr::automorphism({cx{0.4, 0.1}, cx{-0.2, 0.3}});
  const SupNormResult small = sup_norm(f, 0.5, SupNormGrid{5, 8}, 2, 0);
  const SupNormResult large = sup_norm(f, 0.8, SupNormGrid{5, 8}, 2, 0);
  EXPECT_GE(large.value, small.value);
  for (const auto& c : small.witness) EXPECT_LE(std::abs(c), 0.5 + 1e-12);

  const Point inside{cx{0.31, 0.17}, cx{-0.4, 0.05}};
  const double local = operator_norm(f, inside, 4).value;
  EXPECT_GE(large.value + 1e-9, local * 0.98);
}

TEST(SupNorm, DeterministicReRuns) {
  const MapExpr f = MapExpr::compose(MapExpr::automorphism({cx{0.35, 0.0}, cx{0.0, 0.3}}),
                                     MapExpr::polynomial(2, {{0, {1, 0}, 1.0},
                                                             {1, {0, 1}, 1.0},
                                                             {0, {2, 0}, 0.04}}));
  const SupNormResult a = sup_norm(f, 0.7, SupNormGrid{4, 6}, 2, 2, 1e-10, 42, 2);
  const SupNormResult b = sup_norm(f, 0.7, SupNormGrid{4, 6}, 2, 2, 1e-10, 42, 1);
  EXPECT_EQ(a.value, b.value);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.witness[i].real(), b.witness[i].real());
    EXPECT_EQ(a.witness[i].imag(), b.witness[i].imag());
  }
}

TEST(SupNorm, BadRadiusRejected) {
  EXPECT_THROW(sup_norm(MapExpr::identity(2), 1.0), precondition_error);
  EXPECT_THROW(sup_norm(MapExpr::identity(2), 0.0), precondition_error);
}

}  // namespace
}  // namespace polyschwarz
