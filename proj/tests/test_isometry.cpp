#include <gtest/gtest.h>

#include <cmath>

#include "nulldist/isometry.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nulldist;
using testing_support::cube;

TEST(Preserving, IdentityOnOneGrid) {
  const auto st = minkowski(2);
  const auto g = build_grid(st, coordinate_time(st), cube(vec({0, 0}), vec({1, 1})), 0.1);
  const auto rep = check_preserving(identity_map(), g, g, 50, 0.0, 1);
  EXPECT_TRUE(rep.passes);
  EXPECT_EQ(rep.d_hat_dev, 0.0);
  EXPECT_EQ(rep.tau_dev, 0.0);
  EXPECT_GE(rep.pairs, 50u);
}

TEST(Preserving, SpatialTranslation) {
  const auto st = minkowski(2);
  const double h = 0.1;
  const auto g1 = build_grid(st, coordinate_time(st), cube(vec({0, 0}), vec({1, 1})), h);
  const auto g2 = build_grid(st, coordinate_time(st), cube(vec({0, 3}), vec({1, 4})), h);
  EXPECT_TRUE(check_preserving(translation_map(vec({0, 3})), g1, g2, 100, 1e-12).passes);
  EXPECT_ERRC(check_preserving(translation_map(vec({0, h / 3})), g1, g1), Errc::MapLeavesGrid);
}

TEST(Preserving, ConstantRescalingKeepsCoordinateTime) {
  const auto st1 = upper_half_minkowski(2);
  const auto st2 = conformal(st1, 2.0);
  const Box box = cube(vec({0.1, -0.5}), vec({1, 0.5}));
  const auto g1 = build_grid(st1, coordinate_time(st1), box, 0.1);
  const auto g2 = build_grid(st2, coordinate_time(st2), box, 0.1);
  EXPECT_TRUE(check_preserving(identity_map(), g1, g2).passes);
}

TEST(Preserving, TableMapAndInverseAgree) {
  const auto st = minkowski(2);
  const auto g = build_grid(st, coordinate_time(st), cube(vec({0, -0.5}), vec({1, 0.5})), 0.1);
  std::vector<std::pair<Vector, Vector>> pairs;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Vector x = g.coords(static_cast<NodeId>(n));
    pairs.emplace_back(x, vec({x[0], -x[1]}));
  }
  const auto reflect = PointMap::table("reflect", pairs);
  EXPECT_FALSE(reflect.is_closed_form());
  EXPECT_TRUE(reflect.has_inverse());
  const auto a = check_preserving(reflect, g, g, 100, 1e-12, 3);
  const auto b = check_preserving(reflect.inverse(), g, g, 100, 1e-12, 3);
  EXPECT_TRUE(a.passes);
  EXPECT_TRUE(b.passes);
  EXPECT_ERRC(reflect(vec({5, 5})), Errc::MapLeavesGrid);
  pairs.push_back(pairs.front());
  EXPECT_ERRC(PointMap::table("dup", pairs), Errc::InvalidArgument);
}

TEST(NamedMaps, ParseArguments) {
  EXPECT_EQ(named_map("dilation", {2.0}, 2)(vec({1, 1})), vec({2, 2}));
  EXPECT_EQ(named_map("translation", {1.0, 2.0}, 2)(vec({0, 0})), vec({1, 2}));
  EXPECT_ERRC(named_map("translation", {1.0}, 2), Errc::InvalidArgument);
  EXPECT_ERRC(named_map("shear", {}, 2), Errc::UnknownName);
  const Vector r = named_map("rotation", {1, 2, M_PI / 2}, 3)(vec({0, 1, 0}));
  EXPECT_LT((r - vec({0, 0, 1})).norm(), 1e-12);
}

TEST(ConformalFactor, Examples) {
  const auto mk = minkowski(4);
  const Vector p = vec({0.3, 0.1, -0.2, 0.4});
  const auto scaled = conformal_factor(identity_map(), mk, conformal(mk, 2.0), p);
  EXPECT_NEAR(scaled.phi, 2.0, 1e-8);
  EXPECT_EQ(scaled.verdict, ConformalVerdict::ConformalNotIsometric);
  EXPECT_NEAR(conformal_factor(dilation_map(2.0), mk, mk, p).phi, 2.0, 1e-8);
  const auto rot = conformal_factor(spatial_rotation_map(1, 2, 0.7), mk, mk, p);
  EXPECT_NEAR(rot.phi, 1.0, 1e-8);
  EXPECT_EQ(rot.verdict, ConformalVerdict::Isometry);
}

TEST(ConformalFactor, Failures) {
  const auto mk = minkowski(2);
  const auto stretch = PointMap::closed_form("stretch", [](const Vector& x) {
    return Vector(vec({x[0], 2 * x[1]}));
  });
  EXPECT_EQ(conformal_factor(stretch, mk, mk, vec({0, 0})).verdict, ConformalVerdict::NotConformal);
  const auto flatten = PointMap::closed_form("flatten", [](const Vector& x) {
    return Vector(vec({x[0], 0.0}));
  });
  EXPECT_ERRC(conformal_factor(flatten, mk, mk, vec({0, 0})), Errc::SingularJacobian);
}

TEST(Coarea, ConstantFactorScalesVolumes) {
  const auto mk = minkowski(4);
  const Box region = cube(vec({0, 0, 0, 0}), vec({1, 1, 1, 1}));
  const auto rep = coarea_volume_compare(mk, [](const Vector&) { return 2.0; },
                                         coordinate_time(mk), region, 0.1);
  EXPECT_NEAR(rep.vol_n, 8.0, 1e-9);
  EXPECT_NEAR(rep.vol_nm1, 4.0, 1e-9);
  EXPECT_EQ(rep.verdict, ConformalVerdict::ConformalNotIsometric);
  EXPECT_FALSE(rep.below_theorem_dimension);
  EXPECT_LT(rep.max_grad_tau_dev, 1e-6);

  const auto one = coarea_volume_compare(mk, [](const Vector&) { return 1.0; },
                                         coordinate_time(mk), region, 0.1);
  EXPECT_EQ(one.vol_n, one.vol_nm1);
  EXPECT_EQ(one.verdict, ConformalVerdict::Isometry);
}

TEST(Coarea, MatchesMidpointOracle) {
  const auto st = warped_product(3);
  const Box region = cube(vec({0.5, 0, 0}), vec({1.5, 1, 1}));
  const ScalarField phi = [](const Vector& x) { return 1.0 + 0.5 * std::sin(3 * x[1]); };
  const double h = 0.05;
  const auto rep = coarea_volume_compare(st, phi, coordinate_time(st), region, h);
  // sqrt|det g| = t^2 for the warped product in 2+1.
  const double ref_n = oracle::midpoint(
      [&](const Vector& x) { return std::pow(phi(x), 2) * x[0] * x[0]; }, region.lo, region.hi, h);
  const double ref_nm1 = oracle::midpoint(
      [&](const Vector& x) { return phi(x) * x[0] * x[0]; }, region.lo, region.hi, h);
  EXPECT_NEAR(rep.vol_n, ref_n, 1e-12 * ref_n);
  EXPECT_NEAR(rep.vol_nm1, ref_nm1, 1e-12 * ref_nm1);
}

TEST(Coarea, Errors) {
  const auto uh = upper_half_minkowski(2);
  const auto tau = coordinate_time(uh);
  EXPECT_ERRC(coarea_volume_compare(uh, [](const Vector&) { return 1.0; }, tau,
                                    cube(vec({-1, 0}), vec({1, 1})), 0.1),
              Errc::OutOfDomain);
  EXPECT_ERRC(coarea_volume_compare(uh, [](const Vector&) { return -1.0; }, tau,
                                    cube(vec({0.5, 0}), vec({1, 1})), 0.1),
              Errc::NonPositivePhi);
  EXPECT_TRUE(coarea_volume_compare(uh, [](const Vector&) { return 1.0; }, tau,
                                    cube(vec({0.5, 0}), vec({1, 1})), 0.1)
                  .below_theorem_dimension);
}

// Property: vol_n - vol_{n-1} has the sign of c - 1 for constant phi = c.
TEST(Properties, CoareaSign) {
  const auto st = upper_half_minkowski(3);
  const Box region = cube(vec({0.5, 0, 0}), vec({1, 1, 1}));
  for (double c : {0.5, 1.0, 2.0}) {
    const auto rep = coarea_volume_compare(st, [c](const Vector&) { return c; },
                                           coordinate_time(st), region, 0.1);
    const double diff = rep.vol_n - rep.vol_nm1;
    if (c < 1) EXPECT_LT(diff, 0.0);
    if (c == 1) EXPECT_EQ(diff, 0.0);
    if (c > 1) EXPECT_GT(diff, 0.0);
  }
}

TEST(Rehearsal, CosmologicalTimeBreaksPreservation) {
  const double h = 0.05;
  const auto rep = rigidity_rehearsal(2, 2.0, cube(vec({h, -0.5}), vec({1, 0.5})), h, 100);
  EXPECT_TRUE(rep.coordinate_times.passes);
  EXPECT_FALSE(rep.cosmological_times.passes);
  EXPECT_TRUE(rep.passes);
}
