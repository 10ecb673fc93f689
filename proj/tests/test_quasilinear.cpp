#include <gtest/gtest.h>

#include <cmath>

#include "hgopt/manifolds.h"
#include "hgopt/objective.h"
#include "hgopt/properties.h"
#include "hgopt/quasilinear.h"
#include "hgopt/warped.h"

namespace hgopt {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Lorentz distances computed from scratch, sharing no code with the library.
double lorentz_distance(const Vector& a, const Vector& b) {
  const double ip = -a(0) * b(0) + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
  return std::acosh(std::max(1.0, -ip));
}

TEST(QuasiInner, SelfProductIsSquaredDistance) {
  HyperbolicSpace h2(2);
  Rng rng = make_rng(1);
  for (int i = 0; i < 20; ++i) {
    const ManifoldPoint x = h2.random_point(rng, 2.0);
    const ManifoldPoint y = h2.random_point(rng, 2.0);
    const double d = h2.distance(x, y);
    EXPECT_NEAR(quasi_inner(h2, {x, y}, {x, y}).value, d * d, 1e-10 * std::max(1.0, d * d));
  }
}

TEST(QuasiInner, EuclideanIsDotProduct) {
  EuclideanSpace r2(2);
  const auto p = [&](double a, double b) { return r2.point(vec2(a, b)); };
  EXPECT_NEAR(quasi_inner(r2, {p(0, 0), p(1, 0)}, {p(0, 0), p(0, 1)}).value, 0.0, 1e-15);
  const QuasiInnerResult q = quasi_inner(r2, {p(1, 2), p(3, 1)}, {p(-1, 0), p(2, 4)});
  EXPECT_NEAR(q.value, 2 * 3 + (-1) * 4, 1e-12);
  ASSERT_TRUE(q.cosq.has_value());
}

TEST(QuasiInner, DegenerateSegmentHasNoCosine) {
  EuclideanSpace r2(2);
  const ManifoldPoint x = r2.point(vec2(1, 1));
  const QuasiInnerResult q = quasi_inner(r2, {x, x}, {x, r2.point(vec2(2, 2))});
  EXPECT_EQ(q.value, 0.0);
  EXPECT_FALSE(q.cosq.has_value());
}

TEST(QuasiInner, MatchesIndependentFourDistanceFormula) {
  HyperbolicSpace h2(2);
  Rng rng = make_rng(2);
  for (int i = 0; i < 50; ++i) {
    const ManifoldPoint x = h2.random_point(rng, 2.0);
    const ManifoldPoint y = h2.random_point(rng, 2.0);
    const ManifoldPoint z = h2.random_point(rng, 2.0);
    const ManifoldPoint w = h2.random_point(rng, 2.0);
    auto d2 = [](const ManifoldPoint& a, const ManifoldPoint& b) {
      const double d = lorentz_distance(a.coords(), b.coords());
      return d * d;
    };
    const double expected = 0.5 * (d2(x, w) + d2(y, z) - d2(x, z) - d2(y, w));
    EXPECT_NEAR(quasi_inner(h2, {x, y}, {z, w}).value, expected, 1e-10);
  }
}

TEST(QuasiInner, CachedAndDirectAgree) {
  SpdManifold spd(3);
  DistanceCache cache(spd);
  Rng rng = make_rng(3);
  const ManifoldPoint x = spd.random_point(rng, 1.0);
  const ManifoldPoint y = spd.random_point(rng, 1.0);
  const ManifoldPoint z = spd.random_point(rng, 1.0);
  const ManifoldPoint w = spd.random_point(rng, 1.0);
  EXPECT_EQ(quasi_inner(spd, {x, y}, {z, w}).value, quasi_inner(cache, {x, y}, {z, w}).value);
  EXPECT_EQ(cache.size(), 6u);
  quasi_inner(cache, {y, x}, {w, z});
  EXPECT_EQ(cache.size(), 6u);
}

TEST(QuasiAdd, DegenerateMiddlePointIsExact) {
  HyperbolicSpace h2(2);
  Rng rng = make_rng(4);
  const ManifoldPoint x = h2.random_point(rng, 1.0);
  const ManifoldPoint z = h2.random_point(rng, 1.0);
  const ManifoldPoint u = h2.random_point(rng, 1.0);
  const ManifoldPoint w = h2.random_point(rng, 1.0);
  EXPECT_EQ(quasi_add_check(h2, x, x, z, u, w), 0.0);
}

TEST(QuasiAdd, SpdSweep) {
  SpdManifold spd(3);
  DistanceCache cache(spd);
  Rng rng = make_rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<ManifoldPoint> p;
    for (int k = 0; k < 5; ++k) p.push_back(spd.random_point(rng, 1.5));
    worst = std::max(worst, quasi_add_check(cache, p[0], p[1], p[2], p[3], p[4]));
    cache.clear();
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(QuasiAxioms, HoldOnEveryManifold) {
  EuclideanSpace r5(5);
  HyperbolicSpace h3(3);
  WarpedProduct w(WarpFunction::exp_r2(), Interval{});
  Rng rng = make_rng(6);
  for (const Manifold* m : std::initializer_list<const Manifold*>{&r5, &h3, &w}) {
    const QuasiAxiomReport r = check_quasi_axioms(*m, rng, 200, 1.0);
    EXPECT_EQ(r.symmetry_failures, 0) << m->name();
    EXPECT_EQ(r.sign_flip_failures, 0) << m->name();
    EXPECT_LE(r.worst_additivity, 1e-8) << m->name();
    EXPECT_LE(r.worst_self, 1e-10) << m->name();
  }
}

TEST(TangentComparison, EuclideanIsExact) {
  EuclideanSpace r3(3);
  Rng rng = make_rng(7);
  for (int i = 0; i < 20; ++i) {
    const TangentComparison c = compare_to_tangent(r3, r3.random_point(rng, 2.0),
                                                   r3.random_point(rng, 2.0),
                                                   r3.random_point(rng, 2.0));
    EXPECT_NEAR(c.quasi, c.tangent, 1e-12);
  }
}

TEST(TangentComparison, SameEndpointGivesSquaredDistance) {
  HyperbolicSpace h2(2);
  Rng rng = make_rng(8);
  const ManifoldPoint x = h2.random_point(rng, 1.0);
  const ManifoldPoint y = h2.random_point(rng, 1.0);
  const TangentComparison c = compare_to_tangent(h2, x, y, y);
  const double d = h2.distance(x, y);
  EXPECT_NEAR(c.quasi, d * d, 1e-12);
  EXPECT_NEAR(c.tangent, d * d, 1e-12);
}

TEST(TangentComparison, OrthogonalFrameOnHyperbolicPlane) {
  HyperbolicSpace h2(2);
  const ManifoldPoint x = h2.origin();
  const auto basis = h2.tangent_basis(x);
  const ManifoldPoint y = h2.exp(basis[0]);
  const ManifoldPoint z = h2.exp(basis[1]);
  const TangentComparison c = compare_to_tangent(h2, x, y, z);
  EXPECT_NEAR(c.tangent, 0.0, 1e-12);
  EXPECT_LT(c.quasi, 0.0);
}

TEST(TangentComparison, HoldsOnStressWarp) {
  WarpedProduct w(WarpFunction::exp_r2(), Interval{});
  Rng rng = make_rng(9);
  const PropertyReport r = check_tangent_comparison(w, rng, 200, 1.0);
  EXPECT_EQ(r.violations, 0);
}

TEST(QConvexityGap, ConstantFunctionGivesZero) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  const Objective f(
      r2, [](const ManifoldPoint&) { return 3.0; },
      [r2](const ManifoldPoint& x) { return r2->zero_tangent(x); }, 0.0);
  EXPECT_EQ(q_convexity_gap(f, r2->point(vec2(1, 2)), r2->point(vec2(-1, 0)), 0.0), 0.0);
}

TEST(QConvexityGap, FlatQuadraticIsTight) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  const Objective f = squared_distance_objective(r2, r2->point(vec2(0, 0)));
  Rng rng = make_rng(10);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(q_convexity_gap(f, r2->random_point(rng, 3.0), r2->random_point(rng, 3.0), 1.0),
                0.0, 1e-12);
  }
}

TEST(QConvexityGap, HyperbolicFrechetIsQConvex) {
  auto h2 = std::make_shared<HyperbolicSpace>(2);
  Rng rng = make_rng(11);
  std::vector<ManifoldPoint> anchors;
  for (int i = 0; i < 6; ++i) anchors.push_back(h2->random_point(rng, 2.0));
  const Objective f = frechet_mean_objective(h2, anchors);
  for (int i = 0; i < 50; ++i) {
    EXPECT_GE(q_convexity_gap(f, h2->random_point(rng, 2.0), h2->random_point(rng, 2.0), 0.0),
              -1e-8);
  }
}

TEST(Diameter, LargestPairwiseDistance) {
  EuclideanSpace r2(2);
  EXPECT_NEAR(diameter(r2, {r2.point(vec2(0, 0)), r2.point(vec2(3, 4)), r2.point(vec2(1, 1))}),
              5.0, 1e-15);
}

}  // namespace
}  // namespace hgopt
