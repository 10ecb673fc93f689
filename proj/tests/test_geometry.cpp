#include <gtest/gtest.h>

#include <cmath>

#include "hgopt/manifolds.h"
#include "hgopt/warped.h"
#include "test_helpers.h"

namespace hgopt {
namespace {

using test::near;

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

class GeometryTest : public ::testing::Test {
 protected:
  EuclideanSpace r2{2};
  HyperbolicSpace h2{2};
  SpdManifold spd2{2};
  WarpedProduct warped{WarpFunction::exp_r2(), Interval{}};
};

TEST_F(GeometryTest, EuclideanInnerOfOrthogonalVectorsIsZero) {
  const ManifoldPoint x = r2.point(vec({0.3, -1.0}));
  EXPECT_EQ(metric_inner(r2, r2.tangent(x, vec({1, 0})), r2.tangent(x, vec({0, 1}))), 0.0);
}

TEST_F(GeometryTest, ZeroVectorHasZeroNorm) {
  const ManifoldPoint x = h2.point(vec({1, 0, 0}));
  const TangentVector z = h2.zero_tangent(x);
  EXPECT_EQ(metric_inner(h2, z, z), 0.0);
}

TEST_F(GeometryTest, SpdInnerAtIdentityIsTrace) {
  const ManifoldPoint eye = spd2.point(spd2.as_coords(Matrix::Identity(2, 2)));
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  const TangentVector t = spd2.tangent(eye, spd2.as_coords(u));
  EXPECT_NEAR(metric_inner(spd2, t, t), 1.0, 1e-15);
}

TEST_F(GeometryTest, InnerRejectsDifferentBases) {
  const TangentVector u = r2.tangent(r2.point(vec({0, 0})), vec({1, 0}));
  const TangentVector v = r2.tangent(r2.point(vec({1, 0})), vec({1, 0}));
  EXPECT_THROW(r2.inner(u, v), ContractViolation);
}

TEST_F(GeometryTest, PointMembershipIsChecked) {
  EXPECT_THROW(h2.point(vec({2, 0, 0})), ContractViolation);
  EXPECT_THROW(h2.point(vec({1, 0})), ContractViolation);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  EXPECT_THROW(spd2.point(spd2.as_coords(bad)), ContractViolation);
  const ManifoldPoint o = h2.point(vec({1, 0, 0}));
  EXPECT_THROW(h2.tangent(o, vec({1, 0, 0})), ContractViolation);
}

TEST_F(GeometryTest, ForeignPointsAreRejected) {
  EuclideanSpace other(2);
  const ManifoldPoint x = other.point(vec({0, 0}));
  EXPECT_THROW(r2.distance(x, x), ContractViolation);
}

TEST_F(GeometryTest, EuclideanExp) {
  const ManifoldPoint x = r2.point(vec({0, 0}));
  EXPECT_TRUE(near(r2.exp(r2.tangent(x, vec({3, 4}))).coords(), vec({3, 4}), 0.0));
}

TEST_F(GeometryTest, HyperbolicExpFollowsClosedForm) {
  const ManifoldPoint x = h2.point(vec({1, 0, 0}));
  const ManifoldPoint y = h2.exp(h2.tangent(x, vec({0, 1, 0})));
  EXPECT_TRUE(near(y.coords(), vec({std::cosh(1.0), std::sinh(1.0), 0}), 1e-14));
}

TEST_F(GeometryTest, WarpedRadialExp) {
  const ManifoldPoint x = warped.point(vec({0.2, 0.7}));
  const ManifoldPoint y = warped.exp(warped.tangent(x, vec({0.5, 0})));
  EXPECT_TRUE(near(y.coords(), vec({0.7, 0.7}), 1e-12));
}

TEST_F(GeometryTest, IncompleteWarpRaisesDomainExit) {
  WarpedProduct t2(WarpFunction::t_squared(), Interval{0.0, 1.0});
  const ManifoldPoint x = t2.point(vec({0.5, 0.0}));
  EXPECT_THROW(t2.exp(t2.tangent(x, vec({0.8, 0}))), DomainExitError);
  EXPECT_THROW(t2.point(vec({1.5, 0.0})), ContractViolation);
}

TEST_F(GeometryTest, EuclideanLog) {
  const TangentVector v = r2.log(r2.point(vec({1, 1})), r2.point(vec({2, 3})));
  EXPECT_TRUE(near(v.coords(), vec({1, 2}), 0.0));
}

TEST_F(GeometryTest, LogOfSamePointIsZero) {
  const ManifoldPoint x = h2.point(vec({std::cosh(0.4), 0, std::sinh(0.4)}));
  EXPECT_EQ(h2.log(x, x).coords().norm(), 0.0);
  const ManifoldPoint w = warped.point(vec({0.3, -0.2}));
  EXPECT_EQ(warped.log(w, w).coords().norm(), 0.0);
}

TEST_F(GeometryTest, HyperbolicLogInvertsExp) {
  const ManifoldPoint x = h2.point(vec({1, 0, 0}));
  const ManifoldPoint y = h2.point(vec({std::cosh(1.0), std::sinh(1.0), 0}));
  EXPECT_TRUE(near(h2.log(x, y).coords(), vec({0, 1, 0}), 1e-12));
}

TEST_F(GeometryTest, Distances) {
  const ManifoldPoint x = h2.point(vec({1, 0, 0}));
  EXPECT_EQ(h2.distance(x, x), 0.0);
  const ManifoldPoint y = h2.point(vec({std::cosh(2.0), std::sinh(2.0), 0}));
  EXPECT_NEAR(h2.distance(x, y), 2.0, 1e-12);
  EXPECT_EQ(h2.distance(x, y), h2.distance(y, x));

  Matrix d = Matrix::Identity(2, 2);
  d(0, 0) = std::exp(1.0);
  const ManifoldPoint eye = spd2.point(spd2.as_coords(Matrix::Identity(2, 2)));
  EXPECT_NEAR(spd2.distance(eye, spd2.point(spd2.as_coords(d))), 1.0, 1e-12);
}

TEST_F(GeometryTest, EuclideanTransportIsIdentity) {
  const ManifoldPoint a = r2.point(vec({0, 0}));
  const ManifoldPoint b = r2.point(vec({5, -1}));
  const TangentVector v = r2.transport(r2.tangent(a, vec({1, 2})), b);
  EXPECT_TRUE(v.base().same_as(b));
  EXPECT_TRUE(near(v.coords(), vec({1, 2}), 0.0));
}

TEST_F(GeometryTest, TransportToSamePointIsIdentity) {
  const ManifoldPoint x = spd2.point(spd2.as_coords(Matrix::Identity(2, 2) * 2.0));
  Matrix u(2, 2);
  u << 1, 0.5, 0.5, -1;
  const TangentVector v = spd2.tangent(x, spd2.as_coords(u));
  EXPECT_TRUE(near(spd2.transport(v, x).coords(), v.coords(), 1e-14));
}

TEST_F(GeometryTest, HyperbolicTransportOffPlaneIsInvariant) {
  const ManifoldPoint x = h2.point(vec({1, 0, 0}));
  const ManifoldPoint y = h2.point(vec({std::cosh(1.0), std::sinh(1.0), 0}));
  const TangentVector v = h2.transport(h2.tangent(x, vec({0, 0, 1})), y);
  EXPECT_TRUE(near(v.coords(), vec({0, 0, 1}), 1e-14));
  EXPECT_NEAR(h2.norm(v), 1.0, 1e-14);
}

TEST_F(GeometryTest, TransportPreservesInnerProducts) {
  Rng rng = make_rng(7);
  for (const Manifold* m : std::initializer_list<const Manifold*>{&h2, &spd2, &warped}) {
    for (int i = 0; i < 20; ++i) {
      const ManifoldPoint x = m->random_point(rng, 1.0);
      const ManifoldPoint y = m->random_point(rng, 1.0);
      const TangentVector u = m->random_tangent(rng, x, 1.0);
      const TangentVector v = m->random_tangent(rng, x, 1.0);
      const double before = m->inner(u, v);
      const double after = m->inner(m->transport(u, y), m->transport(v, y));
      EXPECT_NEAR(before, after, 1e-8) << m->name();
    }
  }
}

TEST_F(GeometryTest, GeodesicPointEndpointsAndMidpoints) {
  const ManifoldPoint x = r2.point(vec({0, 0}));
  const ManifoldPoint y = r2.point(vec({2, 0}));
  EXPECT_TRUE(r2.geodesic_point(x, y, 0.0).same_as(x));
  EXPECT_TRUE(near(r2.geodesic_point(x, y, 1.0).coords(), y.coords(), 0.0));
  EXPECT_TRUE(near(r2.geodesic_point(x, y, 0.5).coords(), vec({1, 0}), 0.0));

  const ManifoldPoint a = h2.point(vec({1, 0, 0}));
  const ManifoldPoint b = h2.point(vec({std::cosh(2.0), std::sinh(2.0), 0}));
  EXPECT_TRUE(near(h2.geodesic_point(a, b, 0.5).coords(),
                   vec({std::cosh(1.0), std::sinh(1.0), 0}), 1e-12));
  EXPECT_TRUE(near(h2.geodesic_point(a, b, 1.0).coords(), b.coords(), 1e-12));
}

TEST_F(GeometryTest, TangentBasisIsOrthonormal) {
  Rng rng = make_rng(3);
  for (const Manifold* m : std::initializer_list<const Manifold*>{&r2, &h2, &spd2, &warped}) {
    const ManifoldPoint x = m->random_point(rng, 1.0);
    const auto basis = m->tangent_basis(x);
    ASSERT_EQ(static_cast<int>(basis.size()), m->dimension());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        EXPECT_NEAR(m->inner(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-12) << m->name();
      }
    }
  }
}

TEST_F(GeometryTest, RandomPointsStayInRadius) {
  Rng rng = make_rng(11);
  for (int i = 0; i < 50; ++i) {
    EXPECT_LE(h2.distance(h2.origin(), h2.random_point(rng, 1.5)), 1.5 + 1e-12);
  }
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = make_rng(5, 1);
  Rng b = make_rng(5, 1);
  Rng c = make_rng(5, 2);
  const auto first = a();
  EXPECT_EQ(first, b());
  EXPECT_NE(first, c());
}

}  // namespace
}  // namespace hgopt
