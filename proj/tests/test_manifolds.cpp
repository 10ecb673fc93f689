#include <gtest/gtest.h>

#include <cmath>

#include "hgopt/manifolds.h"
#include "hgopt/warped.h"
#include "test_helpers.h"

namespace hgopt {
namespace {

using test::cosh_chart_tangent;
using test::cosh_chart_to_lorentz;
using test::near;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(CurvatureBound, FlatCylinderIsZero) {
  WarpedProduct m(WarpFunction::constant(1.0), Interval{});
  EXPECT_NEAR(m.sectional_curvature_bound(Interval{-3.0, 3.0}), 0.0, 1e-15);
}

TEST(CurvatureBound, CoshIsMinusOne) {
  WarpedProduct m(WarpFunction::cosh(), Interval{});
  EXPECT_NEAR(sectional_curvature_bound(m, Interval{-1.0, 1.0}), -1.0, 1e-12);
}

TEST(CurvatureBound, ExpSquaredReachesMinus38) {
  WarpedProduct m(WarpFunction::exp_r2(), Interval{});
  EXPECT_NEAR(m.sectional_curvature_bound(Interval{0.0, 3.0}), -38.0, 1e-9);
}

TEST(CurvatureBound, ExpSquaredIsUnboundedBelow) {
  WarpedProduct m(WarpFunction::exp_r2(), Interval{});
  EXPECT_LT(m.sectional_curvature_bound(Interval{0.0, 10.0}), -400.0);
}

TEST(GeodesicOde, RadialLinesAreGeodesics) {
  const GeodesicState d = warped_geodesic_ode({0.7, 0.1, 1.3, 0.0}, WarpFunction::exp_r2());
  EXPECT_EQ(d[0], 1.3);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);
}

TEST(GeodesicOde, FlatWarpGivesStraightLines) {
  const GeodesicState d = warped_geodesic_ode({0.7, 0.1, 1.3, -0.4}, WarpFunction::constant());
  EXPECT_EQ(d[0], 1.3);
  EXPECT_EQ(d[1], -0.4);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);
}

TEST(GeodesicOde, ClairautAndEnergyAreConserved) {
  WarpedProduct m(WarpFunction::exp_r2(), Interval{});
  const WarpFunction& phi = m.warp();
  const GeodesicState s0{0.3, 0.2, 0.4, 0.9};
  const GeodesicState s1 = m.integrate(s0, 400);
  auto clairaut = [&](const GeodesicState& s) {
    const double p = phi(s[0]).phi;
    return p * p * s[3];
  };
  auto energy = [&](const GeodesicState& s) {
    const double p = phi(s[0]).phi;
    return s[2] * s[2] + p * p * s[3] * s[3];
  };
  EXPECT_NEAR(clairaut(s1), clairaut(s0), 1e-6);
  EXPECT_NEAR(energy(s1), energy(s0), 1e-6);
}

TEST(WarpFunction, LookupByName) {
  EXPECT_EQ(WarpFunction::by_name("cosh").name(), "cosh");
  EXPECT_EQ(WarpFunction::by_name("exp_r2").name(), "exp_r2");
  EXPECT_THROW(WarpFunction::by_name("sin"), ContractViolation);
}

TEST(WarpedLog, RadialLine) {
  WarpedProduct m(WarpFunction::exp_r2(), Interval{});
  const ManifoldPoint x = m.point(vec2(-0.4, 1.1));
  const ManifoldPoint y = m.point(vec2(0.5, 1.1));
  EXPECT_TRUE(near(m.log(x, y).coords(), vec2(0.9, 0.0), 1e-9));
  EXPECT_NEAR(m.distance(x, y), 0.9, 1e-9);
}

TEST(WarpedLog, RoundTrip) {
  WarpedProduct m(WarpFunction::exp_r2(), Interval{});
  Rng rng = make_rng(21);
  for (int i = 0; i < 30; ++i) {
    const ManifoldPoint x = m.random_point(rng, 1.0);
    const TangentVector v = m.random_tangent(rng, x, 1.5);
    const TangentVector back = m.log(x, m.exp(v));
    EXPECT_LE((back.coords() - v.coords()).norm(), 1e-6 * std::max(1.0, v.coords().norm()));
  }
}

TEST(WarpedCosh, AgreesWithLorentzPlane) {
  WarpedProduct w(WarpFunction::cosh(), Interval{});
  HyperbolicSpace h2(2);
  Rng rng = make_rng(99);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int checked = 0;
  while (checked < 40) {
    const Vector a = vec2(u(rng), u(rng));
    const Vector b = vec2(u(rng), u(rng));
    const ManifoldPoint pa = h2.point(cosh_chart_to_lorentz(a(0), a(1)));
    const ManifoldPoint pb = h2.point(cosh_chart_to_lorentz(b(0), b(1)));
    const double dh = h2.distance(pa, pb);
    if (dh > 3.0) continue;
    ++checked;
    const ManifoldPoint wa = w.point(a);
    const ManifoldPoint wb = w.point(b);
    EXPECT_NEAR(w.distance(wa, wb), dh, 1e-5);
    const Vector lw = w.log(wa, wb).coords();
    EXPECT_TRUE(near(cosh_chart_tangent(a(0), a(1), lw(0), lw(1)), h2.log(pa, pb).coords(), 1e-5));
  }
}

TEST(Hyperbolic, CurvatureScalesDistances) {
  HyperbolicSpace unit(2);
  HyperbolicSpace steep(2, -4.0);
  const ManifoldPoint o = unit.origin();
  const ManifoldPoint y = unit.exp(unit.tangent(o, Vector::Unit(3, 1) * 1.5));
  const ManifoldPoint o2 = steep.origin();
  const ManifoldPoint y2 = steep.exp(steep.tangent(o2, Vector::Unit(3, 1) * 1.5));
  EXPECT_NEAR(unit.distance(o, y), 1.5, 1e-12);
  EXPECT_NEAR(steep.distance(o2, y2), 1.5, 1e-12);
  EXPECT_THROW(HyperbolicSpace(2, 0.5), ContractViolation);
}

TEST(Spd, ExpLogRoundTrip) {
  SpdManifold m(3);
  Rng rng = make_rng(4);
  for (int i = 0; i < 20; ++i) {
    const ManifoldPoint x = m.random_point(rng, 1.5);
    const TangentVector v = m.random_tangent(rng, x, 3.0);
    const TangentVector back = m.log(x, m.exp(v));
    EXPECT_LE(std::sqrt(m.inner(back - v, back - v)), 1e-8 * std::max(1.0, m.norm(v)));
  }
}

TEST(Spd, MatrixFunctions) {
  Matrix a(2, 2);
  a << 4, 1, 1, 3;
  EXPECT_TRUE(near((spd::sqrtm(a) * spd::sqrtm(a)).reshaped(), a.reshaped(), 1e-12));
  EXPECT_TRUE(near((spd::inv_sqrtm(a) * a * spd::inv_sqrtm(a)).reshaped(),
                   Matrix::Identity(2, 2).reshaped(), 1e-12));
  EXPECT_TRUE(near(spd::expm_sym(spd::logm_spd(a)).reshaped(), a.reshaped(), 1e-12));
}

}  // namespace
}  // namespace hgopt
