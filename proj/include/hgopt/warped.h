#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>

#include "hgopt/geometry.h"

namespace hgopt {

/// phi and its first two derivatives at one radius.
struct WarpValues {
  double phi;
  double dphi;
  double ddphi;
};

/// Positive convex warping function of a warped product I x_phi R.
class WarpFunction {
 public:
  using Eval = std::function<WarpValues(double)>;

  WarpFunction(std::string name, Eval eval) : name_(std::move(name)), eval_(std::move(eval)) {}

  static WarpFunction constant(double c = 1.0);
  static WarpFunction cosh();
  /// exp(r^2): complete metric whose curvature is unbounded below.
  static WarpFunction exp_r2();
  /// t^2 on (0, 1): the incomplete example metric.
  static WarpFunction t_squared();
  /// Looks up one of "cosh", "exp_r2", "t2", "flat".
  static WarpFunction by_name(const std::string& name);

  const std::string& name() const { return name_; }
  WarpValues operator()(double r) const { return eval_(r); }

 private:
  std::string name_;
  Eval eval_;
};

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double r) const { return r > lo && r < hi; }
};

/// Geodesic state (r, theta, r', theta').
using GeodesicState = std::array<double, 4>;

/// Endpoint of a geodesic plus d(r, theta)/d(initial velocity).
struct GeodesicFlow {
  GeodesicState state;
  Eigen::Matrix2d jacobian;
};

/// Right-hand side of the geodesic equations of dr^2 + phi(r)^2 dtheta^2:
/// (r', theta', phi phi' theta'^2, -2 (phi'/phi) r' theta').
GeodesicState warped_geodesic_ode(const GeodesicState& s, const WarpFunction& warp);

struct WarpedOptions {
  /// Arc-length step cap; the integrator uses at least min_steps steps.
  double max_arc_step = 1e-2;
  int min_steps = 200;
  /// Newton tolerance for log (metric norm of the endpoint residual).
  double shoot_tol = 1e-12;
  int max_newton_iters = 100;
};

/// Warped product I x_phi R with metric dr^2 + phi(r)^2 dtheta^2 and
/// coordinates (r, theta). Exp integrates the geodesic equations with a
/// fixed-step classical RK4 scheme, log solves the boundary value problem by
/// damped Newton shooting, transport integrates the parallel transport
/// equations along the exp trajectory.
class WarpedProduct final : public Manifold {
 public:
  WarpedProduct(WarpFunction warp, Interval interval, WarpedOptions options = {});

  std::string name() const override;
  int dimension() const override { return 2; }
  int ambient_size() const override { return 2; }

  const WarpFunction& warp() const { return warp_; }
  const Interval& interval() const { return interval_; }
  const WarpedOptions& options() const { return options_; }

  /// Number of RK4 steps used for a tangent vector of the given metric norm.
  int steps_for(double norm) const;

  /// Integrates the geodesic from state s over unit time in `steps` steps.
  /// Throws DomainExitError when r leaves the interval.
  GeodesicState integrate(const GeodesicState& s, int steps) const;
  GeodesicFlow integrate_with_jacobian(const GeodesicState& s, int steps) const;

  /// Lower estimate of the sectional curvature over region, from dense
  /// sampling of -phi''/phi and -(phi'/phi)^2.
  double sectional_curvature_bound(Interval region, int samples = 2001) const;

 protected:
  double inner_impl(const Vector& base, const Vector& u, const Vector& v) const override;
  Vector exp_impl(const Vector& base, const Vector& v) const override;
  Vector log_impl(const Vector& x, const Vector& y) const override;
  Vector transport_impl(const Vector& from, const Vector& v, const Vector& to) const override;
  double membership_error(const Vector& coords) const override;
  double tangent_error(const Vector& base, const Vector& v) const override;
  std::vector<Vector> tangent_basis_impl(const Vector& base) const override;
  Vector origin_impl() const override;

 private:
  double metric_norm(double r, double vr, double vtheta) const;
  /// Newton shooting from `guess`; velocities longer than max_norm count as
  /// failed evaluations.
  Vector shoot(const Vector& x, const Vector& y, const Vector& guess, double max_norm,
               double* residual) const;

  WarpFunction warp_;
  Interval interval_;
  WarpedOptions options_;
};

/// Free-function form used by the CLI and tests.
inline double sectional_curvature_bound(const WarpedProduct& m, Interval region) {
  return m.sectional_curvature_bound(region);
}

}  // namespace hgopt
