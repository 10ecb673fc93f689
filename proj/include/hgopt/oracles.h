#pragma once

#include <functional>
#include <vector>

#include "hgopt/objective.h"

namespace hgopt {

/// Central-difference gradient along an orthonormal frame at x, stepping
/// through Exp_x. With `richardson`, combines steps h and h/2 to cancel the
/// O(h^2) term. Never touches an analytic gradient.
TangentVector finite_diff_gradient(const std::function<double(const ManifoldPoint&)>& f,
                                   const Manifold& m, const ManifoldPoint& x, double h = 1e-5,
                                   bool richardson = false);

struct ReferenceSolution {
  explicit ReferenceSolution(ManifoldPoint p) : point(std::move(p)) {}

  ManifoldPoint point;
  double value = 0.0;
  /// Gradient norm at `point`.
  double certificate = 0.0;
  int iterations = 0;
  /// Objective value after each accepted step, for audit.
  std::vector<double> trail;
};

/// High-accuracy minimizer: geodesic gradient descent to a gradient norm of
/// 1e-13, restarted from its own output while progress is made. Throws
/// NumericalFailure when the certificate stays above `certify_tol`.
ReferenceSolution reference_minimize(const Objective& f, const ManifoldPoint& x0,
                                     double certify_tol = 1e-12);

struct AppendixReport {
  /// min over points of f(x) - ||grad f(x)||^2 / (2L) - f*.
  double worst_a1 = 0.0;
  /// min over points of (2/mu) ||grad f(x)||^2 - (f(x) - f*).
  double worst_a2 = 0.0;
  int points = 0;
  int violations = 0;
  bool a2_checked = false;
};

/// Evaluates both appendix inequalities at each point. A1 needs an L that is
/// valid on the region spanned by the points; A2 is skipped when mu = 0.
/// A point violates when either slack is below -tol.
AppendixReport appendix_inequality_check(const Objective& f,
                                         const std::vector<ManifoldPoint>& points, double L,
                                         double mu, double fstar, double tol = 1e-8);

}  // namespace hgopt
