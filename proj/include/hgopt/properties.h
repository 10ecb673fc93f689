#pragma once

#include "hgopt/solvers.h"

namespace hgopt {

/// Randomized property sweeps. Points are drawn with Manifold::random_point
/// around the manifold origin; "scaled" errors are divided by max(1, D^2)
/// where D is the diameter of the sampled tuple.

struct QuasiAxiomReport {
  long tuples = 0;
  /// Bitwise failures of <xy,zw> == <zw,xy> and <yx,zw> == -<xy,zw>.
  long symmetry_failures = 0;
  long sign_flip_failures = 0;
  /// Largest scaled |<xz,uw> - <xy,uw> - <yz,uw>|.
  double worst_additivity = 0.0;
  /// Largest scaled |<xy,xy> - d(x,y)^2|.
  double worst_self = 0.0;
};

QuasiAxiomReport check_quasi_axioms(const Manifold& m, Rng& rng, int tuples, double radius);

/// Worst value of a one-sided check and the number of samples beyond `tol`.
struct PropertyReport {
  long samples = 0;
  long violations = 0;
  double worst = 0.0;
};

/// Largest scaled <xy,xz> - <Exp_x^{-1} y, Exp_x^{-1} z>_x (should be <= 0).
PropertyReport check_tangent_comparison(const Manifold& m, Rng& rng, int triples, double radius,
                                        double tol = 1e-8);

/// Largest ||v1 - v2||_x - d(Exp_x v1, Exp_x v2) (should be <= 0).
PropertyReport check_triangle_comparison(const Manifold& m, Rng& rng, int samples, double radius,
                                         double tol = 1e-6);

/// Largest ||Exp_x^{-1}(Exp_x v) - v|| / max(||v||, 1) over ||v|| <= max_norm.
PropertyReport check_round_trip(const Manifold& m, Rng& rng, int samples, double radius,
                                double max_norm, double tol);

/// Largest | ||Gamma v|| - ||v|| | for transports to random points.
PropertyReport check_transport_isometry(const Manifold& m, Rng& rng, int samples, double radius,
                                        double tol = 1e-8);

/// Largest d(x,z) - d(x,y) - d(y,z) (should be <= 0).
PropertyReport check_triangle_inequality(const Manifold& m, Rng& rng, int samples, double radius,
                                         double tol = 1e-10);

/// Largest ||grad f - fd grad|| / max(||fd grad||, 1e-8) at random points.
PropertyReport check_gradient(const Objective& f, Rng& rng, int points, double radius,
                              double tol, bool richardson = false);

/// Smallest q_convexity_gap(f, x, y, mu) over random pairs; violations are
/// gaps below -tol.
PropertyReport check_q_convexity(const Objective& f, Rng& rng, int pairs, double radius,
                                 double tol = 1e-8);

struct ContractionReport {
  double bound = 0.0;       ///< 1 - mu / (4 L0)
  double worst_ratio = 0.0; ///< largest (h(z_{k+1}) - h*) / (h(z_k) - h*)
  int ratios = 0;           ///< steps whose starting gap exceeded the floor
  int iterations = 0;
  bool converged = false;
};

/// Runs inner_gd from z0 with the given rule (fixed uses step 1/L0) and
/// measures per-step gap ratios against h* from a certified reference
/// solve. Steps starting below `gap_floor` are skipped since their ratios
/// are rounding noise.
ContractionReport check_contraction(const Objective& h, const ManifoldPoint& z0, double L0,
                                    StepRule rule, double gap_floor = 1e-10);

}  // namespace hgopt
