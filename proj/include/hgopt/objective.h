#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hgopt/geometry.h"

namespace hgopt {

struct ValueAndGradient {
  double value;
  TangentVector gradient;
};

enum class ObjectiveKind { generic, squared_distance, frechet };

/// A differentiable objective on a manifold: value and Riemannian gradient
/// oracles plus convexity/smoothness metadata.
class Objective {
 public:
  using ValueFn = std::function<double(const ManifoldPoint&)>;
  using GradientFn = std::function<TangentVector(const ManifoldPoint&)>;
  using CombinedFn = std::function<ValueAndGradient(const ManifoldPoint&)>;

  /// mu is the strong g-convexity parameter (0 for plain g-convexity).
  Objective(std::shared_ptr<const Manifold> manifold, ValueFn value, GradientFn gradient,
            double mu);

  const Manifold& manifold() const { return *manifold_; }
  const std::shared_ptr<const Manifold>& manifold_ptr() const { return manifold_; }

  double value(const ManifoldPoint& x) const;
  TangentVector gradient(const ManifoldPoint& x) const;
  /// Shares work between the two oracles when a combined oracle was supplied.
  ValueAndGradient value_and_gradient(const ManifoldPoint& x) const;

  double mu() const { return mu_; }
  /// Global smoothness constant, when one exists.
  const std::optional<double>& smoothness() const { return smoothness_; }
  const std::optional<ManifoldPoint>& minimizer() const { return minimizer_; }
  const std::optional<double>& min_value() const { return min_value_; }

  ObjectiveKind kind() const { return kind_; }
  const std::vector<ManifoldPoint>& anchors() const { return anchors_; }
  const std::vector<double>& weights() const { return weights_; }

  Objective& with_combined(CombinedFn combined);
  Objective& with_smoothness(double L);
  Objective& with_minimizer(ManifoldPoint x, double value);
  Objective& with_anchors(ObjectiveKind kind, std::vector<ManifoldPoint> anchors,
                          std::vector<double> weights);

 private:
  std::shared_ptr<const Manifold> manifold_;
  ValueFn value_;
  GradientFn gradient_;
  CombinedFn combined_;
  double mu_;
  std::optional<double> smoothness_;
  std::optional<ManifoldPoint> minimizer_;
  std::optional<double> min_value_;
  ObjectiveKind kind_ = ObjectiveKind::generic;
  std::vector<ManifoldPoint> anchors_;
  std::vector<double> weights_;
};

/// f(z) = d(anchor, z)^2 / 2 with gradient -Exp_z^{-1}(anchor); 1-strongly
/// g-convex on any Hadamard manifold.
Objective squared_distance_objective(std::shared_ptr<const Manifold> manifold,
                                     ManifoldPoint anchor);

/// F(x) = sum_i w_i d(x, a_i)^2 / 2. Weights are normalized to sum to one and
/// zero-weight anchors are dropped. An empty weight list means uniform.
Objective frechet_mean_objective(std::shared_ptr<const Manifold> manifold,
                                 std::vector<ManifoldPoint> anchors,
                                 std::vector<double> weights = {});

/// Closed-form prox of a squared-distance objective: the point at fraction
/// eta / (1 + eta) along the geodesic from x to the anchor.
ManifoldPoint prox_closed_form(const Objective& sqdist, const ManifoldPoint& x, double eta);

/// Sampled local Lipschitz constant of the gradient over the geodesic ball
/// B(center, radius): max ||grad f(p) - Gamma_q^p grad f(q)|| / d(p,q) over
/// random pairs, times `safety`.
double local_smoothness(const Objective& f, const ManifoldPoint& center, double radius,
                        Rng& rng, int pairs = 200, double safety = 1.5);

/// Fixed-point (Karcher) iteration x <- Exp_x(-grad F(x)); used to locate the
/// sampling region of a Frechet objective, not as a certified solver.
ManifoldPoint karcher_mean(const Objective& frechet, int max_iters = 2000, double tol = 1e-12);

/// Finite-sum stochastic objective F(x) = E f(x; xi) with xi uniform over the
/// anchors and f(x; xi) = d(x, a_xi)^2 / 2.
class StochasticObjective {
 public:
  StochasticObjective(std::shared_ptr<const Manifold> manifold,
                      std::vector<ManifoldPoint> anchors, std::uint64_t seed);

  const Manifold& manifold() const { return mean_.manifold(); }
  std::size_t num_components() const { return anchors_.size(); }
  std::uint64_t seed() const { return seed_; }

  /// Draws xi uniformly from the component indices.
  std::size_t sample(Rng& rng) const;
  ValueAndGradient component(const ManifoldPoint& x, std::size_t xi) const;
  const Objective& component_objective(std::size_t xi) const { return components_.at(xi); }
  const Objective& mean() const { return mean_; }

  /// E ||grad f(x; xi)||^2 - ||grad F(x)||^2, computed exactly over the sum.
  double variance_at(const ManifoldPoint& x) const;
  /// Largest variance over a dense sample of a ball around the mean that
  /// contains every anchor. Valid on that region only.
  double variance_bound() const { return variance_bound_; }
  const ManifoldPoint& sampling_center() const { return center_; }
  double sampling_radius() const { return radius_; }

 private:
  std::vector<ManifoldPoint> anchors_;
  std::vector<Objective> components_;
  Objective mean_;
  std::uint64_t seed_;
  ManifoldPoint center_;
  double radius_ = 0.0;
  double variance_bound_ = 0.0;
};

StochasticObjective stochastic_frechet(std::shared_ptr<const Manifold> manifold,
                                       std::vector<ManifoldPoint> anchors, std::uint64_t seed);

}  // namespace hgopt
