#include "hgopt/objective.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hgopt/manifolds.h"

namespace hgopt {

Objective::Objective(std::shared_ptr<const Manifold> manifold, ValueFn value,
                     GradientFn gradient, double mu)
    : manifold_(std::move(manifold)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      mu_(mu) {
  if (!manifold_) throw ContractViolation("objective: null manifold");
  if (!(mu >= 0.0)) throw ContractViolation("objective: mu must be >= 0");
}

double Objective::value(const ManifoldPoint& x) const {
  manifold_->require_owned(x);
  return combined_ ? combined_(x).value : value_(x);
}

TangentVector Objective::gradient(const ManifoldPoint& x) const {
  manifold_->require_owned(x);
  return gradient_(x);
}

ValueAndGradient Objective::value_and_gradient(const ManifoldPoint& x) const {
  manifold_->require_owned(x);
  if (combined_) return combined_(x);
  return {value_(x), gradient_(x)};
}

Objective& Objective::with_combined(CombinedFn combined) {
  combined_ = std::move(combined);
  return *this;
}

Objective& Objective::with_smoothness(double L) {
  if (!(L > 0.0)) throw ContractViolation("objective: smoothness must be positive");
  smoothness_ = L;
  return *this;
}

Objective& Objective::with_minimizer(ManifoldPoint x, double value) {
  manifold_->require_owned(x);
  minimizer_ = std::move(x);
  min_value_ = value;
  return *this;
}

Objective& Objective::with_anchors(ObjectiveKind kind, std::vector<ManifoldPoint> anchors,
                                   std::vector<double> weights) {
  kind_ = kind;
  anchors_ = std::move(anchors);
  weights_ = std::move(weights);
  return *this;
}

Objective squared_distance_objective(std::shared_ptr<const Manifold> manifold,
                                     ManifoldPoint anchor) {
  manifold->require_owned(anchor);
  const Manifold* m = manifold.get();
  auto value = [m, anchor](const ManifoldPoint& z) {
    const double d = m->distance(anchor, z);
    return 0.5 * d * d;
  };
  auto gradient = [m, anchor](const ManifoldPoint& z) { return -m->log(z, anchor); };
  auto combined = [m, anchor](const ManifoldPoint& z) {
    TangentVector g = -m->log(z, anchor);
    const double n = m->norm(g);
    return ValueAndGradient{0.5 * n * n, std::move(g)};
  };
  Objective f(manifold, value, gradient, 1.0);
  f.with_combined(combined).with_minimizer(anchor, 0.0);
  f.with_anchors(ObjectiveKind::squared_distance, {anchor}, {1.0});
  if (dynamic_cast<const EuclideanSpace*>(m) != nullptr) f.with_smoothness(1.0);
  return f;
}

Objective frechet_mean_objective(std::shared_ptr<const Manifold> manifold,
                                 std::vector<ManifoldPoint> anchors,
                                 std::vector<double> weights) {
  if (anchors.empty()) throw ContractViolation("frechet: anchor list is empty");
  if (weights.empty()) weights.assign(anchors.size(), 1.0);
  if (weights.size() != anchors.size()) {
    throw ContractViolation("frechet: weights and anchors differ in length");
  }
  std::vector<ManifoldPoint> kept;
  std::vector<double> w;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    manifold->require_owned(anchors[i]);
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ContractViolation("frechet: weights must be finite and nonnegative");
    }
    if (weights[i] > 0.0) {
      kept.push_back(anchors[i]);
      w.push_back(weights[i]);
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw ContractViolation("frechet: all weights are zero");
  for (double& wi : w) wi /= total;

  const Manifold* m = manifold.get();
  auto combined = [m, kept, w](const ManifoldPoint& x) {
    double value = 0.0;
    Vector g = Vector::Zero(m->ambient_size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const TangentVector v = m->log(x, kept[i]);
      const double n = m->norm(v);
      value += 0.5 * w[i] * n * n;
      g -= w[i] * v.coords();
    }
    return ValueAndGradient{value, TangentVector(x, std::move(g))};
  };
  auto value = [m, kept, w](const ManifoldPoint& x) {
    double value = 0.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const double d = m->distance(x, kept[i]);
      value += 0.5 * w[i] * d * d;
    }
    return value;
  };
  auto gradient = [combined](const ManifoldPoint& x) { return combined(x).gradient; };

  Objective f(manifold, value, gradient, 1.0);
  f.with_combined(combined);
  if (dynamic_cast<const EuclideanSpace*>(m) != nullptr) {
    Vector mean = Vector::Zero(m->ambient_size());
    for (std::size_t i = 0; i < kept.size(); ++i) mean += w[i] * kept[i].coords();
    const ManifoldPoint xstar(m->id(), mean);
    f.with_smoothness(1.0).with_minimizer(xstar, value(xstar));
  }
  f.with_anchors(ObjectiveKind::frechet, std::move(kept), std::move(w));
  return f;
}

ManifoldPoint prox_closed_form(const Objective& sqdist, const ManifoldPoint& x, double eta) {
  if (sqdist.kind() != ObjectiveKind::squared_distance) {
    throw ContractViolation("prox_closed_form: objective is not a squared distance");
  }
  if (!(eta > 0.0)) throw ContractViolation("prox_closed_form: eta must be positive");
  return sqdist.manifold().geodesic_point(x, sqdist.anchors().front(), eta / (1.0 + eta));
}

double local_smoothness(const Objective& f, const ManifoldPoint& center, double radius,
                        Rng& rng, int pairs, double safety) {
  const Manifold& m = f.manifold();
  std::uniform_real_distribution<double> unit;
  double best = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const ManifoldPoint p = m.exp(m.random_tangent(rng, center, radius));
    // Alternate between nearby pairs (local Hessian) and spread-out pairs.
    const double reach = (k % 2 == 0) ? 0.05 * radius : radius;
    const ManifoldPoint q = m.exp(m.random_tangent(rng, p, reach));
    const double d = m.distance(p, q);
    if (d < 1e-9) continue;
    const TangentVector gp = f.gradient(p);
    const TangentVector gq = m.transport(f.gradient(q), p);
    best = std::max(best, m.norm(gp - gq) / d);
  }
  return safety * std::max(best, f.mu());
}

ManifoldPoint karcher_mean(const Objective& frechet, int max_iters, double tol) {
  const Manifold& m = frechet.manifold();
  if (frechet.anchors().empty()) throw ContractViolation("karcher_mean: no anchors");
  ManifoldPoint x = frechet.anchors().front();
  double step = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const ValueAndGradient vg = frechet.value_and_gradient(x);
    const double gn = m.norm(vg.gradient);
    if (gn <= tol) break;
    // Unit steps overshoot when the Hessian exceeds 2 (far-apart anchors on
    // curved spaces), so halve until the value decreases.
    bool moved = false;
    for (int halving = 0; halving < 60 && !moved; ++halving) {
      const ManifoldPoint trial = m.exp(-step * vg.gradient);
      if (frechet.value(trial) <= vg.value - 0.25 * step * gn * gn) {
        x = trial;
        moved = true;
      } else {
        step *= 0.5;
      }
    }
    if (!moved) break;
    step = std::min(1.0, 2.0 * step);
  }
  return x;
}

StochasticObjective::StochasticObjective(std::shared_ptr<const Manifold> manifold,
                                         std::vector<ManifoldPoint> anchors,
                                         std::uint64_t seed)
    : anchors_(anchors),
      mean_(frechet_mean_objective(manifold, anchors)),
      seed_(seed) {
  if (anchors_.size() < 2) throw ContractViolation("stochastic_frechet: need >= 2 anchors");
  for (const auto& a : anchors_) components_.push_back(squared_distance_objective(manifold, a));

  const Manifold& m = *manifold;
  center_ = karcher_mean(mean_);
  for (const auto& a : anchors_) radius_ = std::max(radius_, m.distance(center_, a));
  variance_bound_ = variance_at(center_);
  if (radius_ > 0.0) {
    Rng rng = make_rng(seed, 0x5157);
    constexpr int kSamples = 256;
    for (int k = 0; k < kSamples; ++k) {
      const ManifoldPoint p = m.exp(m.random_tangent(rng, center_, radius_));
      variance_bound_ = std::max(variance_bound_, variance_at(p));
    }
  }
}

std::size_t StochasticObjective::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, anchors_.size() - 1);
  return pick(rng);
}

ValueAndGradient StochasticObjective::component(const ManifoldPoint& x, std::size_t xi) const {
  return components_.at(xi).value_and_gradient(x);
}

double StochasticObjective::variance_at(const ManifoldPoint& x) const {
  const Manifold& m = manifold();
  double second_moment = 0.0;
  Vector mean_grad = Vector::Zero(m.ambient_size());
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const TangentVector g = -m.log(x, anchors_[i]);
    const double n = m.norm(g);
    second_moment += n * n;
    mean_grad += g.coords();
  }
  const double count = static_cast<double>(anchors_.size());
  second_moment /= count;
  const TangentVector gbar(x, mean_grad / count);
  const double gn = m.norm(gbar);
  return std::max(0.0, second_moment - gn * gn);
}

StochasticObjective stochastic_frechet(std::shared_ptr<const Manifold> manifold,
                                       std::vector<ManifoldPoint> anchors, std::uint64_t seed) {
  return StochasticObjective(std::move(manifold), std::move(anchors), seed);
}

}  // namespace hgopt
