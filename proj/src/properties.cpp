#include "hgopt/properties.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgopt/oracles.h"
#include "hgopt/quasilinear.h"

namespace hgopt {

namespace {

double scale_of(double diameter) { return std::max(1.0, diameter * diameter); }

void note(PropertyReport& r, double value, bool violated) {
  if (r.samples == 0 || value > r.worst) r.worst = value;
  ++r.samples;
  if (violated) ++r.violations;
}

}  // namespace

QuasiAxiomReport check_quasi_axioms(const Manifold& m, Rng& rng, int tuples, double radius) {
  QuasiAxiomReport rep;
  for (int k = 0; k < tuples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const ManifoldPoint y = m.random_point(rng, radius);
    const ManifoldPoint z = m.random_point(rng, radius);
    const ManifoldPoint w = m.random_point(rng, radius);
    // Four points give six distinct distances; every check below reuses them.
    DistanceCache cache(m);
    const double D = std::max({cache.distance(x, y), cache.distance(x, z), cache.distance(x, w),
                               cache.distance(y, z), cache.distance(y, w), cache.distance(z, w)});
    const double s = scale_of(D);

    const double xy_zw = quasi_inner(cache, {x, y}, {z, w}).value;
    if (quasi_inner(cache, {z, w}, {x, y}).value != xy_zw) ++rep.symmetry_failures;
    if (quasi_inner(cache, {y, x}, {z, w}).value != -xy_zw) ++rep.sign_flip_failures;
    if (quasi_inner(cache, {x, y}, {w, z}).value != -xy_zw) ++rep.sign_flip_failures;

    const double dxy = cache.distance(x, y);
    const double self = quasi_inner(cache, {x, y}, {x, y}).value;
    rep.worst_self = std::max(rep.worst_self, std::abs(self - dxy * dxy) / s);
    rep.worst_additivity =
        std::max(rep.worst_additivity, quasi_add_check(cache, x, y, z, w, x) / s);
    ++rep.tuples;
  }
  return rep;
}

PropertyReport check_tangent_comparison(const Manifold& m, Rng& rng, int triples, double radius,
                                        double tol) {
  PropertyReport rep;
  for (int k = 0; k < triples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const ManifoldPoint y = m.random_point(rng, radius);
    const ManifoldPoint z = m.random_point(rng, radius);
    DistanceCache cache(m);
    const TangentComparison c = compare_to_tangent(cache, x, y, z);
    const double D = std::max({cache.distance(x, y), cache.distance(x, z), cache.distance(y, z)});
    const double excess = (c.quasi - c.tangent) / scale_of(D);
    note(rep, excess, excess > tol);
  }
  return rep;
}

PropertyReport check_triangle_comparison(const Manifold& m, Rng& rng, int samples, double radius,
                                         double tol) {
  PropertyReport rep;
  for (int k = 0; k < samples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const TangentVector v1 = m.random_tangent(rng, x, radius);
    const TangentVector v2 = m.random_tangent(rng, x, radius);
    const double excess = m.norm(v1 - v2) - m.distance(m.exp(v1), m.exp(v2));
    note(rep, excess, excess > tol);
  }
  return rep;
}

PropertyReport check_round_trip(const Manifold& m, Rng& rng, int samples, double radius,
                                double max_norm, double tol) {
  PropertyReport rep;
  for (int k = 0; k < samples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const TangentVector v = m.random_tangent(rng, x, max_norm);
    const TangentVector back = m.log(x, m.exp(v));
    const double err = m.norm(back - v) / std::max(m.norm(v), 1.0);
    note(rep, err, err > tol);
  }
  return rep;
}

PropertyReport check_transport_isometry(const Manifold& m, Rng& rng, int samples, double radius,
                                        double tol) {
  PropertyReport rep;
  for (int k = 0; k < samples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const ManifoldPoint y = m.random_point(rng, radius);
    const TangentVector v = m.random_tangent(rng, x, 1.0);
    const double err = std::abs(m.norm(m.transport(v, y)) - m.norm(v));
    note(rep, err, err > tol);
  }
  return rep;
}

PropertyReport check_triangle_inequality(const Manifold& m, Rng& rng, int samples, double radius,
                                         double tol) {
  PropertyReport rep;
  for (int k = 0; k < samples; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const ManifoldPoint y = m.random_point(rng, radius);
    const ManifoldPoint z = m.random_point(rng, radius);
    const double excess = m.distance(x, z) - m.distance(x, y) - m.distance(y, z);
    note(rep, excess, excess > tol);
  }
  return rep;
}

PropertyReport check_gradient(const Objective& f, Rng& rng, int points, double radius,
                              double tol, bool richardson) {
  const Manifold& m = f.manifold();
  PropertyReport rep;
  auto value = [&f](const ManifoldPoint& p) { return f.value(p); };
  for (int k = 0; k < points; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const TangentVector fd = finite_diff_gradient(value, m, x, 1e-5, richardson);
    const TangentVector g = f.gradient(x);
    const double err = m.norm(g - fd) / std::max(m.norm(fd), 1e-8);
    note(rep, err, err > tol);
  }
  return rep;
}

PropertyReport check_q_convexity(const Objective& f, Rng& rng, int pairs, double radius,
                                 double tol) {
  const Manifold& m = f.manifold();
  PropertyReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const ManifoldPoint x = m.random_point(rng, radius);
    const ManifoldPoint y = m.random_point(rng, radius);
    const double gap = q_convexity_gap(f, x, y, f.mu());
    rep.worst = std::min(rep.worst, gap);
    ++rep.samples;
    if (gap < -tol) ++rep.violations;
  }
  if (rep.samples == 0) rep.worst = 0.0;
  return rep;
}

ContractionReport check_contraction(const Objective& h, const ManifoldPoint& z0, double L0,
                                    StepRule rule, double gap_floor) {
  if (!(L0 > 0.0)) throw ContractViolation("check_contraction: L0 must be positive");
  const double hstar = reference_minimize(h, z0).value;
  InnerConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.max_iters = 100000;
  cfg.step_rule = rule;
  cfg.fixed_L0 = L0;
  cfg.record_values = true;
  const InnerResult r = inner_gd(h, z0, cfg);

  ContractionReport rep;
  rep.bound = 1.0 - h.mu() / (4.0 * L0);
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  for (std::size_t k = 0; k + 1 < r.values.size(); ++k) {
    const double gap = r.values[k] - hstar;
    if (gap <= gap_floor) break;
    rep.worst_ratio = std::max(rep.worst_ratio, (r.values[k + 1] - hstar) / gap);
    ++rep.ratios;
  }
  return rep;
}

}  // namespace hgopt
