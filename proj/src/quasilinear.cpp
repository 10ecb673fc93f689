#include "hgopt/quasilinear.h"

#include <algorithm>
#include <cmath>

#include "hgopt/objective.h"

namespace hgopt {

double DistanceCache::distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
  for (const auto& e : entries_) {
    if ((e.a.same_as(x) && e.b.same_as(y)) || (e.a.same_as(y) && e.b.same_as(x))) return e.d;
  }
  const double d = manifold_.distance(x, y);
  entries_.push_back({x, y, d});
  return d;
}

namespace {

const Manifold& manifold_of(const Manifold& m) { return m; }
const Manifold& manifold_of(const DistanceCache& c) { return c.manifold(); }

void require_same_manifold(const Manifold& m, std::initializer_list<const ManifoldPoint*> pts) {
  for (const auto* p : pts) m.require_owned(*p);
}

template <typename Metric>
QuasiInnerResult quasi_inner_impl(const Metric& metric, const GeodesicSegment& s1,
                                  const GeodesicSegment& s2) {
  const auto& [x, y] = s1;
  const auto& [z, w] = s2;
  require_same_manifold(manifold_of(metric), {&x, &y, &z, &w});
  auto sq = [&](const ManifoldPoint& a, const ManifoldPoint& b) {
    const double d = metric.distance(a, b);
    return d * d;
  };
  QuasiInnerResult out;
  out.value = ((sq(x, w) + sq(y, z)) - (sq(x, z) + sq(y, w))) / 2.0;
  const double l1 = metric.distance(x, y);
  const double l2 = metric.distance(z, w);
  if (l1 >= kSmallNorm && l2 >= kSmallNorm) out.cosq = out.value / (l1 * l2);
  return out;
}

template <typename Metric>
double quasi_add_check_impl(const Metric& metric, const ManifoldPoint& x,
                            const ManifoldPoint& y, const ManifoldPoint& z,
                            const ManifoldPoint& u, const ManifoldPoint& w) {
  const GeodesicSegment uw{u, w};
  const double whole = quasi_inner_impl(metric, {x, z}, uw).value;
  const double first = quasi_inner_impl(metric, {x, y}, uw).value;
  const double second = quasi_inner_impl(metric, {y, z}, uw).value;
  return std::abs(whole - first - second);
}

template <typename Metric>
TangentComparison compare_impl(const Metric& metric, const ManifoldPoint& x,
                               const ManifoldPoint& y, const ManifoldPoint& z) {
  const Manifold& m = manifold_of(metric);
  TangentComparison out;
  out.quasi = quasi_inner_impl(metric, {x, y}, {x, z}).value;
  out.tangent = m.inner(m.log(x, y), m.log(x, z));
  return out;
}

}  // namespace

QuasiInnerResult quasi_inner(const Manifold& m, const GeodesicSegment& s1,
                             const GeodesicSegment& s2) {
  return quasi_inner_impl(m, s1, s2);
}

QuasiInnerResult quasi_inner(const DistanceCache& m, const GeodesicSegment& s1,
                             const GeodesicSegment& s2) {
  return quasi_inner_impl(m, s1, s2);
}

double quasi_add_check(const Manifold& m, const ManifoldPoint& x, const ManifoldPoint& y,
                       const ManifoldPoint& z, const ManifoldPoint& u,
                       const ManifoldPoint& w) {
  return quasi_add_check_impl(m, x, y, z, u, w);
}

double quasi_add_check(const DistanceCache& m, const ManifoldPoint& x,
                       const ManifoldPoint& y, const ManifoldPoint& z,
                       const ManifoldPoint& u, const ManifoldPoint& w) {
  return quasi_add_check_impl(m, x, y, z, u, w);
}

TangentComparison compare_to_tangent(const Manifold& m, const ManifoldPoint& x,
                                     const ManifoldPoint& y, const ManifoldPoint& z) {
  return compare_impl(m, x, y, z);
}

TangentComparison compare_to_tangent(const DistanceCache& m, const ManifoldPoint& x,
                                     const ManifoldPoint& y, const ManifoldPoint& z) {
  return compare_impl(m, x, y, z);
}

double q_convexity_gap(const Objective& f, const ManifoldPoint& x, const ManifoldPoint& y,
                       double mu) {
  const Manifold& m = f.manifold();
  const ValueAndGradient at_y = f.value_and_gradient(y);
  const ManifoldPoint pushed = m.exp(at_y.gradient);
  const double q = quasi_inner(m, {y, pushed}, {y, x}).value;
  const double d = m.distance(x, y);
  return f.value(x) - at_y.value - q - 0.5 * mu * d * d;
}

double diameter(const Manifold& m, const std::vector<ManifoldPoint>& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, m.distance(points[i], points[j]));
    }
  }
  return best;
}

}  // namespace hgopt
