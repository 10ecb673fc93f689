#pragma once

#include <optional>
#include <vector>

#include "hgopt/geometry.h"

namespace hgopt {

class Objective;

/// Memoizes pairwise distances on one manifold. Randomized sweeps evaluate
/// the same pairs many times, and on the warped product every distance is a
/// shooting solve. Not thread-safe; use one cache per thread.
class DistanceCache {
 public:
  explicit DistanceCache(const Manifold& manifold) : manifold_(manifold) {}

  const Manifold& manifold() const { return manifold_; }
  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const;
  void clear() const { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    ManifoldPoint a;
    ManifoldPoint b;
    double d;
  };
  const Manifold& manifold_;
  mutable std::vector<Entry> entries_;
};

struct QuasiInnerResult {
  double value = 0.0;
  /// Unset when either segment is shorter than 1e-12.
  std::optional<double> cosq;
};

/// Quasilinearized inner product of x->y and z->w:
/// ((d(x,w)^2 + d(y,z)^2) - (d(x,z)^2 + d(y,w)^2)) / 2.
/// The grouping makes the result exactly symmetric under swapping the
/// segments and exactly antisymmetric under reversing either one.
QuasiInnerResult quasi_inner(const Manifold& m, const GeodesicSegment& s1,
                             const GeodesicSegment& s2);
QuasiInnerResult quasi_inner(const DistanceCache& m, const GeodesicSegment& s1,
                             const GeodesicSegment& s2);

/// |<xz,uw> - <xy,uw> - <yz,uw>|, the additivity residual.
double quasi_add_check(const Manifold& m, const ManifoldPoint& x, const ManifoldPoint& y,
                       const ManifoldPoint& z, const ManifoldPoint& u,
                       const ManifoldPoint& w);
double quasi_add_check(const DistanceCache& m, const ManifoldPoint& x,
                       const ManifoldPoint& y, const ManifoldPoint& z,
                       const ManifoldPoint& u, const ManifoldPoint& w);

struct TangentComparison {
  double quasi;    ///< <xy, xz>
  double tangent;  ///< <Exp_x^{-1} y, Exp_x^{-1} z>_x
};

/// Both sides of the comparison <xy, xz> <= <Exp_x^{-1} y, Exp_x^{-1} z>_x.
TangentComparison compare_to_tangent(const Manifold& m, const ManifoldPoint& x,
                                     const ManifoldPoint& y, const ManifoldPoint& z);
TangentComparison compare_to_tangent(const DistanceCache& m, const ManifoldPoint& x,
                                     const ManifoldPoint& y, const ManifoldPoint& z);

/// f(x) - f(y) - <y Exp_y(grad f(y)), yx> - (mu/2) d(x,y)^2. Nonnegative
/// whenever f is q-convex with parameter mu.
double q_convexity_gap(const Objective& f, const ManifoldPoint& x, const ManifoldPoint& y,
                       double mu);

/// Largest pairwise distance within a point set.
double diameter(const Manifold& m, const std::vector<ManifoldPoint>& points);

}  // namespace hgopt
