#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hgopt/errors.h"

namespace hgopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Opaque identity of a manifold instance. Two manifolds built with the same
/// parameters still get different ids.
struct ManifoldId {
  std::uint64_t value = 0;
  friend bool operator==(ManifoldId, ManifoldId) = default;
};

/// A point in the ambient coordinates of its owning manifold.
class ManifoldPoint {
 public:
  ManifoldPoint() = default;
  ManifoldPoint(ManifoldId owner, Vector coords)
      : owner_(owner), coords_(std::move(coords)) {}

  ManifoldId manifold_id() const { return owner_; }
  const Vector& coords() const { return coords_; }
  Eigen::Index size() const { return coords_.size(); }

  /// Bitwise coordinate equality on the same manifold.
  bool same_as(const ManifoldPoint& other) const {
    return owner_ == other.owner_ && coords_.size() == other.coords_.size() &&
           coords_ == other.coords_;
  }

 private:
  ManifoldId owner_;
  Vector coords_;
};

/// A tangent vector: its base point plus ambient tangent coordinates.
class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(ManifoldPoint base, Vector coords)
      : base_(std::move(base)), coords_(std::move(coords)) {}

  const ManifoldPoint& base() const { return base_; }
  const Vector& coords() const { return coords_; }
  ManifoldId manifold_id() const { return base_.manifold_id(); }

  TangentVector operator*(double s) const { return {base_, s * coords_}; }
  TangentVector operator-() const { return {base_, -coords_}; }
  TangentVector operator+(const TangentVector& o) const;
  TangentVector operator-(const TangentVector& o) const;

 private:
  ManifoldPoint base_;
  Vector coords_;
};

inline TangentVector operator*(double s, const TangentVector& v) { return v * s; }

/// Throws ContractViolation unless u and v are based at the same point.
void require_same_base(const TangentVector& u, const TangentVector& v);

/// Ordered geodesic segment start -> end.
struct GeodesicSegment {
  ManifoldPoint start;
  ManifoldPoint end;

  GeodesicSegment reversed() const { return {end, start}; }
};

/// Abstract Hadamard manifold. Concrete manifolds implement the *_impl hooks on
/// raw coordinates; the public API wraps them with identity checks, small-norm
/// guards and re-projection onto the manifold.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class Manifold {
 public:
  Manifold();
  virtual ~Manifold() = default;

  Manifold(const Manifold&) = delete;
  Manifold& operator=(const Manifold&) = delete;

  ManifoldId id() const { return id_; }

  virtual std::string name() const = 0;
  /// Intrinsic dimension.
  virtual int dimension() const = 0;
  /// Length of the ambient coordinate vector.
  virtual int ambient_size() const = 0;

  /// Wraps raw coordinates as a point; throws ContractViolation when the
  /// coordinates fail the membership test at tolerance 1e-10.
  ManifoldPoint point(Vector coords) const;
  /// Wraps raw coordinates as a tangent vector at base, checked the same way.
  TangentVector tangent(const ManifoldPoint& base, Vector coords) const;
  TangentVector zero_tangent(const ManifoldPoint& base) const;

  bool contains(const Vector& coords, double tol = 1e-10) const;

  double inner(const TangentVector& u, const TangentVector& v) const;
  double norm(const TangentVector& v) const;

  ManifoldPoint exp(const TangentVector& v) const;
  TangentVector log(const ManifoldPoint& x, const ManifoldPoint& y) const;
  /// Geodesic distance. Arguments are put into a canonical order first so
  /// that distance(x, y) and distance(y, x) are bitwise identical.
  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const;
  TangentVector transport(const TangentVector& v, const ManifoldPoint& to) const;

  /// Exp_x(t Exp_x^{-1}(y)).
  ManifoldPoint geodesic_point(const ManifoldPoint& x, const ManifoldPoint& y,
                               double t) const;

  /// Orthonormal frame of the tangent space at x.
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const;

  /// A fixed reference point ("origin") used by samplers and the CLI.
  ManifoldPoint origin() const;
  /// Exp at base of a uniformly oriented tangent vector with norm uniform in
  /// [0, max_norm].
  TangentVector random_tangent(Rng& rng, const ManifoldPoint& base,
                               double max_norm) const;
  /// Random point within geodesic distance `radius` of origin().
  ManifoldPoint random_point(Rng& rng, double radius) const;

  void require_owned(const ManifoldPoint& p) const;

 protected:
  virtual double inner_impl(const Vector& base, const Vector& u,
                            const Vector& v) const = 0;
  virtual Vector exp_impl(const Vector& base, const Vector& v) const = 0;
  virtual Vector log_impl(const Vector& x, const Vector& y) const = 0;
  virtual double distance_impl(const Vector& x, const Vector& y) const;
  virtual Vector transport_impl(const Vector& from, const Vector& v,
                                const Vector& to) const = 0;
  virtual double membership_error(const Vector& coords) const = 0;
  virtual double tangent_error(const Vector& base, const Vector& v) const = 0;
  virtual Vector project_point(const Vector& coords) const { return coords; }
  virtual Vector project_tangent(const Vector& /*base*/, const Vector& v) const {
    return v;
  }
  virtual std::vector<Vector> tangent_basis_impl(const Vector& base) const = 0;
  virtual Vector origin_impl() const = 0;

 private:
  ManifoldId id_;
};

constexpr double kMembershipTol = 1e-10;
constexpr double kSmallNorm = 1e-12;
/// exp returns its base point below this norm. Far below kSmallNorm so that
/// descent steps of length ~1e-13 still move.
constexpr double kExpGuard = 1e-15;

/// Convenience free functions mirroring the manifold methods.
inline double metric_inner(const Manifold& m, const TangentVector& u,
                           const TangentVector& v) {
  return m.inner(u, v);
}

/// Seeds an engine from a (seed, stream) pair.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace hgopt
