#include "hgopt/geometry.h"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace hgopt {

namespace {

std::atomic<std::uint64_t> next_manifold_id{1};

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

void require_same_base(const TangentVector& u, const TangentVector& v) {
  const auto& a = u.base();
  const auto& b = v.base();
  if (!(a.manifold_id() == b.manifold_id()) || a.size() != b.size()) {
    throw ContractViolation("tangent vectors live on different manifolds");
  }
  const double scale = 1.0 + a.coords().cwiseAbs().maxCoeff();
  if ((a.coords() - b.coords()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractViolation("tangent vectors have different base points");
  }
}

TangentVector TangentVector::operator+(const TangentVector& o) const {
  require_same_base(*this, o);
  return {base_, coords_ + o.coords_};
}

TangentVector TangentVector::operator-(const TangentVector& o) const {
  require_same_base(*this, o);
  return {base_, coords_ - o.coords_};
}

Manifold::Manifold() : id_{next_manifold_id.fetch_add(1)} {}

void Manifold::require_owned(const ManifoldPoint& p) const {
  if (!(p.manifold_id() == id_)) {
    throw ContractViolation("point belongs to a different manifold than " + name());
  }
}

bool Manifold::contains(const Vector& coords, double tol) const {
  if (coords.size() != ambient_size() || !coords.allFinite()) return false;
  return membership_error(coords) <= tol;
}

ManifoldPoint Manifold::point(Vector coords) const {
  if (coords.size() != ambient_size()) {
    throw ContractViolation(name() + ": expected " + std::to_string(ambient_size()) +
                            " coordinates, got " + std::to_string(coords.size()));
  }
  if (!contains(coords, kMembershipTol)) {
    throw ContractViolation(name() + ": coordinates are not a point of the manifold");
  }
  return {id_, std::move(coords)};
}

TangentVector Manifold::tangent(const ManifoldPoint& base, Vector coords) const {
  require_owned(base);
  if (coords.size() != ambient_size() || !coords.allFinite()) {
    throw ContractViolation(name() + ": malformed tangent coordinates");
  }
  const double scale = 1.0 + coords.norm();
  if (tangent_error(base.coords(), coords) > kMembershipTol * scale) {
    throw ContractViolation(name() + ": vector is not tangent at its base point");
  }
  return {base, std::move(coords)};
}

TangentVector Manifold::zero_tangent(const ManifoldPoint& base) const {
  require_owned(base);
  return {base, Vector::Zero(ambient_size())};
}

double Manifold::inner(const TangentVector& u, const TangentVector& v) const {
  require_owned(u.base());
  require_same_base(u, v);
  return inner_impl(u.base().coords(), u.coords(), v.coords());
}

double Manifold::norm(const TangentVector& v) const {
  require_owned(v.base());
  return std::sqrt(std::max(0.0, inner_impl(v.base().coords(), v.coords(), v.coords())));
}

ManifoldPoint Manifold::exp(const TangentVector& v) const {
  require_owned(v.base());
  if (norm(v) < kExpGuard) return v.base();
  return {id_, project_point(exp_impl(v.base().coords(), v.coords()))};
}

TangentVector Manifold::log(const ManifoldPoint& x, const ManifoldPoint& y) const {
  require_owned(x);
  require_owned(y);
  if (x.same_as(y)) return zero_tangent(x);
  TangentVector v{x, project_tangent(x.coords(), log_impl(x.coords(), y.coords()))};
  if (norm(v) < kSmallNorm) return zero_tangent(x);
  return v;
}

double Manifold::distance_impl(const Vector& x, const Vector& y) const {
  const Vector v = log_impl(x, y);
  return std::sqrt(std::max(0.0, inner_impl(x, v, v)));
}

double Manifold::distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
  require_owned(x);
  require_owned(y);
  if (x.same_as(y)) return 0.0;
  if (lexicographically_less(y.coords(), x.coords())) {
    return distance_impl(y.coords(), x.coords());
  }
  return distance_impl(x.coords(), y.coords());
}

TangentVector Manifold::transport(const TangentVector& v, const ManifoldPoint& to) const {
  require_owned(v.base());
  require_owned(to);
  if (v.base().same_as(to)) return v;
  Vector w = transport_impl(v.base().coords(), v.coords(), to.coords());
  return {to, project_tangent(to.coords(), w)};
}

ManifoldPoint Manifold::geodesic_point(const ManifoldPoint& x, const ManifoldPoint& y,
                                       double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ContractViolation("geodesic_point: t must lie in [0, 1]");
  }
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  return exp(t * log(x, y));
}

std::vector<TangentVector> Manifold::tangent_basis(const ManifoldPoint& x) const {
  require_owned(x);
  std::vector<TangentVector> basis;
  for (auto& e : tangent_basis_impl(x.coords())) basis.emplace_back(x, std::move(e));
  return basis;
}

ManifoldPoint Manifold::origin() const { return {id_, origin_impl()}; }

TangentVector Manifold::random_tangent(Rng& rng, const ManifoldPoint& base,
                                       double max_norm) const {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  const auto basis = tangent_basis(base);
  Vector dir = Vector::Zero(ambient_size());
  Vector coeff(static_cast<Eigen::Index>(basis.size()));
  for (auto& c : coeff) c = gauss(rng);
  const double n = coeff.norm();
  if (n == 0.0) return zero_tangent(base);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    dir += coeff(static_cast<Eigen::Index>(k)) / n * basis[k].coords();
  }
  return {base, unit(rng) * max_norm * dir};
}

ManifoldPoint Manifold::random_point(Rng& rng, double radius) const {
  const ManifoldPoint o = origin();
  return exp(random_tangent(rng, o, radius));
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace hgopt
