#include "hgopt/manifolds.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgopt {

// ---------------------------------------------------------------------------
// EuclideanSpace

EuclideanSpace::EuclideanSpace(int dim) : dim_(dim) {
  if (dim < 1) throw ContractViolation("euclidean: dim must be >= 1");
}

std::string EuclideanSpace::name() const { return "euclidean(" + std::to_string(dim_) + ")"; }

double EuclideanSpace::inner_impl(const Vector&, const Vector& u, const Vector& v) const {
  return u.dot(v);
}

Vector EuclideanSpace::exp_impl(const Vector& base, const Vector& v) const { return base + v; }

Vector EuclideanSpace::log_impl(const Vector& x, const Vector& y) const { return y - x; }

double EuclideanSpace::distance_impl(const Vector& x, const Vector& y) const {
  return (y - x).norm();
}

Vector EuclideanSpace::transport_impl(const Vector&, const Vector& v, const Vector&) const {
  return v;
}

double EuclideanSpace::membership_error(const Vector&) const { return 0.0; }

double EuclideanSpace::tangent_error(const Vector&, const Vector&) const { return 0.0; }

std::vector<Vector> EuclideanSpace::tangent_basis_impl(const Vector&) const {
  std::vector<Vector> basis;
  for (int i = 0; i < dim_; ++i) basis.push_back(Vector::Unit(dim_, i));
  return basis;
}

Vector EuclideanSpace::origin_impl() const { return Vector::Zero(dim_); }

// ---------------------------------------------------------------------------
// HyperbolicSpace

HyperbolicSpace::HyperbolicSpace(int dim, double curvature)
    : dim_(dim), curvature_(curvature) {
  if (dim < 1) throw ContractViolation("hyperbolic: dim must be >= 1");
  if (!(curvature < 0.0) || !std::isfinite(curvature)) {
    throw ContractViolation("hyperbolic: curvature must be finite and negative");
  }
  radius_ = 1.0 / std::sqrt(-curvature);
}

std::string HyperbolicSpace::name() const {
  return "hyperbolic(" + std::to_string(dim_) + ", " + std::to_string(curvature_) + ")";
}

double HyperbolicSpace::lorentz(const Vector& a, const Vector& b) {
  return -a(0) * b(0) + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

double HyperbolicSpace::inner_impl(const Vector&, const Vector& u, const Vector& v) const {
  return lorentz(u, v);
}

Vector HyperbolicSpace::exp_impl(const Vector& base, const Vector& v) const {
  const double n = std::sqrt(std::max(0.0, lorentz(v, v)));
  const double s = n / radius_;
  return std::cosh(s) * base + (radius_ * std::sinh(s) / n) * v;
}

// The chord c = y - x is spacelike with <c,c>_L = 4 R^2 sinh^2(d / 2R); working
// from the chord avoids the cancellation of arccosh near 1.
Vector HyperbolicSpace::log_impl(const Vector& x, const Vector& y) const {
  const Vector chord = y - x;
  const double q = std::max(0.0, lorentz(chord, chord));
  const double r2 = radius_ * radius_;
  const double d = 2.0 * radius_ * std::asinh(std::sqrt(q) / (2.0 * radius_));
  if (d == 0.0) return Vector::Zero(x.size());
  const Vector u = chord - (q / (2.0 * r2)) * x;
  const double s = d / radius_;
  return (s / std::sinh(s)) * u;
}

double HyperbolicSpace::distance_impl(const Vector& x, const Vector& y) const {
  const Vector chord = y - x;
  const double q = std::max(0.0, lorentz(chord, chord));
  return 2.0 * radius_ * std::asinh(std::sqrt(q) / (2.0 * radius_));
}

Vector HyperbolicSpace::transport_impl(const Vector& from, const Vector& v,
                                       const Vector& to) const {
  const double denom = radius_ * radius_ - lorentz(from, to);
  return v + (lorentz(to, v) / denom) * (from + to);
}

double HyperbolicSpace::membership_error(const Vector& x) const {
  if (!(x(0) > 0.0)) return std::numeric_limits<double>::infinity();
  const double r2 = radius_ * radius_;
  return std::abs(lorentz(x, x) + r2) / std::max(r2, x(0) * x(0));
}

double HyperbolicSpace::tangent_error(const Vector& base, const Vector& v) const {
  return std::abs(lorentz(base, v)) / base.norm();
}

Vector HyperbolicSpace::project_point(const Vector& x) const {
  Vector p = x;
  p(0) = std::sqrt(radius_ * radius_ + x.tail(x.size() - 1).squaredNorm());
  return p;
}

Vector HyperbolicSpace::project_tangent(const Vector& base, const Vector& v) const {
  return v + (lorentz(base, v) / (radius_ * radius_)) * base;
}

std::vector<Vector> HyperbolicSpace::tangent_basis_impl(const Vector& base) const {
  std::vector<Vector> basis;
  for (int i = 1; i <= dim_; ++i) {
    Vector e = project_tangent(base, Vector::Unit(dim_ + 1, i));
    for (const auto& b : basis) e -= lorentz(b, e) * b;
    e /= std::sqrt(lorentz(e, e));
    basis.push_back(std::move(e));
  }
  return basis;
}

Vector HyperbolicSpace::origin_impl() const {
  Vector o = Vector::Zero(dim_ + 1);
  o(0) = radius_;
  return o;
}

// ---------------------------------------------------------------------------
// SPD helpers

namespace spd {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

namespace {

template <typename F>
Matrix spectral(const Matrix& x, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(x));
  const Vector lambda = es.eigenvalues().unaryExpr(f);
  return symmetrize(es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace

Matrix sqrtm(const Matrix& x) {
  return spectral(x, [](double l) { return std::sqrt(std::max(l, kEigenFloor)); });
}

Matrix inv_sqrtm(const Matrix& x) {
  return spectral(x, [](double l) { return 1.0 / std::sqrt(std::max(l, kEigenFloor)); });
}

Matrix expm_sym(const Matrix& x) {
  return spectral(x, [](double l) { return std::exp(l); });
}

Matrix logm_spd(const Matrix& x) {
  return spectral(x, [](double l) { return std::log(std::max(l, kEigenFloor)); });
}

}  // namespace spd

// ---------------------------------------------------------------------------
// SpdManifold

SpdManifold::SpdManifold(int n) : n_(n) {
  if (n < 1) throw ContractViolation("spd: n must be >= 1");
}

std::string SpdManifold::name() const { return "spd(" + std::to_string(n_) + ")"; }

Matrix SpdManifold::as_matrix(const Vector& coords) const {
  return Eigen::Map<const Matrix>(coords.data(), n_, n_);
}

Vector SpdManifold::as_coords(const Matrix& m) const {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

double SpdManifold::inner_impl(const Vector& base, const Vector& u, const Vector& v) const {
  Eigen::LLT<Matrix> llt(as_matrix(base));
  const Matrix a = llt.solve(as_matrix(u));
  const Matrix b = llt.solve(as_matrix(v));
  return (a * b).trace();
}

Vector SpdManifold::exp_impl(const Vector& base, const Vector& v) const {
  const Matrix x = as_matrix(base);
  const Matrix s = spd::sqrtm(x);
  const Matrix si = spd::inv_sqrtm(x);
  const Matrix inner = spd::expm_sym(si * as_matrix(v) * si);
  return as_coords(s * inner * s);
}

Vector SpdManifold::log_impl(const Vector& x, const Vector& y) const {
  const Matrix xm = as_matrix(x);
  const Matrix s = spd::sqrtm(xm);
  const Matrix si = spd::inv_sqrtm(xm);
  const Matrix inner = spd::logm_spd(si * as_matrix(y) * si);
  return as_coords(s * inner * s);
}

double SpdManifold::distance_impl(const Vector& x, const Vector& y) const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(spd::symmetrize(as_matrix(y)),
                                                       spd::symmetrize(as_matrix(x)));
  double sum = 0.0;
  for (double l : es.eigenvalues()) {
    const double lg = std::log(std::max(l, spd::kEigenFloor));
    sum += lg * lg;
  }
  return std::sqrt(sum);
}

// Gamma_{X->Y}(V) = E V E^T with E = X^{1/2} (X^{-1/2} Y X^{-1/2})^{1/2} X^{-1/2}.
Vector SpdManifold::transport_impl(const Vector& from, const Vector& v,
                                   const Vector& to) const {
  const Matrix xm = as_matrix(from);
  const Matrix s = spd::sqrtm(xm);
  const Matrix si = spd::inv_sqrtm(xm);
  const Matrix e = s * spd::sqrtm(si * as_matrix(to) * si) * si;
  return as_coords(spd::symmetrize(e * as_matrix(v) * e.transpose()));
}

double SpdManifold::membership_error(const Vector& coords) const {
  const Matrix x = as_matrix(coords);
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  const double asym = (x - x.transpose()).cwiseAbs().maxCoeff() / scale;
  Eigen::SelfAdjointEigenSolver<Matrix> es(spd::symmetrize(x), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 1e-12)) return std::numeric_limits<double>::infinity();
  return asym;
}

double SpdManifold::tangent_error(const Vector&, const Vector& v) const {
  const Matrix m = as_matrix(v);
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Vector SpdManifold::project_point(const Vector& coords) const {
  return as_coords(spd::symmetrize(as_matrix(coords)));
}

Vector SpdManifold::project_tangent(const Vector&, const Vector& v) const {
  return as_coords(spd::symmetrize(as_matrix(v)));
}

// X^{1/2} B X^{1/2} for a Frobenius-orthonormal basis B of symmetric matrices.
std::vector<Vector> SpdManifold::tangent_basis_impl(const Vector& base) const {
  const Matrix s = spd::sqrtm(as_matrix(base));
  std::vector<Vector> basis;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      Matrix b = Matrix::Zero(n_, n_);
      if (i == j) {
        b(i, i) = 1.0;
      } else {
        b(i, j) = b(j, i) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(as_coords(spd::symmetrize(s * b * s)));
    }
  }
  return basis;
}

Vector SpdManifold::origin_impl() const { return as_coords(Matrix::Identity(n_, n_)); }

}  // namespace hgopt
