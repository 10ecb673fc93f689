#pragma once

#include "hgopt/geometry.h"

namespace hgopt {

/// Flat R^n.
class EuclideanSpace final : public Manifold {
 public:
  explicit EuclideanSpace(int dim);

  std::string name() const override;
  int dimension() const override { return dim_; }
  int ambient_size() const override { return dim_; }

 protected:
  double inner_impl(const Vector& base, const Vector& u, const Vector& v) const override;
  Vector exp_impl(const Vector& base, const Vector& v) const override;
  Vector log_impl(const Vector& x, const Vector& y) const override;
  double distance_impl(const Vector& x, const Vector& y) const override;
  Vector transport_impl(const Vector& from, const Vector& v, const Vector& to) const override;
  double membership_error(const Vector& coords) const override;
  double tangent_error(const Vector& base, const Vector& v) const override;
  std::vector<Vector> tangent_basis_impl(const Vector& base) const override;
  Vector origin_impl() const override;

 private:
  int dim_;
};

/// Hyperbolic space of constant curvature kappa < 0 in the hyperboloid model:
/// points x in R^{dim+1} with <x,x>_L = 1/kappa and x_0 > 0, where
/// <a,b>_L = -a_0 b_0 + sum_i a_i b_i.
class HyperbolicSpace final : public Manifold {
 public:
  explicit HyperbolicSpace(int dim, double curvature = -1.0);

  std::string name() const override;
  int dimension() const override { return dim_; }
  int ambient_size() const override { return dim_ + 1; }
  double curvature() const { return curvature_; }

  static double lorentz(const Vector& a, const Vector& b);

 protected:
  double inner_impl(const Vector& base, const Vector& u, const Vector& v) const override;
  Vector exp_impl(const Vector& base, const Vector& v) const override;
  Vector log_impl(const Vector& x, const Vector& y) const override;
  double distance_impl(const Vector& x, const Vector& y) const override;
  Vector transport_impl(const Vector& from, const Vector& v, const Vector& to) const override;
  double membership_error(const Vector& coords) const override;
  double tangent_error(const Vector& base, const Vector& v) const override;
  Vector project_point(const Vector& coords) const override;
  Vector project_tangent(const Vector& base, const Vector& v) const override;
  std::vector<Vector> tangent_basis_impl(const Vector& base) const override;
  Vector origin_impl() const override;

 private:
  int dim_;
  double curvature_;
  double radius_;  // 1/sqrt(-curvature)
};

/// Symmetric positive definite n x n matrices with the affine-invariant metric
/// <U,V>_X = tr(X^{-1} U X^{-1} V). Coordinates are the n*n matrix entries.
class SpdManifold final : public Manifold {
 public:
  explicit SpdManifold(int n);

  std::string name() const override;
  int dimension() const override { return n_ * (n_ + 1) / 2; }
  int ambient_size() const override { return n_ * n_; }
  int matrix_size() const { return n_; }

  Matrix as_matrix(const Vector& coords) const;
  Vector as_coords(const Matrix& m) const;

 protected:
  double inner_impl(const Vector& base, const Vector& u, const Vector& v) const override;
  Vector exp_impl(const Vector& base, const Vector& v) const override;
  Vector log_impl(const Vector& x, const Vector& y) const override;
  double distance_impl(const Vector& x, const Vector& y) const override;
  Vector transport_impl(const Vector& from, const Vector& v, const Vector& to) const override;
  double membership_error(const Vector& coords) const override;
  double tangent_error(const Vector& base, const Vector& v) const override;
  Vector project_point(const Vector& coords) const override;
  Vector project_tangent(const Vector& base, const Vector& v) const override;
  std::vector<Vector> tangent_basis_impl(const Vector& base) const override;
  Vector origin_impl() const override;

 private:
  int n_;
};

/// Symmetric matrix function helpers used by the SPD manifold.
namespace spd {

constexpr double kEigenFloor = 1e-14;

Matrix symmetrize(const Matrix& m);
Matrix sqrtm(const Matrix& x);
Matrix inv_sqrtm(const Matrix& x);
Matrix expm_sym(const Matrix& x);
Matrix logm_spd(const Matrix& x);

}  // namespace spd

}  // namespace hgopt
