#pragma once

#include "tgp/matrix_core.hpp"

#include <string>

namespace tgp {

/// Feasibility tolerance for manifold points.
inline constexpr double kFeasTol = 1e-8;

/// Grassmann projection is flagged non-unique when lambda_p - lambda_{p+1}
/// does not exceed this gap.
inline constexpr double kTieTol = 1e-12;

/// Thrown for a matrix that is not (close enough to) a point on the manifold.
class InfeasiblePointError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Stiefel St(r, n): n x r matrices with orthonormal columns.
/// Grassmann Gr(p, n): rank-p orthogonal projectors, stored as n x n.
class ManifoldKind {
public:
  enum class Type { Stiefel, Grassmann };

  static ManifoldKind stiefel(int n, int r);
  static ManifoldKind grassmann(int n, int p);

  Type type() const { return type_; }
  bool is_stiefel() const { return type_ == Type::Stiefel; }
  bool is_grassmann() const { return type_ == Type::Grassmann; }

  int n() const { return n_; }
  /// r for Stiefel, p for Grassmann.
  int k() const { return k_; }

  Eigen::Index ambient_rows() const { return n_; }
  Eigen::Index ambient_cols() const { return is_stiefel() ? k_ : n_; }

  /// e.g. "St(2,4)" or "Gr(1,3)".
  std::string name() const;

  bool operator==(const ManifoldKind &other) const = default;

private:
  ManifoldKind(Type type, int n, int k) : type_(type), n_(n), k_(k) {}
  Type type_;
  int n_;
  int k_;
};

/// Residual of the defining equations: ||X^T X - I|| on Stiefel;
/// max(||X - X^T||, ||X^2 - X||, |tr X - p|) on Grassmann.
double feasibility_residual(const ManifoldKind &kind, const Matrix &X);

/// A validated point on a manifold.
class ManifoldPoint {
public:
  /// Throws InfeasiblePointError when the residual exceeds `tol`.
  ManifoldPoint(ManifoldKind kind, Matrix value, double tol = kFeasTol);

  const ManifoldKind &kind() const { return kind_; }
  const Matrix &value() const { return value_; }

private:
  ManifoldKind kind_;
  Matrix value_;
};

struct TangentVector {
  ManifoldPoint base;
  Matrix value;
};

struct NormalVector {
  ManifoldPoint base;
  Matrix value;
};

struct ProjectionResult {
  ManifoldPoint point;
  bool unique = true;
};

TangentVector project_tangent(const ManifoldPoint &X, const Matrix &Y);

/// Residual Y - project_tangent(X, Y).
NormalVector project_normal(const ManifoldPoint &X, const Matrix &Y);

/// Tangent projection of the Euclidean gradient.
TangentVector riemannian_gradient(const ManifoldPoint &X, const Matrix &egrad);

/// Metric projection onto the manifold. Stiefel: orthogonal polar factor.
/// Grassmann: top-p spectral projector of sym(Y).
ProjectionResult project_to_manifold(const ManifoldKind &kind, const Matrix &Y);

/// Frobenius distance from Y to its projection.
double distance_to_manifold(const ManifoldKind &kind, const Matrix &Y);

/// Radius of the tubular neighbourhood with unique projection:
/// 1 for Stiefel, 1/sqrt(2) for Grassmann.
double reach(const ManifoldKind &kind);

/// Membership checks, relative to max(1, ||V||).
bool is_tangent(const ManifoldPoint &X, const Matrix &V, double tol = 1e-10);
bool is_normal(const ManifoldPoint &X, const Matrix &V, double tol = 1e-10);

// Sampling helpers.

ManifoldPoint random_point(const ManifoldKind &kind, Rng &rng);

/// Gaussian in the tangent space, rescaled to Frobenius norm `norm`.
Matrix random_tangent(const ManifoldPoint &X, double norm, Rng &rng);

/// Symmetric normal vector with Frobenius norm `norm`. Stiefel: X S with
/// S symmetric. Grassmann: normal component of a symmetric Gaussian.
Matrix random_normal(const ManifoldPoint &X, double norm, Rng &rng);

/// Q with X = Q diag(I_p, 0) Q^T, for a Grassmann point.
Matrix grassmann_basis(const ManifoldPoint &X);

} // namespace tgp
