#include "tgp/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tgp {

ManifoldKind ManifoldKind::stiefel(int n, int r) {
  if (r < 1 || r > n) {
    throw std::invalid_argument("Stiefel manifold needs 1 <= r <= n");
  }
  return {Type::Stiefel, n, r};
}

ManifoldKind ManifoldKind::grassmann(int n, int p) {
  // p = 0 and p = n give a single point.
  if (p < 1 || p > n - 1) {
    throw std::invalid_argument("Grassmann manifold needs 1 <= p <= n - 1");
  }
  return {Type::Grassmann, n, p};
}

std::string ManifoldKind::name() const {
  std::ostringstream os;
  os << (is_stiefel() ? "St(" : "Gr(") << k_ << "," << n_ << ")";
  return os.str();
}

double feasibility_residual(const ManifoldKind &kind, const Matrix &X) {
  require_shape(X, kind.ambient_rows(), kind.ambient_cols(),
                "feasibility_residual");
  if (!X.allFinite()) {
    return std::numeric_limits<double>::infinity();
  }
  if (kind.is_stiefel()) {
    const auto r = kind.k();
    return (X.transpose() * X - Matrix::Identity(r, r)).norm();
  }
  const double asym = (X - X.transpose()).norm();
  const double idem = (X * X - X).norm();
  const double rank = std::abs(X.trace() - kind.k());
  return std::max({asym, idem, rank});
}

ManifoldPoint::ManifoldPoint(ManifoldKind kind, Matrix value, double tol)
    : kind_(kind), value_(std::move(value)) {
  const double res = feasibility_residual(kind_, value_);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "point is not on " << kind_.name() << " (residual " << res << ")";
    throw InfeasiblePointError(os.str());
  }
}

TangentVector project_tangent(const ManifoldPoint &X, const Matrix &Y) {
  const auto &kind = X.kind();
  require_shape(Y, kind.ambient_rows(), kind.ambient_cols(), "project_tangent");
  const Matrix &x = X.value();
  if (kind.is_stiefel()) {
    return {X, Y - x * sym(x.transpose() * Y)};
  }
  const Eigen::Index n = kind.n();
  return {X, 2.0 * sym(x * sym(Y) * (Matrix::Identity(n, n) - x))};
}

NormalVector project_normal(const ManifoldPoint &X, const Matrix &Y) {
  TangentVector t = project_tangent(X, Y);
  return {X, Y - t.value};
}

TangentVector riemannian_gradient(const ManifoldPoint &X, const Matrix &egrad) {
  return project_tangent(X, egrad);
}

ProjectionResult project_to_manifold(const ManifoldKind &kind, const Matrix &Y) {
  require_shape(Y, kind.ambient_rows(), kind.ambient_cols(),
                "project_to_manifold");
  require_finite(Y, "project_to_manifold");
  if (kind.is_stiefel()) {
    PolarFactors pf = polar(Y);
    return {ManifoldPoint(kind, std::move(pf.orthogonal)), pf.unique};
  }
  const SymEig eig = sym_eig(Y);
  const int p = kind.k();
  const Matrix Qp = eig.eigenvectors.leftCols(p);
  Matrix P = Qp * Qp.transpose();
  P = sym(P);
  const bool unique = eig.eigenvalues(p - 1) - eig.eigenvalues(p) > kTieTol;
  return {ManifoldPoint(kind, std::move(P)), unique};
}

double distance_to_manifold(const ManifoldKind &kind, const Matrix &Y) {
  return (Y - project_to_manifold(kind, Y).point.value()).norm();
}

double reach(const ManifoldKind &kind) {
  return kind.is_stiefel() ? 1.0 : 1.0 / std::sqrt(2.0);
}

bool is_tangent(const ManifoldPoint &X, const Matrix &V, double tol) {
  const auto &kind = X.kind();
  require_shape(V, kind.ambient_rows(), kind.ambient_cols(), "is_tangent");
  const double scale = std::max(1.0, V.norm());
  const Matrix &x = X.value();
  if (kind.is_stiefel()) {
    return sym(x.transpose() * V).norm() <= tol * scale;
  }
  const double asym = (V - V.transpose()).norm();
  const double eq = (V - V * x - x * V).norm();
  return std::max(asym, eq) <= tol * scale;
}

bool is_normal(const ManifoldPoint &X, const Matrix &V, double tol) {
  const double scale = std::max(1.0, V.norm());
  return project_tangent(X, V).value.norm() <= tol * scale;
}

ManifoldPoint random_point(const ManifoldKind &kind, Rng &rng) {
  if (kind.is_stiefel()) {
    return ManifoldPoint(kind, rand_orthonormal(kind.n(), kind.k(), rng));
  }
  const Matrix Q = rand_orthonormal(kind.n(), kind.k(), rng);
  return ManifoldPoint(kind, sym(Q * Q.transpose()));
}

namespace {

Matrix rescale(Matrix M, double norm) {
  const double cur = M.norm();
  if (cur == 0.0) {
    return M;
  }
  return M * (norm / cur);
}

} // namespace

Matrix random_tangent(const ManifoldPoint &X, double norm, Rng &rng) {
  const auto &kind = X.kind();
  Matrix G = rand_gaussian(kind.ambient_rows(), kind.ambient_cols(), rng);
  return rescale(project_tangent(X, G).value, norm);
}

Matrix random_normal(const ManifoldPoint &X, double norm, Rng &rng) {
  const auto &kind = X.kind();
  if (kind.is_stiefel()) {
    const Matrix S = sym(rand_gaussian(kind.k(), kind.k(), rng));
    return rescale(X.value() * S, norm);
  }
  const Matrix G = sym(rand_gaussian(kind.n(), kind.n(), rng));
  return rescale(project_normal(X, G).value, norm);
}

Matrix grassmann_basis(const ManifoldPoint &X) {
  if (!X.kind().is_grassmann()) {
    throw std::invalid_argument("grassmann_basis: not a Grassmann point");
  }
  return sym_eig(X.value()).eigenvectors;
}

} // namespace tgp
