#include "tgp/problems.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>

namespace tgp {

SymTensor3::SymTensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {
  if (n < 1) {
    throw DimensionError("SymTensor3: dimension must be positive");
  }
}

SymTensor3 SymTensor3::symmetrize(int n, const std::vector<double> &dense) {
  SymTensor3 T(n);
  if (dense.size() != T.data_.size()) {
    throw DimensionError("SymTensor3::symmetrize: expected n^3 entries");
  }
  auto at = [&](int i, int j, int k) { return dense[T.index(i, j, k)]; };
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        T.data_[T.index(i, j, k)] = (at(i, j, k) + at(i, k, j) + at(j, i, k) +
                                     at(j, k, i) + at(k, i, j) + at(k, j, i)) /
                                    6.0;
      }
    }
  }
  return T;
}

double SymTensor3::asymmetry() const {
  double worst = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        const double v = (*this)(i, j, k);
        const std::array<double, 5> others{(*this)(i, k, j), (*this)(j, i, k),
                                           (*this)(j, k, i), (*this)(k, i, j),
                                           (*this)(k, j, i)};
        for (double o : others) {
          worst = std::max(worst, std::abs(v - o));
        }
      }
    }
  }
  return worst;
}

double SymTensor3::contract(const Vector &x, const Vector &y, const Vector &z) const {
  return x.dot(contract_23(y, z));
}

Vector SymTensor3::contract_23(const Vector &y, const Vector &z) const {
  if (y.size() != n_ || z.size() != n_) {
    throw DimensionError("SymTensor3::contract_23: vector length mismatch");
  }
  Vector out = Vector::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    for (int j = 0; j < n_; ++j) {
      const double w = y(j) * z(k);
      for (int i = 0; i < n_; ++i) {
        out(i) += (*this)(i, j, k) * w;
      }
    }
  }
  return out;
}

std::vector<double> SymTensor3::multilinear(const Matrix &X) const {
  if (X.rows() != n_) {
    throw DimensionError("SymTensor3::multilinear: row count mismatch");
  }
  const int n = n_;
  const int r = static_cast<int>(X.cols());
  // Mode 1: (a, j, k) over r x n x n.
  std::vector<double> m1(static_cast<std::size_t>(r) * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < r; ++a) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += X(i, a) * (*this)(i, j, k);
        m1[a + r * (j + n * k)] = s;
      }
  // Mode 2: (a, b, k) over r x r x n.
  std::vector<double> m2(static_cast<std::size_t>(r) * r * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int b = 0; b < r; ++b)
      for (int a = 0; a < r; ++a) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += X(j, b) * m1[a + r * (j + n * k)];
        m2[a + r * (b + r * k)] = s;
      }
  // Mode 3: (a, b, c) over r x r x r.
  std::vector<double> m3(static_cast<std::size_t>(r) * r * r, 0.0);
  for (int c = 0; c < r; ++c)
    for (int b = 0; b < r; ++b)
      for (int a = 0; a < r; ++a) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += X(k, c) * m2[a + r * (b + r * k)];
        m3[a + r * (b + r * c)] = s;
      }
  return m3;
}

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_symmetric(const Matrix &A, const char *where) {
  require_square(A, where);
  require_finite(A, where);
  if ((A - A.transpose()).norm() > 1e-12 * std::max(1.0, A.norm())) {
    throw std::invalid_argument(std::string(where) + ": matrix is not symmetric");
  }
}

} // namespace

ProblemInstance make_instance(ProblemData data, int r) {
  return std::visit(
      overloaded{
          [&](problem::Eigenvalue &p) -> ProblemInstance {
            require_symmetric(p.A, "Eigenvalue::A");
            const int n = static_cast<int>(p.A.rows());
            const double lmin = sym_eig(p.A).eigenvalues(n - 1);
            return {std::move(p), ManifoldKind::stiefel(n, 1), 0.5 * lmin};
          },
          [&](problem::QpInhomo &p) -> ProblemInstance {
            require_symmetric(p.A, "QpInhomo::A");
            const int n = static_cast<int>(p.A.rows());
            const int rr = static_cast<int>(p.Xstar.cols());
            ManifoldKind kind = ManifoldKind::stiefel(n, rr);
            ManifoldPoint check(kind, p.Xstar);
            if (sym_eig(p.A).eigenvalues(n - 1) < -1e-10 * std::max(1.0, p.A.norm())) {
              throw std::invalid_argument("QpInhomo::A must be positive semi-definite");
            }
            return {std::move(p), kind, 0.0};
          },
          [&](problem::Jamds &p) -> ProblemInstance {
            if (p.A.empty()) {
              throw std::invalid_argument("Jamds needs at least one matrix");
            }
            const int n = static_cast<int>(p.A.front().rows());
            for (const Matrix &A : p.A) {
              require_symmetric(A, "Jamds::A");
              require_shape(A, n, n, "Jamds::A");
            }
            return {std::move(p), ManifoldKind::stiefel(n, r), std::nullopt};
          },
          [&](problem::Jatds &p) -> ProblemInstance {
            if (p.T.empty()) {
              throw std::invalid_argument("Jatds needs at least one tensor");
            }
            const int n = p.T.front().dim();
            for (const SymTensor3 &T : p.T) {
              if (T.dim() != n) {
                throw DimensionError("Jatds: tensors of different sizes");
              }
              if (T.asymmetry() > 1e-12) {
                throw std::invalid_argument("Jatds: tensor is not symmetric");
              }
            }
            return {std::move(p), ManifoldKind::stiefel(n, r), std::nullopt};
          }},
      data);
}

double cost(const ProblemInstance &inst, const Matrix &X) {
  require_shape(X, inst.manifold.ambient_rows(), inst.manifold.ambient_cols(), "cost");
  return std::visit(
      overloaded{
          [&](const problem::Eigenvalue &p) {
            return 0.5 * (X.transpose() * p.A * X)(0, 0);
          },
          [&](const problem::QpInhomo &p) {
            const Matrix D = X - p.Xstar;
            return 0.5 * (D.transpose() * p.A * D).trace();
          },
          [&](const problem::Jamds &p) {
            double f = 0.0;
            for (const Matrix &A : p.A) {
              f -= (X.transpose() * A * X).diagonal().squaredNorm();
            }
            return f;
          },
          [&](const problem::Jatds &p) {
            const int r = static_cast<int>(X.cols());
            double f = 0.0;
            for (const SymTensor3 &T : p.T) {
              const std::vector<double> core = T.multilinear(X);
              for (int i = 0; i < r; ++i) {
                const double w = core[i + r * (i + r * i)];
                f -= w * w;
              }
            }
            return f;
          }},
      inst.data);
}

Matrix egrad(const ProblemInstance &inst, const Matrix &X) {
  require_shape(X, inst.manifold.ambient_rows(), inst.manifold.ambient_cols(), "egrad");
  return std::visit(
      overloaded{
          [&](const problem::Eigenvalue &p) -> Matrix { return p.A * X; },
          [&](const problem::QpInhomo &p) -> Matrix { return p.A * (X - p.Xstar); },
          [&](const problem::Jamds &p) -> Matrix {
            Matrix G = Matrix::Zero(X.rows(), X.cols());
            for (const Matrix &A : p.A) {
              const Matrix AX = A * X;
              const Vector d = (X.transpose() * AX).diagonal();
              G -= 4.0 * AX * d.asDiagonal();
            }
            return G;
          },
          [&](const problem::Jatds &p) -> Matrix {
            Matrix G = Matrix::Zero(X.rows(), X.cols());
            for (const SymTensor3 &T : p.T) {
              for (Eigen::Index i = 0; i < X.cols(); ++i) {
                const Vector x = X.col(i);
                const Vector t = T.contract_23(x, x);
                G.col(i) -= 6.0 * x.dot(t) * t;
              }
            }
            return G;
          }},
      inst.data);
}

double cost(const ProblemInstance &inst, const ManifoldPoint &X) {
  if (!(X.kind() == inst.manifold)) {
    throw std::invalid_argument("cost: point on a different manifold");
  }
  return cost(inst, X.value());
}

Matrix egrad(const ProblemInstance &inst, const ManifoldPoint &X) {
  if (!(X.kind() == inst.manifold)) {
    throw std::invalid_argument("egrad: point on a different manifold");
  }
  return egrad(inst, X.value());
}

Objective make_objective(const ProblemInstance &inst) {
  // The objective shares the instance data by value so it can outlive `inst`.
  auto shared = std::make_shared<const ProblemInstance>(inst);
  return Objective{inst.manifold,
                   [shared](const Matrix &X) { return cost(*shared, X); },
                   [shared](const Matrix &X) { return egrad(*shared, X); },
                   inst.known_fstar};
}

const char *to_string(ProblemKind kind) {
  switch (kind) {
  case ProblemKind::Eigenvalue:
    return "eigenvalue";
  case ProblemKind::QpCase1:
    return "qp_inhomo_case1";
  case ProblemKind::QpCase2:
    return "qp_inhomo_case2";
  case ProblemKind::Jamds:
    return "jamd_s";
  case ProblemKind::Jatds:
    return "jatd_s";
  }
  return "unknown";
}

GenerateParams default_params(ProblemKind kind) {
  switch (kind) {
  case ProblemKind::Eigenvalue:
    return {3, 1, 1, 0.0};
  case ProblemKind::Jamds:
    return {3, 2, 3, 0.02};
  default:
    return {3, 2, 1, 0.0};
  }
}

std::vector<Matrix> make_jamds_matrices(const Matrix &Q, const std::vector<Vector> &D,
                                        double noise, Rng &rng) {
  require_square(Q, "make_jamds_matrices");
  std::vector<Matrix> out;
  out.reserve(D.size());
  for (const Vector &d : D) {
    if (d.size() != Q.rows()) {
      throw DimensionError("make_jamds_matrices: diagonal length mismatch");
    }
    Matrix A = Q.transpose() * d.asDiagonal() * Q;
    if (noise != 0.0) {
      A += noise * sym(rand_gaussian(Q.rows(), Q.rows(), rng));
    }
    out.push_back(sym(A));
  }
  return out;
}

GeneratedInstance generate_instance(ProblemKind kind, const GenerateParams &params,
                                    std::uint64_t seed) {
  const int n = params.n;
  const int r = kind == ProblemKind::Eigenvalue ? 1 : params.r;
  if (n < 2 || r < 1 || r > n || params.L < 1) {
    throw std::invalid_argument("generate_instance: invalid sizes");
  }
  Rng rng(seed);
  ProblemData data = [&]() -> ProblemData {
    switch (kind) {
    case ProblemKind::Eigenvalue:
      return problem::Eigenvalue{sym(rand_gaussian(n, n, rng))};
    case ProblemKind::QpCase1: {
      const Matrix B = rand_gaussian(n, n, rng);
      Matrix Xs = rand_orthonormal(n, r, rng);
      return problem::QpInhomo{sym(B * B.transpose()), std::move(Xs)};
    }
    case ProblemKind::QpCase2: {
      Matrix Xs = rand_orthonormal(n, r, rng);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Vector d(n);
      for (int i = 0; i < n; ++i) {
        d(i) = 9.9 + 0.2 * u(rng);
      }
      const Matrix Q = rand_orthonormal(n, n, rng);
      return problem::QpInhomo{sym(Q.transpose() * d.asDiagonal() * Q), std::move(Xs)};
    }
    case ProblemKind::Jamds: {
      const Matrix Q = rand_orthonormal(n, n, rng);
      std::vector<Vector> D;
      for (int l = 0; l < params.L; ++l) {
        D.push_back(rand_gaussian(n, 1, rng).col(0));
      }
      return problem::Jamds{make_jamds_matrices(Q, D, params.noise, rng)};
    }
    case ProblemKind::Jatds: {
      std::vector<SymTensor3> T;
      std::normal_distribution<double> g(0.0, 1.0);
      for (int l = 0; l < params.L; ++l) {
        std::vector<double> dense(static_cast<std::size_t>(n) * n * n);
        for (double &v : dense) {
          v = g(rng);
        }
        T.push_back(SymTensor3::symmetrize(n, dense));
      }
      return problem::Jatds{std::move(T)};
    }
    }
    throw std::invalid_argument("generate_instance: unknown kind");
  }();
  ProblemInstance inst = make_instance(std::move(data), r);
  const Matrix G = rand_gaussian(n, r, rng);
  ManifoldPoint x0 = project_to_manifold(inst.manifold, G).point;
  return {std::move(inst), std::move(x0)};
}

GradientCheck check_gradient(const ProblemInstance &inst, int points,
                             std::uint64_t seed, double h) {
  Rng rng(seed);
  GradientCheck out;
  for (int p = 0; p < points; ++p) {
    const ManifoldPoint X = random_point(inst.manifold, rng);
    const Matrix G = egrad(inst, X.value());
    Matrix fd(G.rows(), G.cols());
    Matrix Xp = X.value();
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      for (Eigen::Index i = 0; i < G.rows(); ++i) {
        const double keep = Xp(i, j);
        Xp(i, j) = keep + h;
        const double fp = cost(inst, Xp);
        Xp(i, j) = keep - h;
        const double fm = cost(inst, Xp);
        Xp(i, j) = keep;
        fd(i, j) = (fp - fm) / (2.0 * h);
      }
    }
    const double rel = (fd - G).norm() / std::max(G.norm(), 1e-8);
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.points;
  }
  return out;
}

} // namespace tgp
