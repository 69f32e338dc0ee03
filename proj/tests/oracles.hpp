#pragma once

// Reference computations used only by the tests. They are written from
// scratch so the checks do not share code paths with the library's
// Eigen-backed factorizations.

#include "tgp/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using tgp::Matrix;

struct Svd {
  Matrix U; // n x r
  std::vector<double> s;
  Matrix V; // r x r
};

/// One-sided Jacobi (Hestenes) SVD of a tall matrix.
inline Svd jacobi_svd(Matrix A) {
  const Eigen::Index n = A.rows();
  const Eigen::Index r = A.cols();
  Matrix V = Matrix::Identity(r, r);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < r; ++p) {
      for (Eigen::Index q = p + 1; q < r; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          alpha += A(i, p) * A(i, p);
          beta += A(i, q) * A(i, q);
          gamma += A(i, p) * A(i, q);
        }
        if (gamma == 0.0) {
          continue;
        }
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double ap = A(i, p), aq = A(i, q);
          A(i, p) = c * ap - s * aq;
          A(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < r; ++i) {
          const double vp = V(i, p), vq = V(i, q);
          V(i, p) = c * vp - s * vq;
          V(i, q) = s * vp + c * vq;
        }
      }
    }
    if (off < 1e-15) {
      break;
    }
  }
  Svd out;
  out.U = Matrix(n, r);
  out.V = V;
  for (Eigen::Index j = 0; j < r; ++j) {
    double nrm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nrm += A(i, j) * A(i, j);
    }
    nrm = std::sqrt(nrm);
    out.s.push_back(nrm);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.U(i, j) = A(i, j) / nrm;
    }
  }
  return out;
}

inline Matrix polar_factor(const Matrix &Y) {
  const Svd d = jacobi_svd(Y);
  return d.U * d.V.transpose();
}

struct Eig {
  std::vector<double> values; // descending
  Matrix vectors;             // columns
};

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
inline Eig jacobi_eig(Matrix A) {
  const Eigen::Index n = A.rows();
  Matrix V = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        off += A(p, q) * A(p, q);
      }
    }
    if (off < 1e-32) {
      break;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) {
          continue;
        }
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return A(a, a) > A(b, b); });
  Eig out;
  out.vectors = Matrix(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values.push_back(A(idx[j], idx[j]));
    out.vectors.col(j) = V.col(idx[j]);
  }
  return out;
}

/// Projector onto the top-p eigenspace of the symmetric part of Y.
inline Matrix grassmann_projection(const Matrix &Y, int p) {
  const Eig e = jacobi_eig(0.5 * (Y + Y.transpose()));
  const Matrix U = e.vectors.leftCols(p);
  return U * U.transpose();
}

/// Central-difference Euclidean gradient of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix &)> &f, const Matrix &X,
                          double h = 1e-6) {
  Matrix G(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      Matrix P = X, M = X;
      P(i, j) += h;
      M(i, j) -= h;
      G(i, j) = (f(P) - f(M)) / (2.0 * h);
    }
  }
  return G;
}

} // namespace oracle
