#include "tgp/matrix_core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <sstream>

namespace tgp {

void require_square(const Matrix &M, const char *where) {
  if (M.rows() != M.cols()) {
    std::ostringstream os;
    os << where << ": expected a square matrix, got " << M.rows() << "x"
       << M.cols();
    throw DimensionError(os.str());
  }
}

void require_finite(const Matrix &M, const char *where) {
  if (!M.allFinite()) {
    throw NonFiniteError(std::string(where) + ": matrix has non-finite entries");
  }
}

void require_shape(const Matrix &M, Eigen::Index rows, Eigen::Index cols,
                   const char *where) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << where << ": expected " << rows << "x" << cols << ", got " << M.rows()
       << "x" << M.cols();
    throw DimensionError(os.str());
  }
}

Matrix sym(const Matrix &M) {
  require_square(M, "sym");
  return 0.5 * (M + M.transpose());
}

Matrix skew(const Matrix &M) {
  require_square(M, "skew");
  return 0.5 * (M - M.transpose());
}

double inner(const Matrix &A, const Matrix &B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw DimensionError("inner: shape mismatch");
  }
  return A.cwiseProduct(B).sum();
}

PolarFactors polar(const Matrix &Y) {
  if (Y.rows() < Y.cols() || Y.cols() < 1) {
    throw DimensionError("polar: need n >= r >= 1");
  }
  if (Y.cols() == 1) {
    // Plain normalization; keeps exact zeros exact.
    const double nrm = Y.norm();
    PolarFactors out;
    out.psd = Matrix::Constant(1, 1, nrm);
    out.unique = nrm > 0.0;
    if (out.unique) {
      out.orthogonal = Y / nrm;
    } else {
      out.orthogonal = Matrix::Zero(Y.rows(), 1);
      out.orthogonal(0, 0) = 1.0;
    }
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix &U = svd.matrixU();
  const Matrix &V = svd.matrixV();
  const Vector &s = svd.singularValues();

  PolarFactors out;
  out.orthogonal = U * V.transpose();
  out.psd = V * s.asDiagonal() * V.transpose();
  out.psd = sym(out.psd);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  out.unique = smax > 0.0 && smin >= kRankTol * smax;
  return out;
}

SymEig sym_eig(const Matrix &M) {
  require_square(M, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(M));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: eigensolver did not converge");
  }
  // Eigen sorts ascending; reverse to non-increasing.
  SymEig out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Matrix orthogonal_complement(const Matrix &X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index r = X.cols();
  if (r > n) {
    throw DimensionError("orthogonal_complement: more columns than rows");
  }
  Eigen::HouseholderQR<Matrix> qr(X);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  return Q.rightCols(n - r);
}

Matrix rand_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  if (rows < 1 || cols < 1) {
    throw DimensionError("rand_gaussian: dimensions must be positive");
  }
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      M(i, j) = g(rng);
    }
  }
  return M;
}

Matrix rand_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return rand_gaussian(rows, cols, rng);
}

Matrix rand_orthonormal(Eigen::Index n, Eigen::Index r, Rng &rng) {
  if (r < 1 || r > n) {
    throw DimensionError("rand_orthonormal: need 1 <= r <= n");
  }
  return polar(rand_gaussian(n, r, rng)).orthogonal;
}

Matrix rand_orthonormal(Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
  Rng rng(seed);
  return rand_orthonormal(n, r, rng);
}

Matrix rand_sym_with_spectrum(Eigen::Index r, double low, double high,
                              Rng &rng) {
  if (r < 1) {
    throw DimensionError("rand_sym_with_spectrum: r must be positive");
  }
  if (!(low <= high)) {
    throw std::invalid_argument("rand_sym_with_spectrum: low > high");
  }
  std::uniform_real_distribution<double> u(low, high);
  Vector lambda(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    lambda(i) = low == high ? low : u(rng);
  }
  const Matrix Q = rand_orthonormal(r, r, rng);
  return sym(Q * lambda.asDiagonal() * Q.transpose());
}

Matrix rand_sym_with_spectrum(Eigen::Index r, double low, double high,
                              std::uint64_t seed) {
  Rng rng(seed);
  return rand_sym_with_spectrum(r, low, high, rng);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ (stream * 0xd1b54a32d192ed03ULL));
}

} // namespace tgp
