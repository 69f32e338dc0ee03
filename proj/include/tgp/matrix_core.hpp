#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace tgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Thrown when operand shapes do not fit an operation.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a matrix holds NaN or Inf where finite values are required.
class NonFiniteError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Relative tolerance for factorization postconditions.
inline constexpr double kFactorTol = 1e-10;

/// Polar factor flagged as non-unique when sigma_min < kRankTol * sigma_max.
inline constexpr double kRankTol = 1e-12;

void require_square(const Matrix &M, const char *where);
void require_finite(const Matrix &M, const char *where);
void require_shape(const Matrix &M, Eigen::Index rows, Eigen::Index cols,
                   const char *where);

/// (M + M^T) / 2
Matrix sym(const Matrix &M);

/// (M - M^T) / 2
Matrix skew(const Matrix &M);

/// Frobenius inner product tr(A^T B).
double inner(const Matrix &A, const Matrix &B);

struct PolarFactors {
  Matrix orthogonal; // n x r, orthonormal columns
  Matrix psd;        // r x r symmetric positive semi-definite
  bool unique = true;
};

/// Polar decomposition Y = orthogonal * psd of an n x r matrix, n >= r.
/// Computed from a thin SVD; rank deficiency is reported through `unique`.
PolarFactors polar(const Matrix &Y);

struct SymEig {
  Vector eigenvalues;  // non-increasing
  Matrix eigenvectors; // column i pairs with eigenvalues(i)
};

/// Spectral decomposition of a symmetric matrix, eigenvalues sorted
/// non-increasing. The input is symmetrized first.
SymEig sym_eig(const Matrix &M);

/// Deterministic orthonormal completion X_perp with [X, X_perp] orthogonal.
/// Returns an n x (n - r) matrix (zero columns when r == n).
Matrix orthogonal_complement(const Matrix &X);

// Random generation. All functions are deterministic per seed.

Matrix rand_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng);
Matrix rand_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Orthogonal polar factor of a Gaussian n x r matrix.
Matrix rand_orthonormal(Eigen::Index n, Eigen::Index r, Rng &rng);
Matrix rand_orthonormal(Eigen::Index n, Eigen::Index r, std::uint64_t seed);

/// Q diag(lambda) Q^T with lambda uniform on [low, high] and Q sampled as
/// rand_orthonormal(r, r).
Matrix rand_sym_with_spectrum(Eigen::Index r, double low, double high,
                              Rng &rng);
Matrix rand_sym_with_spectrum(Eigen::Index r, double low, double high,
                              std::uint64_t seed);

/// splitmix64 finalizer; used to derive independent per-job seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace tgp
