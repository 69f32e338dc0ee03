#pragma once

#include "tgp/solver.hpp"

#include <optional>
#include <vector>

namespace tgp {

/// Dense symmetric order-3 tensor, entry (i, j, k) at i + n (j + n k).
class SymTensor3 {
public:
  explicit SymTensor3(int n);

  /// Average over all six index permutations of a dense n^3 array.
  static SymTensor3 symmetrize(int n, const std::vector<double> &dense);

  int dim() const { return n_; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  const std::vector<double> &data() const { return data_; }

  /// Largest |T_ijk - T_pi(ijk)| over all entries and permutations.
  double asymmetry() const;

  /// T(x, y, z) = sum T_ijk x_i y_j z_k.
  double contract(const Vector &x, const Vector &y, const Vector &z) const;
  /// Vector T(., y, z).
  Vector contract_23(const Vector &y, const Vector &z) const;

  /// Core tensor T x_1 X^T x_2 X^T x_3 X^T as a dense r^3 array, formed by
  /// three successive mode products.
  std::vector<double> multilinear(const Matrix &X) const;

private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_) * k);
  }
  int n_;
  std::vector<double> data_;
};

namespace problem {

/// 1/2 x^T A x on the sphere St(1, n).
struct Eigenvalue {
  Matrix A;
};

/// 1/2 tr((X - Xs)^T A (X - Xs)) with A PSD; global minimum 0.
struct QpInhomo {
  Matrix A;
  Matrix Xstar;
};

/// -sum_l ||diag(X^T A_l X)||^2.
struct Jamds {
  std::vector<Matrix> A;
};

/// -sum_l ||diag(T_l x_1 X^T x_2 X^T x_3 X^T)||^2.
struct Jatds {
  std::vector<SymTensor3> T;
};

} // namespace problem

using ProblemData =
    std::variant<problem::Eigenvalue, problem::QpInhomo, problem::Jamds, problem::Jatds>;

struct ProblemInstance {
  ProblemData data;
  ManifoldKind manifold;
  std::optional<double> known_fstar;
};

/// Builds an instance and checks the data invariants (symmetry, shapes).
ProblemInstance make_instance(ProblemData data, int r = 1);

double cost(const ProblemInstance &inst, const Matrix &X);
Matrix egrad(const ProblemInstance &inst, const Matrix &X);

double cost(const ProblemInstance &inst, const ManifoldPoint &X);
Matrix egrad(const ProblemInstance &inst, const ManifoldPoint &X);

Objective make_objective(const ProblemInstance &inst);

enum class ProblemKind { Eigenvalue, QpCase1, QpCase2, Jamds, Jatds };

const char *to_string(ProblemKind kind);

struct GenerateParams {
  int n = 3;
  int r = 2;
  int L = 1;
  double noise = 0.02;
};

/// Default sizes used in the benchmarks for each kind.
GenerateParams default_params(ProblemKind kind);

struct GeneratedInstance {
  ProblemInstance instance;
  ManifoldPoint x0;
};

/// Seeded instance plus a starting point obtained by projecting a Gaussian
/// matrix onto the manifold.
GeneratedInstance generate_instance(ProblemKind kind, const GenerateParams &params,
                                    std::uint64_t seed);

/// Joint-diagonalization matrices A_l = Q^T D_l Q + noise sym(G_l).
std::vector<Matrix> make_jamds_matrices(const Matrix &Q,
                                        const std::vector<Vector> &D,
                                        double noise, Rng &rng);

struct GradientCheck {
  double max_rel_error = 0.0;
  int points = 0;
};

/// Central differences of the cost along every ambient coordinate at
/// `points` random feasible points, compared with egrad.
GradientCheck check_gradient(const ProblemInstance &inst, int points,
                             std::uint64_t seed, double h = 1e-5);

} // namespace tgp
