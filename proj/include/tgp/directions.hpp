#pragma once

#include "tgp/manifolds.hpp"

#include <cstdint>
#include <variant>

namespace tgp {

/// Thrown for a direction recipe that cannot be applied to the given point.
class UnsupportedSpecError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Stiefel family: L = I + mu X E X^T + Xp F Xp^T, R = E, where Xp is the
/// orthonormal completion of X.
struct StiefelScaling {
  Matrix E;
  Matrix F;
  double mu = 0.0;

  static StiefelScaling identity(int n, int r);
};

/// Grassmann family: L = R = Q Diag(G1, G2) Q^T with X = Q Diag(I_p, 0) Q^T.
struct GrassmannScaling {
  Matrix G1;
  Matrix G2;
};

/// Arbitrary fixed L and R, used to probe (A1) outside the known families.
struct ExplicitScaling {
  Matrix L;
  Matrix R;
};

using Scaling = std::variant<StiefelScaling, GrassmannScaling, ExplicitScaling>;

struct ScalingMatrices {
  Matrix L;
  Matrix R;
};

ScalingMatrices scaling_matrices(const Scaling &scaling, const ManifoldPoint &X);

/// How S_k in the a X S_k normal term is chosen.
struct SPolicy {
  enum class Kind { Identity, Uniform, FixedPerInstance };
  Kind kind = Kind::FixedPerInstance;
  double lo = 0.5;
  double hi = 1.5;
  std::uint64_t seed = 0;

  static SPolicy identity() { return {Kind::Identity, 1.0, 1.0, 0}; }
  static SPolicy fixed(std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
    return {Kind::FixedPerInstance, lo, hi, seed};
  }
  static SPolicy uniform(std::uint64_t seed, double lo = 0.5, double hi = 1.5) {
    return {Kind::Uniform, lo, hi, seed};
  }
};

/// Uniform draws a fresh S for every k; FixedPerInstance ignores k.
Matrix sample_S_policy(const SPolicy &policy, int r, std::uint64_t k = 0);

struct NormalRecipe {
  double a = 0.0;
  SPolicy S = SPolicy::identity();
  bool include_euclidean_normal = false;
};

namespace preset {

struct Rgd {};
struct Egp {};
/// Sphere only: H = egrad + (1 - s) x.
struct ShiftedPM {
  double s = 0.0;
};
struct DRho {
  double rho = 0.25;
};
struct TgpR {
  double a = 0.0;
  SPolicy S;
};
struct TgpE {
  double a = 0.0;
  SPolicy S;
};
struct TgpDE {
  double rho = 0.25;
  double a = 0.0;
  SPolicy S;
};
struct TgpDF {
  StiefelScaling scaling;
  double a = 0.0;
  SPolicy S;
};
/// L = I + F_scale Xp ones Xp^T, R = 1, no normal term.
struct TgpAEigen {
  double F_scale = 0.05;
};

} // namespace preset

struct General {
  Scaling scaling;
  NormalRecipe normal;
};

using DirectionSpec =
    std::variant<preset::Rgd, preset::Egp, preset::ShiftedPM, preset::DRho,
                 preset::TgpR, preset::TgpE, preset::TgpDE, preset::TgpDF,
                 preset::TgpAEigen, General>;

struct Direction {
  ManifoldPoint base;
  Matrix full;
  TangentVector tangent;
  NormalVector normal;
  TangentVector rgrad;

  /// <grad f, H~>, positive for a descent direction.
  double descent() const { return inner(rgrad.value, tangent.value); }
};

/// Builds H_k from `spec` at X given the Euclidean gradient. `k` selects
/// S_k for per-iteration policies.
Direction build_direction(const DirectionSpec &spec, const ManifoldPoint &X,
                          const Matrix &egrad, std::uint64_t k = 0);

/// The D_rho tangent direction in its expanded form.
Matrix d_rho(const ManifoldPoint &X, const Matrix &egrad, double rho);

/// Scaling family equivalent to the tangent part of a preset, if any.
/// Presets whose tangent part is grad f map to the identity scaling.
Scaling preset_scaling(const DirectionSpec &spec, const ManifoldKind &kind);

/// Short label, e.g. "TGP-E(a=0.7)".
std::string describe(const DirectionSpec &spec);

/// Samples `trials` random tangent vectors V and checks L V R stays tangent.
bool check_assumption_A1(const Scaling &scaling, const ManifoldPoint &X,
                         int trials = 32, std::uint64_t seed = 0);

struct A2Bounds {
  double upsilon = 0.0;
  double varpi = 0.0;
  /// True when the bounds come from a closed-form certificate with
  /// upsilon > 0 and PSD scaling matrices.
  bool certified = false;
};

/// Closed-form (upsilon, varpi) for the Stiefel and Grassmann families.
/// Explicit scalings are estimated by sampling and never certified.
A2Bounds assumption_A2_bounds(const Scaling &scaling, const ManifoldPoint &X,
                              int trials = 64, std::uint64_t seed = 0);

} // namespace tgp
