#pragma once

#include "tgp/directions.hpp"

#include <functional>
#include <utility>

namespace tgp {

/// Thrown when a line search is asked to follow a non-descent direction.
class NonDescentError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Cost evaluated at an ambient matrix that is already on the manifold.
using CostOracle = std::function<double(const Matrix &)>;

struct ArmijoParams {
  double gamma = 0.5;
  double beta = 0.5;
  double trial_lo = 1e-6;
  double trial_hi = 1.0;
  int max_backtracks = 10;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct StepsizeOutcome {
  double tau = 0.0;
  int backtracks = 0;
  ManifoldPoint next_point;
  double f_next = 0.0;
  /// No candidate passed the test; the last candidate was returned.
  bool exhausted = false;
  /// Projection of the accepted candidate was unique.
  bool unique = true;
};

/// Backtracking on tau in {trial * beta^i : 0 <= i <= max_backtracks} until
/// f(P(X - tau H)) - f_ref <= -gamma tau <grad f, H>. With f_ref = f(X) this
/// is the Armijo rule; with f_ref = c_k it is the nonmonotone rule.
StepsizeOutcome backtracking_search(const Direction &d, double f_ref,
                                    const CostOracle &cost,
                                    const ArmijoParams &params, double trial);

StepsizeOutcome armijo_search(const Direction &d, double f_X,
                              const CostOracle &cost, const ArmijoParams &params,
                              double trial);

struct EtaSchedule {
  enum class Kind {
    Constant,
    /// eta_k = min(1 / (q_k ((c_k - f_{k+1}) (k+1)^4 - 1)), eta), evaluated
    /// once f_{k+1} is known. Falls back to eta when the bound is vacuous.
    GlobalConvergence
  };
  Kind kind = Kind::Constant;
  double eta = 0.1;

  double value(double c, double q, double f_next, std::uint64_t k) const;
};

struct NonmonotoneState {
  double c = 0.0;
  double q = 1.0;

  static NonmonotoneState start(double f0) { return {f0, 1.0}; }
  /// q' = eta q + 1, c' = (eta q c + f_next) / q'.
  NonmonotoneState advance(double eta, double f_next) const;
};

std::pair<StepsizeOutcome, NonmonotoneState>
nonmonotone_search(const Direction &d, const CostOracle &cost,
                   const ArmijoParams &params, double trial,
                   const NonmonotoneState &state, const EtaSchedule &eta,
                   std::uint64_t k);

/// tau is taken as given; no acceptance test.
StepsizeOutcome fixed_step(const Direction &d, const CostOracle &cost, double tau);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t > lo && t < hi; }
};

/// Admissible open range for a fixed stepsize,
/// (0, min{(reach - delta) / Delta, upsilon / (Gamma1 varpi^2 + Gamma2 Delta varpi)}),
/// the first term dropped when Delta = 0.
Interval fixed_stepsize_bound(double upsilon, double varpi, double Gamma1,
                              double Gamma2, double Delta_hatH, double reach,
                              double delta);

/// min(1.1 prev, trial0) after a step without backtracking, 0.9 prev
/// otherwise, clamped to [lo, hi].
double adapt_trial(double prev_trial, bool backtracked, double trial0,
                   double lo, double hi);

} // namespace tgp
