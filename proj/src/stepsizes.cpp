#include "tgp/stepsizes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tgp {

void ArmijoParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("ArmijoParams: gamma must lie in (0, 1)");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ArmijoParams: beta must lie in (0, 1)");
  }
  if (!(trial_lo > 0.0 && trial_lo <= trial_hi)) {
    throw std::invalid_argument("ArmijoParams: need 0 < trial_lo <= trial_hi");
  }
  if (max_backtracks < 0) {
    throw std::invalid_argument("ArmijoParams: max_backtracks must be >= 0");
  }
}

namespace {

struct Candidate {
  ManifoldPoint point;
  bool unique;
};

Candidate candidate(const Direction &d, double tau) {
  const Matrix Y = d.base.value() - tau * d.full;
  ProjectionResult pr = project_to_manifold(d.base.kind(), Y);
  return {std::move(pr.point), pr.unique};
}

} // namespace

StepsizeOutcome backtracking_search(const Direction &d, double f_ref,
                                    const CostOracle &cost,
                                    const ArmijoParams &params, double trial) {
  params.validate();
  if (!(trial >= params.trial_lo && trial <= params.trial_hi)) {
    std::ostringstream os;
    os << "trial stepsize " << trial << " outside [" << params.trial_lo << ", "
       << params.trial_hi << "]";
    throw std::invalid_argument(os.str());
  }
  const double slope = d.descent();
  if (!(slope > 0.0)) {
    throw NonDescentError("line search needs <grad f, H> > 0");
  }

  double tau = trial;
  for (int i = 0;; ++i) {
    Candidate c = candidate(d, tau);
    const double f = cost(c.point.value());
    const bool accepted = f - f_ref <= -params.gamma * tau * slope;
    if (accepted || i == params.max_backtracks) {
      return StepsizeOutcome{tau, i, std::move(c.point), f, !accepted, c.unique};
    }
    tau *= params.beta;
  }
}

StepsizeOutcome armijo_search(const Direction &d, double f_X,
                              const CostOracle &cost, const ArmijoParams &params,
                              double trial) {
  return backtracking_search(d, f_X, cost, params, trial);
}

double EtaSchedule::value(double c, double q, double f_next,
                          std::uint64_t k) const {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in [0, 1)");
  }
  if (kind == Kind::Constant) {
    return eta;
  }
  const double kk = static_cast<double>(k + 1);
  const double denom = q * ((c - f_next) * kk * kk * kk * kk - 1.0);
  if (!(denom > 0.0)) {
    // c_{k+1} - f_{k+1} <= c_k - f_{k+1} <= (k+1)^-4 already holds.
    return eta;
  }
  return std::clamp(1.0 / denom, 0.0, eta);
}

NonmonotoneState NonmonotoneState::advance(double eta, double f_next) const {
  const double q_next = eta * q + 1.0;
  return {(eta * q * c + f_next) / q_next, q_next};
}

std::pair<StepsizeOutcome, NonmonotoneState>
nonmonotone_search(const Direction &d, const CostOracle &cost,
                   const ArmijoParams &params, double trial,
                   const NonmonotoneState &state, const EtaSchedule &eta,
                   std::uint64_t k) {
  StepsizeOutcome out = backtracking_search(d, state.c, cost, params, trial);
  const double e = eta.value(state.c, state.q, out.f_next, k);
  NonmonotoneState next = state.advance(e, out.f_next);
  return {std::move(out), next};
}

StepsizeOutcome fixed_step(const Direction &d, const CostOracle &cost,
                           double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("fixed stepsize must be positive");
  }
  Candidate c = candidate(d, tau);
  const double f = cost(c.point.value());
  return StepsizeOutcome{tau, 0, std::move(c.point), f, false, c.unique};
}

Interval fixed_stepsize_bound(double upsilon, double varpi, double Gamma1,
                              double Gamma2, double Delta_hatH, double reach,
                              double delta) {
  if (!(upsilon > 0.0 && varpi > 0.0 && Gamma1 > 0.0)) {
    throw std::invalid_argument(
        "fixed_stepsize_bound: upsilon, varpi and Gamma1 must be positive");
  }
  if (!(Gamma2 >= 0.0 && Delta_hatH >= 0.0)) {
    throw std::invalid_argument(
        "fixed_stepsize_bound: Gamma2 and Delta must be non-negative");
  }
  if (!(delta > 0.0 && delta <= reach)) {
    throw std::invalid_argument("fixed_stepsize_bound: need 0 < delta <= reach");
  }
  double hi = upsilon / (Gamma1 * varpi * varpi + Gamma2 * Delta_hatH * varpi);
  if (Delta_hatH > 0.0) {
    hi = std::min(hi, (reach - delta) / Delta_hatH);
  }
  return {0.0, hi};
}

double adapt_trial(double prev_trial, bool backtracked, double trial0,
                   double lo, double hi) {
  if (!(prev_trial > 0.0)) {
    throw std::invalid_argument("adapt_trial: previous trial must be positive");
  }
  const double next =
      backtracked ? 0.9 * prev_trial : std::min(1.1 * prev_trial, trial0);
  return std::clamp(next, lo, hi);
}

} // namespace tgp
