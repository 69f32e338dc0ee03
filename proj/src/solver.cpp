#include "tgp/solver.hpp"

#include <cmath>
#include <limits>

namespace tgp {

const char *to_string(RunStatus status) {
  switch (status) {
  case RunStatus::Converged:
    return "Converged";
  case RunStatus::MaxIter:
    return "MaxIter";
  case RunStatus::MaxTime:
    return "MaxTime";
  case RunStatus::NumericalFailure:
    return "NumericalFailure";
  case RunStatus::NonDescent:
    return "NonDescent";
  }
  return "Unknown";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

void validate(const SolverConfig &config) {
  if (!(config.tol_gradnorm > 0.0)) {
    throw std::invalid_argument("SolverConfig: tol_gradnorm must be positive");
  }
  if (config.max_iter < 0) {
    throw std::invalid_argument("SolverConfig: max_iter must be >= 0");
  }
  std::visit(overloaded{[](const ArmijoMode &m) {
                          m.params.validate();
                          if (!(m.trial0 >= m.params.trial_lo &&
                                m.trial0 <= m.params.trial_hi)) {
                            throw std::invalid_argument(
                                "SolverConfig: trial0 outside [trial_lo, trial_hi]");
                          }
                        },
                        [](const NonmonotoneMode &m) {
                          m.params.validate();
                          if (!(m.trial0 >= m.params.trial_lo &&
                                m.trial0 <= m.params.trial_hi)) {
                            throw std::invalid_argument(
                                "SolverConfig: trial0 outside [trial_lo, trial_hi]");
                          }
                          if (!(m.eta.eta >= 0.0 && m.eta.eta < 1.0)) {
                            throw std::invalid_argument(
                                "SolverConfig: eta must lie in [0, 1)");
                          }
                        },
                        [](const FixedMode &m) {
                          if (!(m.tau > 0.0)) {
                            throw std::invalid_argument(
                                "SolverConfig: fixed tau must be positive");
                          }
                        }},
             config.stepsize);
}

double initial_trial(const StepsizeMode &mode) {
  return std::visit(overloaded{[](const ArmijoMode &m) { return m.trial0; },
                               [](const NonmonotoneMode &m) { return m.trial0; },
                               [](const FixedMode &m) { return m.tau; }},
                    mode);
}

} // namespace

RunRecord solve(const Objective &objective, const ManifoldPoint &X0,
                const SolverConfig &config) {
  if (!(X0.kind() == objective.manifold)) {
    throw std::invalid_argument("solve: X0 lives on a different manifold");
  }
  validate(config);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  RunRecord rec;
  ManifoldPoint X = X0;
  double f = objective.cost(X.value());
  Matrix g = objective.egrad(X.value());
  const bool nonmonotone = std::holds_alternative<NonmonotoneMode>(config.stepsize);
  NonmonotoneState nm = NonmonotoneState::start(f);
  double trial = initial_trial(config.stepsize);

  auto finish = [&](RunStatus status, long k, double gn) {
    rec.rows.push_back({k, f, gn, 0.0, 0, nonmonotone ? nm.c : kNaN});
    rec.status = status;
    rec.final_point = X.value();
    rec.wall_seconds = elapsed();
    return rec;
  };

  for (long k = 0;; ++k) {
    if (config.record_points) {
      rec.points.push_back(X.value());
    }
    if (!std::isfinite(f) || !g.allFinite()) {
      return finish(RunStatus::NumericalFailure, k, kNaN);
    }
    Direction d = build_direction(config.direction, X, g, static_cast<std::uint64_t>(k));
    const double gn = d.rgrad.value.norm();
    if (gn < config.tol_gradnorm) {
      return finish(RunStatus::Converged, k, gn);
    }
    if (k >= config.max_iter) {
      return finish(RunStatus::MaxIter, k, gn);
    }
    if (elapsed() > config.max_time.count()) {
      return finish(RunStatus::MaxTime, k, gn);
    }
    if (!d.full.allFinite()) {
      return finish(RunStatus::NumericalFailure, k, gn);
    }

    const double c_now = nonmonotone ? nm.c : kNaN;
    std::optional<StepsizeOutcome> out;
    try {
      std::visit(
          overloaded{
              [&](const ArmijoMode &m) {
                out = armijo_search(d, f, objective.cost, m.params, trial);
                trial = adapt_trial(trial, out->backtracks > 0, m.trial0,
                                    m.params.trial_lo, m.params.trial_hi);
              },
              [&](const NonmonotoneMode &m) {
                auto [o, next] = nonmonotone_search(d, objective.cost, m.params,
                                                    trial, nm, m.eta,
                                                    static_cast<std::uint64_t>(k));
                out = std::move(o);
                nm = next;
                trial = adapt_trial(trial, out->backtracks > 0, m.trial0,
                                    m.params.trial_lo, m.params.trial_hi);
              },
              [&](const FixedMode &m) { out = fixed_step(d, objective.cost, m.tau); }},
          config.stepsize);
    } catch (const NonDescentError &) {
      return finish(RunStatus::NonDescent, k, gn);
    } catch (const NonFiniteError &) {
      return finish(RunStatus::NumericalFailure, k, gn);
    } catch (const InfeasiblePointError &) {
      return finish(RunStatus::NumericalFailure, k, gn);
    }

    rec.rows.push_back({k, f, gn, out->tau, out->backtracks, c_now});
    rec.exhausted_searches += out->exhausted ? 1 : 0;
    rec.nonunique_projections += out->unique ? 0 : 1;

    X = std::move(out->next_point);
    f = out->f_next;
    g = objective.egrad(X.value());
  }
}

ComplexityReport complexity_diagnostic(const RunRecord &record) {
  ComplexityReport rep;
  double m = std::numeric_limits<double>::infinity();
  for (const TraceRow &row : record.rows) {
    m = std::min(m, row.gradnorm);
    rep.running_min.push_back(m);
  }
  const std::size_t n = rep.running_min.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t K = 0; K < n; ++K) {
    const double v = rep.running_min[K];
    const double root = std::sqrt(static_cast<double>(K + 1));
    rep.envelope_constant = std::max(rep.envelope_constant, v * root);
    if (!(v > 0.0) || !std::isfinite(v)) {
      continue;
    }
    const double x = std::log(static_cast<double>(K + 1));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 2) {
    const double un = static_cast<double>(used);
    const double den = un * sxx - sx * sx;
    rep.exponent = den > 0.0 ? (un * sxy - sx * sy) / den : 0.0;
  }
  return rep;
}

double sum_squared_gradnorm(const RunRecord &record) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < record.rows.size(); ++i) {
    s += record.rows[i].gradnorm * record.rows[i].gradnorm;
  }
  return s;
}

} // namespace tgp
