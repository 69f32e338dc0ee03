#pragma once

#include "tgp/stepsizes.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace tgp {

/// Smooth cost on a manifold together with its Euclidean gradient.
struct Objective {
  ManifoldKind manifold;
  std::function<double(const Matrix &)> cost;
  std::function<Matrix(const Matrix &)> egrad;
  std::optional<double> fstar;
};

struct ArmijoMode {
  ArmijoParams params;
  double trial0 = 1.0;
};

struct NonmonotoneMode {
  ArmijoParams params;
  double trial0 = 1.0;
  EtaSchedule eta;
};

struct FixedMode {
  double tau = 0.05;
};

using StepsizeMode = std::variant<ArmijoMode, NonmonotoneMode, FixedMode>;

struct SolverConfig {
  DirectionSpec direction = preset::Rgd{};
  StepsizeMode stepsize = ArmijoMode{};
  double tol_gradnorm = 1e-4;
  long max_iter = 10000;
  std::chrono::duration<double> max_time{5.0};
  /// Keep every iterate in RunRecord::points.
  bool record_points = false;
};

enum class RunStatus { Converged, MaxIter, MaxTime, NumericalFailure, NonDescent };

const char *to_string(RunStatus status);

struct TraceRow {
  long k = 0;
  double f = 0.0;
  double gradnorm = 0.0;
  /// Stepsize used to leave X_k; 0 on the final row.
  double tau = 0.0;
  int backtracks = 0;
  /// Nonmonotone reference value; NaN outside nonmonotone mode.
  double c = 0.0;
};

struct RunRecord {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::MaxIter;
  double wall_seconds = 0.0;
  Matrix final_point;
  std::vector<Matrix> points;
  /// Iterations whose backtracking hit the cap.
  long exhausted_searches = 0;
  /// Iterations whose projection was flagged non-unique.
  long nonunique_projections = 0;

  long n_iter() const { return rows.empty() ? 0 : rows.back().k; }
  double f_final() const { return rows.back().f; }
  double gradnorm_final() const { return rows.back().gradnorm; }
};

/// Runs the projected iteration X_{k+1} = P(X_k - tau_k H_k) from X0.
/// Deterministic in its inputs apart from the wall-clock stop; any
/// randomness lives in the S policy seeds of the direction spec.
RunRecord solve(const Objective &objective, const ManifoldPoint &X0,
                const SolverConfig &config);

struct ComplexityReport {
  std::vector<double> running_min;
  /// Least-squares slope of log(running_min_K) against log(K + 1).
  double exponent = 0.0;
  /// Smallest C with running_min_K <= C / sqrt(K + 1) for all K.
  double envelope_constant = 0.0;
};

ComplexityReport complexity_diagnostic(const RunRecord &record);

/// Sum of squared gradient norms over all rows that took a step.
double sum_squared_gradnorm(const RunRecord &record);

} // namespace tgp
