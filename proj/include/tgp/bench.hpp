#pragma once

#include "tgp/geometry_probe.hpp"
#include "tgp/problems.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tgp::bench {

/// Thrown for malformed experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentId {
  QpInhomoCase1,
  QpInhomoCase2,
  JamdS,
  JatdS,
  EigenvalueDemo,
  GeometryProbe
};

const char *to_string(ExperimentId id);
ExperimentId parse_experiment(const std::string &name);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::QpInhomoCase2;
  int n_instances = 100;
  std::uint64_t seed = 1;
  /// Empty means the experiment's default list.
  std::vector<std::string> algorithms;
  std::string baseline = "RGD";

  double a_R = 0.0;
  double a_E = 0.0;
  double rho = 0.25;
  double F_scale = 0.0;
  double eta = 0.1;
  double tau_F_R = 0.05;
  double tau_F_E = 0.05;
  double gamma = 0.5;
  double beta = 0.5;
  double trial0 = 1.0;
  int max_backtracks = 10;

  double tol_gradnorm = 1e-4;
  long max_iter = 10000;
  double max_time = 5.0;

  /// Worker threads; 0 picks hardware concurrency.
  int threads = 0;
  bool write_traces = false;

  /// Used by the geometry_probe experiment only.
  std::string probe_manifold = "stiefel:4:2";
  long probe_samples = 10000;
};

/// Settings that reproduce the published setup for `id`.
ExperimentConfig default_config(ExperimentId id);

/// Flat `key = value` text, one experiment per file; `#` starts a comment.
/// Keys not present keep the experiment defaults.
ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Sets one key; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig &cfg, const std::string &key,
                   const std::string &value);

std::vector<std::string> default_algorithms(ExperimentId id);
ProblemKind problem_kind(ExperimentId id);

/// Solver settings for a named algorithm. `s_seed` fixes S for the instance.
SolverConfig make_solver_config(const std::string &algorithm,
                                const ExperimentConfig &cfg, std::uint64_t s_seed);

std::uint64_t instance_seed(std::uint64_t master, int index);
std::uint64_t s_seed(std::uint64_t instance_seed);

struct RunResult {
  std::string experiment;
  std::string algorithm;
  int instance = 0;
  std::uint64_t instance_seed = 0;
  std::optional<double> fstar;
  RunRecord record;
};

struct MetricsRow {
  std::string algorithm;
  int runs = 0;
  double niter = 0.0;
  double time = 0.0;
  std::optional<int> nglobal;
  std::optional<int> nbetter;
  std::optional<int> nworse;
  std::optional<int> nsuper;
  int nfail = 0;

  bool operator==(const MetricsRow &) const = default;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  bool operator==(const MetricsTable &) const = default;
};

inline constexpr double kQualityThreshold = 1e-4;

/// Aggregates runs per algorithm. NGlobal is filled when every instance has
/// a known optimum; NBetter/NWorse/NSuper when `baseline` is among the runs.
MetricsTable compute_metrics(const std::vector<RunResult> &runs,
                             const std::string &baseline);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;
  MetricsTable metrics;
};

/// One solve per (instance, algorithm), all algorithms sharing each
/// instance's X0 and S.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  std::string algorithm;
  std::string baseline;
  MetricsRow metrics;
};

/// Parses "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string &spec);

/// parameter "a": TGP-A-R against RGD and TGP-A-E against EGP.
/// parameter "rho": TGP-A-DE against TGP-A-E.
std::vector<SweepRow> sweep_parameter(const ExperimentConfig &cfg,
                                      const std::string &parameter,
                                      const std::vector<double> &grid);

// Output.

std::string format_double(double v);

void write_runs_csv(std::ostream &os, const std::vector<RunResult> &runs);
void write_metrics_csv(std::ostream &os, const MetricsTable &table);
void write_trace_csv(std::ostream &os, const RunRecord &record);
void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows);

std::string metrics_to_json(const MetricsTable &table);
MetricsTable metrics_from_json(const std::string &text);

std::string run_id(const RunResult &run);

/// Writes runs.csv and metrics.csv (or metrics.json) plus traces/ when
/// requested, creating `dir` as needed.
void emit_report(const ExperimentResult &result, const std::filesystem::path &dir,
                 const std::string &format);

std::string instance_to_json(const ProblemInstance &inst, const ManifoldPoint &x0);
GeneratedInstance instance_from_json(const std::string &text);

// Small fixed scenarios on the sphere.

struct DemoRun {
  std::string scenario;
  std::string algorithm;
  RunRecord record;
};

/// Saddle escape (A = diag(4,2,-2)), the diag(5,2) inhomogeneous example,
/// and the fixed-step contraction comparison on diag(3,3,2).
std::vector<DemoRun> run_eigenvalue_demo();

/// max_l |x_l / x_n| contraction ratio between consecutive iterates.
std::vector<double> contraction_ratios(const RunRecord &record);

struct ProbeSuite {
  std::vector<ProbeReport> reports;
};

/// Runs the named probe ("all" or one lemma id) on `manifold` such as
/// "stiefel:4:2" or "grassmann:4:2".
ProbeSuite run_probes(const std::string &manifold, const std::string &lemma,
                      long samples, std::uint64_t seed);

ManifoldKind parse_manifold(const std::string &spec);

void write_probe_csv(std::ostream &os, const ProbeSuite &suite);
std::string probes_to_json(const ProbeSuite &suite);

} // namespace tgp::bench
