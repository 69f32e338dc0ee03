#include "tgp/bench.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace tgp;
using namespace tgp::bench;

namespace {

ExperimentConfig small(ExperimentId id, int n = 4) {
  ExperimentConfig c = default_config(id);
  c.n_instances = n;
  c.threads = 2;
  return c;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

RunResult fake_run(const std::string &alg, int instance, double f, RunStatus st,
                   std::optional<double> fstar) {
  RunResult r;
  r.algorithm = alg;
  r.instance = instance;
  r.fstar = fstar;
  r.record.rows.push_back({0, f + 1.0, 1.0, 0.1, 0, 0.0});
  r.record.rows.push_back({1, f, 0.0, 0.0, 0, 0.0});
  r.record.status = st;
  r.record.wall_seconds = 0.5;
  return r;
}

std::filesystem::path temp_dir(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("tgp_bench_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

} // namespace

TEST(Bench, ExperimentNamesRoundTrip) {
  for (ExperimentId id : {ExperimentId::QpInhomoCase1, ExperimentId::QpInhomoCase2,
                          ExperimentId::JamdS, ExperimentId::JatdS,
                          ExperimentId::EigenvalueDemo, ExperimentId::GeometryProbe}) {
    EXPECT_EQ(parse_experiment(to_string(id)), id);
  }
  EXPECT_THROW(parse_experiment("nope"), ConfigError);
}

TEST(Bench, DefaultsFollowPublishedSetup) {
  const ExperimentConfig c1 = default_config(ExperimentId::QpInhomoCase1);
  EXPECT_EQ(c1.gamma, 1e-4);
  EXPECT_EQ(c1.a_R, 1.1);
  EXPECT_EQ(c1.tau_F_E, 0.055);
  const ExperimentConfig c2 = default_config(ExperimentId::QpInhomoCase2);
  EXPECT_EQ(c2.gamma, 0.5);
  EXPECT_EQ(c2.beta, 0.5);
  EXPECT_EQ(c2.a_E, 0.7);
  EXPECT_EQ(c2.max_backtracks, 10);
  EXPECT_EQ(c2.n_instances, 100);
  const ExperimentConfig jm = default_config(ExperimentId::JamdS);
  EXPECT_EQ(jm.a_R, 2.0);
  EXPECT_EQ(jm.a_E, 10.8);
  EXPECT_EQ(jm.eta, 0.2);
  const ExperimentConfig jt = default_config(ExperimentId::JatdS);
  EXPECT_EQ(jt.tau_F_R, 0.01);
  EXPECT_EQ(jt.tau_F_E, 0.035);
  EXPECT_EQ(default_algorithms(ExperimentId::JatdS).size(), 9u);
  EXPECT_EQ(default_algorithms(ExperimentId::QpInhomoCase1).size(), 7u);
}

TEST(Bench, ConfigParsing) {
  std::istringstream in("# comment\n"
                        "instances = 12   # trailing\n"
                        "experiment = jamd_s\n"
                        "\n"
                        "algorithms = RGD, TGP-A-E\n"
                        "a_E = 3.5\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.experiment, ExperimentId::JamdS);
  EXPECT_EQ(c.n_instances, 12);
  EXPECT_EQ(c.algorithms, (std::vector<std::string>{"RGD", "TGP-A-E"}));
  EXPECT_EQ(c.a_E, 3.5);
  EXPECT_EQ(c.a_R, 2.0); // untouched default

  std::istringstream missing("instances = 3\n");
  EXPECT_THROW(parse_config(missing), ConfigError);
  std::istringstream bad_key("experiment = jamd_s\nfoo = 1\n");
  EXPECT_THROW(parse_config(bad_key), ConfigError);
  std::istringstream bad_val("experiment = jamd_s\ngamma = x\n");
  EXPECT_THROW(parse_config(bad_val), ConfigError);
  std::istringstream bad_range("experiment = jamd_s\ngamma = 1.5\n");
  EXPECT_THROW(parse_config(bad_range), ConfigError);
  std::istringstream no_eq("experiment = jamd_s\nnonsense\n");
  EXPECT_THROW(parse_config(no_eq), ConfigError);
}

TEST(Bench, SolverConfigMapping) {
  const ExperimentConfig c = default_config(ExperimentId::JamdS);
  const SolverConfig r = make_solver_config("TGP-NA-R", c, 5);
  ASSERT_TRUE(std::holds_alternative<preset::TgpR>(r.direction));
  EXPECT_EQ(std::get<preset::TgpR>(r.direction).a, 2.0);
  EXPECT_EQ(std::get<preset::TgpR>(r.direction).S.seed, 5u);
  ASSERT_TRUE(std::holds_alternative<NonmonotoneMode>(r.stepsize));
  EXPECT_EQ(std::get<NonmonotoneMode>(r.stepsize).eta.eta, 0.2);

  const SolverConfig f = make_solver_config("TGP-F-E", c, 5);
  EXPECT_EQ(std::get<FixedMode>(f.stepsize).tau, 0.059);

  const SolverConfig df = make_solver_config("TGP-A-DF", c, 5);
  const auto &p = std::get<preset::TgpDF>(df.direction);
  EXPECT_DOUBLE_EQ(p.scaling.mu, 4 * 0.35 - 1);
  EXPECT_EQ(p.scaling.F, 0.05 * Matrix::Identity(1, 1));

  EXPECT_THROW(make_solver_config("BFGS", c, 5), ConfigError);
}

TEST(Bench, SeedsAreStable) {
  EXPECT_EQ(instance_seed(1, 0), instance_seed(1, 0));
  EXPECT_NE(instance_seed(1, 0), instance_seed(1, 1));
  EXPECT_NE(s_seed(10), 10u);
}

TEST(Bench, MetricsAggregation) {
  std::vector<RunResult> runs{
      fake_run("A", 0, 0.0, RunStatus::Converged, 0.0),
      fake_run("A", 1, 0.5, RunStatus::MaxIter, 0.0),
      fake_run("B", 0, 0.2, RunStatus::Converged, 0.0),
      fake_run("B", 1, 0.5 - 5e-5, RunStatus::MaxTime, 0.0),
  };
  const MetricsTable t = compute_metrics(runs, "B");
  ASSERT_EQ(t.rows.size(), 2u);
  const MetricsRow &a = t.rows[0];
  EXPECT_EQ(a.algorithm, "A");
  EXPECT_EQ(a.runs, 2);
  EXPECT_EQ(a.niter, 1.0);
  EXPECT_EQ(a.time, 0.5);
  EXPECT_EQ(a.nglobal, 1);
  // Instance 0 is better by 0.2; instance 1 differs by only 5e-5.
  EXPECT_EQ(a.nbetter, 1);
  EXPECT_EQ(a.nworse, 0);
  EXPECT_EQ(a.nsuper, 1);
  EXPECT_EQ(a.nfail, 1);
  const MetricsRow &b = t.rows[1];
  EXPECT_FALSE(b.nbetter.has_value());
  EXPECT_EQ(b.nfail, 1);
  EXPECT_EQ(b.nglobal, 0);

  runs.push_back(fake_run("A", 2, 0.0, RunStatus::Converged, std::nullopt));
  EXPECT_FALSE(compute_metrics(runs, "B").rows[0].nglobal.has_value());
}

TEST(Bench, MetricsJsonRoundTrip) {
  const ExperimentResult r = run_experiment(small(ExperimentId::QpInhomoCase1));
  const MetricsTable back = metrics_from_json(metrics_to_json(r.metrics));
  EXPECT_EQ(back, r.metrics);
}

TEST(Bench, RunIsReproducibleApartFromTime) {
  ExperimentConfig c = small(ExperimentId::JamdS, 5);
  const ExperimentResult a = run_experiment(c);
  c.threads = 1;
  const ExperimentResult b = run_experiment(c);
  ASSERT_EQ(a.metrics.rows.size(), b.metrics.rows.size());
  for (std::size_t i = 0; i < a.metrics.rows.size(); ++i) {
    MetricsRow x = a.metrics.rows[i];
    MetricsRow y = b.metrics.rows[i];
    x.time = y.time = 0.0;
    EXPECT_EQ(x, y);
  }
}

TEST(Bench, ZeroWeightRowsMatchBaselines) {
  ExperimentConfig c = small(ExperimentId::QpInhomoCase1, 5);
  c.a_R = c.a_E = 0.0;
  c.algorithms = {"RGD", "TGP-A-R", "EGP", "TGP-A-E"};
  const ExperimentResult r = run_experiment(c);
  for (int i = 0; i < 5; ++i) {
    const auto &rgd = r.runs[static_cast<std::size_t>(4 * i)].record.rows;
    const auto &tr = r.runs[static_cast<std::size_t>(4 * i + 1)].record.rows;
    const auto &egp = r.runs[static_cast<std::size_t>(4 * i + 2)].record.rows;
    const auto &te = r.runs[static_cast<std::size_t>(4 * i + 3)].record.rows;
    ASSERT_EQ(rgd.size(), tr.size());
    ASSERT_EQ(egp.size(), te.size());
    for (std::size_t k = 0; k < rgd.size(); ++k) {
      EXPECT_EQ(rgd[k].f, tr[k].f);
      EXPECT_EQ(rgd[k].tau, tr[k].tau);
    }
    for (std::size_t k = 0; k < egp.size(); ++k) {
      EXPECT_EQ(egp[k].f, te[k].f);
    }
  }
}

TEST(Bench, GridParsing) {
  const auto g = parse_grid("0:0.2:12");
  EXPECT_EQ(g.size(), 61u);
  EXPECT_DOUBLE_EQ(g.back(), 12.0);
  EXPECT_EQ(parse_grid("0.1, 0.25,1"), (std::vector<double>{0.1, 0.25, 1.0}));
  EXPECT_THROW(parse_grid("1:0:2"), ConfigError);
  EXPECT_THROW(parse_grid(""), ConfigError);
  EXPECT_THROW(parse_grid("0:1"), ConfigError);
}

TEST(Bench, SweepEndpointsReproduceBaselines) {
  ExperimentConfig c = small(ExperimentId::QpInhomoCase1, 6);
  const auto rows = sweep_parameter(c, "a", {0.0, 1.1});
  ASSERT_EQ(rows.size(), 4u);
  for (const SweepRow &s : rows) {
    EXPECT_LE(*s.metrics.nbetter, c.n_instances);
    EXPECT_LE(*s.metrics.nworse, c.n_instances);
  }
  // a = 0 is the baseline itself.
  EXPECT_EQ(rows[0].value, 0.0);
  EXPECT_EQ(*rows[0].metrics.nbetter, 0);
  EXPECT_EQ(*rows[0].metrics.nworse, 0);
  EXPECT_EQ(*rows[1].metrics.nsuper, 0);

  ExperimentConfig j = small(ExperimentId::JamdS, 4);
  const auto rr = sweep_parameter(j, "rho", {0.25});
  ASSERT_EQ(rr.size(), 1u);
  EXPECT_EQ(rr[0].baseline, "TGP-A-E");
  EXPECT_EQ(*rr[0].metrics.nsuper, 0);
  EXPECT_EQ(*rr[0].metrics.nbetter, 0);
  EXPECT_THROW(sweep_parameter(j, "gamma", {0.1}), ConfigError);
  EXPECT_THROW(sweep_parameter(j, "a", {}), ConfigError);
}

TEST(Bench, ReportFilesAndSchemas) {
  ExperimentConfig c = small(ExperimentId::QpInhomoCase2, 3);
  c.algorithms = {"RGD", "TGP-F-E"};
  c.write_traces = true;
  const ExperimentResult r = run_experiment(c);
  const auto dir = temp_dir("report");
  emit_report(r, dir, "csv");
  const std::string runs = slurp(dir / "runs.csv");
  EXPECT_EQ(runs.substr(0, runs.find('\n')),
            "experiment,algorithm,instance_seed,status,n_iter,wall_ms,f_final,gradnorm_final");
  EXPECT_EQ(count_lines(runs), 7u);
  const std::string metrics = slurp(dir / "metrics.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')),
            "algorithm,runs,NIter,Time,NGlobal,NBetter,NWorse,NSuper,NFail");
  EXPECT_EQ(count_lines(metrics), 3u);
  for (const RunResult &run : r.runs) {
    const std::string t = slurp(dir / "traces" / (run_id(run) + ".csv"));
    EXPECT_EQ(count_lines(t), static_cast<std::size_t>(run.record.n_iter() + 2));
  }
  emit_report(r, dir, "json");
  EXPECT_EQ(metrics_from_json(slurp(dir / "metrics.json")), r.metrics);
  EXPECT_THROW(emit_report(r, dir, "xml"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Bench, EmptyBatchGivesHeaderOnlyFiles) {
  const ExperimentResult r = run_experiment(small(ExperimentId::QpInhomoCase2, 0));
  EXPECT_TRUE(r.runs.empty());
  const auto dir = temp_dir("empty");
  emit_report(r, dir, "csv");
  EXPECT_EQ(count_lines(slurp(dir / "runs.csv")), 1u);
  EXPECT_EQ(count_lines(slurp(dir / "metrics.csv")), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Bench, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Bench, InstanceJsonRoundTrip) {
  for (ProblemKind kind : {ProblemKind::QpCase1, ProblemKind::Jamds, ProblemKind::Jatds}) {
    const GeneratedInstance g = generate_instance(kind, default_params(kind), 3);
    const GeneratedInstance back = instance_from_json(instance_to_json(g.instance, g.x0));
    EXPECT_EQ(back.x0.value(), g.x0.value());
    EXPECT_EQ(back.instance.known_fstar, g.instance.known_fstar);
    EXPECT_EQ(cost(back.instance, g.x0.value()), cost(g.instance, g.x0.value()));
  }
}

TEST(Bench, EigenvalueDemoScenarios) {
  const std::vector<DemoRun> demo = run_eigenvalue_demo();
  ASSERT_EQ(demo.size(), 7u);
  for (const DemoRun &d : demo) {
    EXPECT_EQ(d.record.status, RunStatus::Converged) << d.scenario << " " << d.algorithm;
    EXPECT_EQ(d.record.points.size(), d.record.rows.size());
  }
}

TEST(Bench, ContractionRatiosOnSyntheticPoints) {
  RunRecord r;
  Matrix x(3, 1);
  x << 1.0, 2.0, 4.0;
  r.points.push_back(x);
  x << 0.5, 0.25, 4.0;
  r.points.push_back(x);
  const auto c = contraction_ratios(r);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0], (0.5 / 4.0) / (2.0 / 4.0));
}

TEST(Bench, ProbesAndManifoldSpecs) {
  EXPECT_EQ(parse_manifold("stiefel:4:2"), ManifoldKind::stiefel(4, 2));
  EXPECT_EQ(parse_manifold("grassmann:5:2"), ManifoldKind::grassmann(5, 2));
  EXPECT_THROW(parse_manifold("sphere:3"), ConfigError);
  EXPECT_THROW(parse_manifold("torus:3:1"), ConfigError);
  const ProbeSuite s = run_probes("stiefel:4:2", "all", 64, 1);
  EXPECT_EQ(s.reports.size(), 12u);
  const ProbeSuite one = run_probes("grassmann:4:2", "lower_bound", 64, 1);
  EXPECT_EQ(one.reports.size(), 1u);
  EXPECT_THROW(run_probes("stiefel:4:2", "bogus", 10, 1), ConfigError);
  std::ostringstream os;
  write_probe_csv(os, one);
  EXPECT_EQ(count_lines(os.str()), 2u);
  EXPECT_NE(probes_to_json(one).find("\"lower_bound\""), std::string::npos);
}
