#include "tgp/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace tgp::bench {

using nlohmann::json;

const char *to_string(ExperimentId id) {
  switch (id) {
  case ExperimentId::QpInhomoCase1:
    return "qp_inhomo_case1";
  case ExperimentId::QpInhomoCase2:
    return "qp_inhomo_case2";
  case ExperimentId::JamdS:
    return "jamd_s";
  case ExperimentId::JatdS:
    return "jatd_s";
  case ExperimentId::EigenvalueDemo:
    return "eigenvalue_demo";
  case ExperimentId::GeometryProbe:
    return "geometry_probe";
  }
  return "unknown";
}

ExperimentId parse_experiment(const std::string &name) {
  for (ExperimentId id :
       {ExperimentId::QpInhomoCase1, ExperimentId::QpInhomoCase2, ExperimentId::JamdS,
        ExperimentId::JatdS, ExperimentId::EigenvalueDemo, ExperimentId::GeometryProbe}) {
    if (name == to_string(id)) {
      return id;
    }
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig c;
  c.experiment = id;
  switch (id) {
  case ExperimentId::QpInhomoCase1:
    c.a_R = c.a_E = 1.1;
    c.gamma = 1e-4;
    c.eta = 0.1;
    c.tau_F_R = c.tau_F_E = 0.055;
    break;
  case ExperimentId::QpInhomoCase2:
    c.a_R = c.a_E = 0.7;
    c.eta = 0.1;
    c.tau_F_R = c.tau_F_E = 0.05;
    break;
  case ExperimentId::JamdS:
    c.a_R = 2.0;
    c.a_E = 10.8;
    c.eta = 0.2;
    c.tau_F_R = 0.025;
    c.tau_F_E = 0.059;
    c.rho = 0.35;
    c.F_scale = 0.05;
    break;
  case ExperimentId::JatdS:
    c.a_R = 9.6;
    c.a_E = 12.4;
    c.eta = 0.1;
    c.tau_F_R = 0.01;
    c.tau_F_E = 0.035;
    c.rho = 0.23;
    c.F_scale = 0.25;
    c.max_time = 10.0;
    break;
  case ExperimentId::EigenvalueDemo:
  case ExperimentId::GeometryProbe:
    break;
  }
  return c;
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double to_double(const std::string &key, const std::string &v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) {
      throw std::invalid_argument(v);
    }
    return d;
  } catch (const std::exception &) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string &key, const std::string &v) {
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos != v.size()) {
      throw std::invalid_argument(v);
    }
    return n;
  } catch (const std::exception &) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    return false;
  }
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

void validate(const ExperimentConfig &c) {
  if (c.n_instances < 0) {
    throw ConfigError("instances must be >= 0");
  }
  if (!(c.gamma > 0.0 && c.gamma < 1.0) || !(c.beta > 0.0 && c.beta < 1.0)) {
    throw ConfigError("gamma and beta must lie in (0, 1)");
  }
  if (!(c.eta >= 0.0 && c.eta < 1.0)) {
    throw ConfigError("eta must lie in [0, 1)");
  }
  if (!(c.trial0 > 0.0) || !(c.tau_F_R > 0.0) || !(c.tau_F_E > 0.0)) {
    throw ConfigError("stepsizes must be positive");
  }
  if (!(c.rho > 0.0)) {
    throw ConfigError("rho must be positive");
  }
  if (!(c.tol_gradnorm > 0.0) || c.max_iter < 0 || !(c.max_time > 0.0)) {
    throw ConfigError("invalid stopping settings");
  }
  if (c.max_backtracks < 0 || c.threads < 0 || c.probe_samples < 1) {
    throw ConfigError("counts must be non-negative");
  }
}

} // namespace

void apply_setting(ExperimentConfig &c, const std::string &key, const std::string &value) {
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "instances") {
    c.n_instances = static_cast<int>(to_long(key, value));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_long(key, value));
  } else if (key == "algorithms") {
    c.algorithms = split(value, ',');
  } else if (key == "baseline") {
    c.baseline = value;
  } else if (key == "a") {
    c.a_R = c.a_E = to_double(key, value);
  } else if (key == "a_R") {
    c.a_R = to_double(key, value);
  } else if (key == "a_E") {
    c.a_E = to_double(key, value);
  } else if (key == "rho") {
    c.rho = to_double(key, value);
  } else if (key == "F_scale") {
    c.F_scale = to_double(key, value);
  } else if (key == "eta") {
    c.eta = to_double(key, value);
  } else if (key == "tau_F") {
    c.tau_F_R = c.tau_F_E = to_double(key, value);
  } else if (key == "tau_F_R") {
    c.tau_F_R = to_double(key, value);
  } else if (key == "tau_F_E") {
    c.tau_F_E = to_double(key, value);
  } else if (key == "gamma") {
    c.gamma = to_double(key, value);
  } else if (key == "beta") {
    c.beta = to_double(key, value);
  } else if (key == "trial0") {
    c.trial0 = to_double(key, value);
  } else if (key == "max_backtracks") {
    c.max_backtracks = static_cast<int>(to_long(key, value));
  } else if (key == "tol_gradnorm") {
    c.tol_gradnorm = to_double(key, value);
  } else if (key == "max_iter") {
    c.max_iter = to_long(key, value);
  } else if (key == "max_time") {
    c.max_time = to_double(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<int>(to_long(key, value));
  } else if (key == "traces") {
    c.write_traces = to_bool(key, value);
  } else if (key == "probe_manifold") {
    c.probe_manifold = value;
  } else if (key == "probe_samples") {
    c.probe_samples = to_long(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream &in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  std::optional<ExperimentId> id;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    if (key == "experiment") {
      if (id) {
        throw ConfigError("one experiment per file");
      }
      id = parse_experiment(value);
    } else {
      entries.emplace_back(std::move(key), std::move(value));
    }
  }
  if (!id) {
    throw ConfigError("missing 'experiment' key");
  }
  // Experiment defaults first so that the remaining keys override them.
  ExperimentConfig cfg = default_config(*id);
  for (const auto &[k, v] : entries) {
    apply_setting(cfg, k, v);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config '" + path.string() + "'");
  }
  return parse_config(in);
}

std::vector<std::string> default_algorithms(ExperimentId id) {
  std::vector<std::string> algs{"TGP-A-R", "TGP-NA-R", "TGP-F-R", "TGP-A-E",
                                "TGP-NA-E", "TGP-F-E", "RGD"};
  if (id == ExperimentId::JamdS || id == ExperimentId::JatdS) {
    algs.insert(algs.end(), {"TGP-A-DE", "TGP-A-DF"});
  }
  return algs;
}

ProblemKind problem_kind(ExperimentId id) {
  switch (id) {
  case ExperimentId::QpInhomoCase1:
    return ProblemKind::QpCase1;
  case ExperimentId::QpInhomoCase2:
    return ProblemKind::QpCase2;
  case ExperimentId::JamdS:
    return ProblemKind::Jamds;
  case ExperimentId::JatdS:
    return ProblemKind::Jatds;
  default:
    throw ConfigError(std::string("experiment '") + to_string(id) +
                      "' has no instance batch");
  }
}

SolverConfig make_solver_config(const std::string &algorithm, const ExperimentConfig &cfg,
                                std::uint64_t sseed) {
  const ProblemKind pk = problem_kind(cfg.experiment);
  const GenerateParams gp = default_params(pk);
  const SPolicy S = SPolicy::fixed(sseed);

  ArmijoParams ap;
  ap.gamma = cfg.gamma;
  ap.beta = cfg.beta;
  ap.max_backtracks = cfg.max_backtracks;
  ap.trial_hi = cfg.trial0;
  ap.trial_lo = std::min(ap.trial_lo, cfg.trial0);

  SolverConfig sc;
  sc.tol_gradnorm = cfg.tol_gradnorm;
  sc.max_iter = cfg.max_iter;
  sc.max_time = std::chrono::duration<double>(cfg.max_time);

  const ArmijoMode armijo{ap, cfg.trial0};
  const NonmonotoneMode nonmono{ap, cfg.trial0, EtaSchedule{EtaSchedule::Kind::Constant, cfg.eta}};

  if (algorithm == "RGD") {
    sc.direction = preset::Rgd{};
    sc.stepsize = armijo;
  } else if (algorithm == "EGP") {
    sc.direction = preset::Egp{};
    sc.stepsize = armijo;
  } else if (algorithm == "TGP-A-R" || algorithm == "TGP-NA-R" || algorithm == "TGP-F-R") {
    sc.direction = preset::TgpR{cfg.a_R, S};
    if (algorithm == "TGP-A-R") {
      sc.stepsize = armijo;
    } else if (algorithm == "TGP-NA-R") {
      sc.stepsize = nonmono;
    } else {
      sc.stepsize = FixedMode{cfg.tau_F_R};
    }
  } else if (algorithm == "TGP-A-E" || algorithm == "TGP-NA-E" || algorithm == "TGP-F-E") {
    sc.direction = preset::TgpE{cfg.a_E, S};
    if (algorithm == "TGP-A-E") {
      sc.stepsize = armijo;
    } else if (algorithm == "TGP-NA-E") {
      sc.stepsize = nonmono;
    } else {
      sc.stepsize = FixedMode{cfg.tau_F_E};
    }
  } else if (algorithm == "TGP-A-DE") {
    sc.direction = preset::TgpDE{cfg.rho, cfg.a_E, S};
    sc.stepsize = armijo;
  } else if (algorithm == "TGP-A-DF") {
    StiefelScaling sc_f = StiefelScaling::identity(gp.n, gp.r);
    sc_f.mu = 4.0 * cfg.rho - 1.0;
    sc_f.F = cfg.F_scale * Matrix::Identity(gp.n - gp.r, gp.n - gp.r);
    sc.direction = preset::TgpDF{sc_f, cfg.a_E, S};
    sc.stepsize = armijo;
  } else {
    throw ConfigError("unknown algorithm '" + algorithm + "'");
  }
  return sc;
}

std::uint64_t instance_seed(std::uint64_t master, int index) {
  return derive_seed(master, static_cast<std::uint64_t>(index));
}

std::uint64_t s_seed(std::uint64_t iseed) { return derive_seed(iseed, 0x53); }

MetricsTable compute_metrics(const std::vector<RunResult> &runs, const std::string &baseline) {
  std::vector<std::string> order;
  for (const RunResult &r : runs) {
    if (std::find(order.begin(), order.end(), r.algorithm) == order.end()) {
      order.push_back(r.algorithm);
    }
  }
  std::map<int, double> base_f;
  for (const RunResult &r : runs) {
    if (r.algorithm == baseline) {
      base_f[r.instance] = r.record.f_final();
    }
  }
  const bool have_baseline = !base_f.empty();

  MetricsTable table;
  for (const std::string &alg : order) {
    MetricsRow row;
    row.algorithm = alg;
    bool all_fstar = true;
    int nglobal = 0, nbetter = 0, nworse = 0;
    double iters = 0.0, secs = 0.0;
    for (const RunResult &r : runs) {
      if (r.algorithm != alg) {
        continue;
      }
      ++row.runs;
      iters += static_cast<double>(r.record.n_iter());
      secs += r.record.wall_seconds;
      const double f = r.record.f_final();
      if (r.record.status == RunStatus::MaxIter || r.record.status == RunStatus::MaxTime) {
        ++row.nfail;
      }
      if (r.fstar) {
        nglobal += f < *r.fstar + kQualityThreshold ? 1 : 0;
      } else {
        all_fstar = false;
      }
      const auto it = base_f.find(r.instance);
      if (it != base_f.end()) {
        nbetter += f < it->second - kQualityThreshold ? 1 : 0;
        nworse += f > it->second + kQualityThreshold ? 1 : 0;
      }
    }
    if (row.runs > 0) {
      row.niter = iters / row.runs;
      row.time = secs / row.runs;
    }
    if (all_fstar && row.runs > 0) {
      row.nglobal = nglobal;
    }
    if (have_baseline && alg != baseline) {
      row.nbetter = nbetter;
      row.nworse = nworse;
      row.nsuper = nbetter - nworse;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

struct Batch {
  std::vector<GeneratedInstance> instances;
  std::vector<Objective> objectives;
  std::vector<std::uint64_t> seeds;
};

Batch make_batch(const ExperimentConfig &cfg) {
  const ProblemKind pk = problem_kind(cfg.experiment);
  const GenerateParams gp = default_params(pk);
  Batch b;
  for (int i = 0; i < cfg.n_instances; ++i) {
    const std::uint64_t s = instance_seed(cfg.seed, i);
    b.seeds.push_back(s);
    b.instances.push_back(generate_instance(pk, gp, s));
    b.objectives.push_back(make_objective(b.instances.back().instance));
  }
  return b;
}

std::vector<RunResult> run_batch(const ExperimentConfig &cfg, const Batch &batch,
                                 const std::vector<std::string> &algorithms) {
  struct Job {
    int instance;
    std::size_t alg;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < static_cast<int>(batch.instances.size()); ++i) {
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      jobs.push_back({i, a});
    }
  }
  // Build configs up front so unknown names fail before any work starts.
  std::vector<std::vector<SolverConfig>> configs(batch.instances.size());
  for (std::size_t i = 0; i < batch.instances.size(); ++i) {
    for (const std::string &alg : algorithms) {
      configs[i].push_back(make_solver_config(alg, cfg, s_seed(batch.seeds[i])));
    }
  }

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) {
        return;
      }
      const Job &job = jobs[j];
      try {
        const auto ii = static_cast<std::size_t>(job.instance);
        RunResult r;
        r.experiment = to_string(cfg.experiment);
        r.algorithm = algorithms[job.alg];
        r.instance = job.instance;
        r.instance_seed = batch.seeds[ii];
        r.fstar = batch.instances[ii].instance.known_fstar;
        r.record = solve(batch.objectives[ii], batch.instances[ii].x0, configs[ii][job.alg]);
        results[j] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread &t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  validate(cfg);
  ExperimentResult out;
  out.config = cfg;
  if (cfg.experiment == ExperimentId::EigenvalueDemo) {
    for (DemoRun &d : run_eigenvalue_demo()) {
      RunResult r;
      r.experiment = to_string(cfg.experiment);
      r.algorithm = d.scenario + "/" + d.algorithm;
      r.record = std::move(d.record);
      out.runs.push_back(std::move(r));
    }
    out.metrics = compute_metrics(out.runs, "");
    return out;
  }
  const std::vector<std::string> algs =
      cfg.algorithms.empty() ? default_algorithms(cfg.experiment) : cfg.algorithms;
  const Batch batch = make_batch(cfg);
  out.runs = run_batch(cfg, batch, algs);
  out.metrics = compute_metrics(out.runs, cfg.baseline);
  return out;
}

std::vector<double> parse_grid(const std::string &spec) {
  const std::string s = trim(spec);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) {
      throw ConfigError("grid must be start:step:stop");
    }
    const double start = to_double("grid", parts[0]);
    const double step = to_double("grid", parts[1]);
    const double stop = to_double("grid", parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw ConfigError("grid needs step > 0 and stop >= start");
    }
    std::vector<double> out;
    // Index-based so the endpoint survives rounding in the step.
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
  }
  std::vector<double> out;
  for (const std::string &p : split(s, ',')) {
    out.push_back(to_double("grid", p));
  }
  if (out.empty()) {
    throw ConfigError("grid is empty");
  }
  return out;
}

std::vector<SweepRow> sweep_parameter(const ExperimentConfig &cfg, const std::string &parameter,
                                      const std::vector<double> &grid) {
  validate(cfg);
  if (grid.empty()) {
    throw ConfigError("grid is empty");
  }
  struct Pair {
    std::string alg;
    std::string base;
  };
  std::vector<Pair> pairs;
  if (parameter == "a") {
    pairs = {{"TGP-A-R", "RGD"}, {"TGP-A-E", "EGP"}};
  } else if (parameter == "rho") {
    pairs = {{"TGP-A-DE", "TGP-A-E"}};
  } else {
    throw ConfigError("sweep parameter must be 'a' or 'rho'");
  }
  const Batch batch = make_batch(cfg);
  std::vector<std::string> bases;
  for (const Pair &p : pairs) {
    bases.push_back(p.base);
  }
  const std::vector<RunResult> base_runs = run_batch(cfg, batch, bases);

  std::vector<SweepRow> rows;
  for (double v : grid) {
    ExperimentConfig c = cfg;
    if (parameter == "a") {
      c.a_R = c.a_E = v;
    } else {
      if (!(v > 0.0)) {
        throw ConfigError("rho grid values must be positive");
      }
      c.rho = v;
    }
    for (const Pair &p : pairs) {
      std::vector<RunResult> runs = run_batch(c, batch, {p.alg});
      for (const RunResult &b : base_runs) {
        if (b.algorithm == p.base) {
          runs.push_back(b);
        }
      }
      const MetricsTable t = compute_metrics(runs, p.base);
      rows.push_back({parameter, v, p.alg, p.base, t.rows.front()});
    }
  }
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

namespace {

std::string opt_int(const std::optional<int> &v) { return v ? std::to_string(*v) : ""; }

} // namespace

void write_runs_csv(std::ostream &os, const std::vector<RunResult> &runs) {
  os << "experiment,algorithm,instance_seed,status,n_iter,wall_ms,f_final,gradnorm_final\n";
  for (const RunResult &r : runs) {
    os << r.experiment << ',' << r.algorithm << ',' << r.instance_seed << ','
       << to_string(r.record.status) << ',' << r.record.n_iter() << ','
       << format_double(r.record.wall_seconds * 1e3) << ','
       << format_double(r.record.f_final()) << ','
       << format_double(r.record.gradnorm_final()) << '\n';
  }
}

void write_metrics_csv(std::ostream &os, const MetricsTable &table) {
  os << "algorithm,runs,NIter,Time,NGlobal,NBetter,NWorse,NSuper,NFail\n";
  for (const MetricsRow &m : table.rows) {
    os << m.algorithm << ',' << m.runs << ',' << format_double(m.niter) << ','
       << format_double(m.time) << ',' << opt_int(m.nglobal) << ',' << opt_int(m.nbetter)
       << ',' << opt_int(m.nworse) << ',' << opt_int(m.nsuper) << ',' << m.nfail << '\n';
  }
}

void write_trace_csv(std::ostream &os, const RunRecord &record) {
  os << "k,f,gradnorm,tau,backtracks,c\n";
  for (const TraceRow &r : record.rows) {
    os << r.k << ',' << format_double(r.f) << ',' << format_double(r.gradnorm) << ','
       << format_double(r.tau) << ',' << r.backtracks << ','
       << (std::isnan(r.c) ? std::string() : format_double(r.c)) << '\n';
  }
}

void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
  os << "parameter,value,algorithm,baseline,runs,NIter,Time,NGlobal,NBetter,NWorse,NSuper,"
        "NFail\n";
  for (const SweepRow &s : rows) {
    const MetricsRow &m = s.metrics;
    os << s.parameter << ',' << format_double(s.value) << ',' << s.algorithm << ','
       << s.baseline << ',' << m.runs << ',' << format_double(m.niter) << ','
       << format_double(m.time) << ',' << opt_int(m.nglobal) << ',' << opt_int(m.nbetter)
       << ',' << opt_int(m.nworse) << ',' << opt_int(m.nsuper) << ',' << m.nfail << '\n';
  }
}

namespace {

json opt_json(const std::optional<int> &v) { return v ? json(*v) : json(nullptr); }

std::optional<int> opt_from(const json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return j.at(key).get<int>();
}

} // namespace

std::string metrics_to_json(const MetricsTable &table) {
  json rows = json::array();
  for (const MetricsRow &m : table.rows) {
    rows.push_back({{"algorithm", m.algorithm},
                    {"runs", m.runs},
                    {"NIter", m.niter},
                    {"Time", m.time},
                    {"NGlobal", opt_json(m.nglobal)},
                    {"NBetter", opt_json(m.nbetter)},
                    {"NWorse", opt_json(m.nworse)},
                    {"NSuper", opt_json(m.nsuper)},
                    {"NFail", m.nfail}});
  }
  return json{{"metrics", rows}}.dump(2);
}

MetricsTable metrics_from_json(const std::string &text) {
  const json j = json::parse(text);
  MetricsTable t;
  for (const json &r : j.at("metrics")) {
    MetricsRow m;
    m.algorithm = r.at("algorithm").get<std::string>();
    m.runs = r.at("runs").get<int>();
    m.niter = r.at("NIter").get<double>();
    m.time = r.at("Time").get<double>();
    m.nglobal = opt_from(r, "NGlobal");
    m.nbetter = opt_from(r, "NBetter");
    m.nworse = opt_from(r, "NWorse");
    m.nsuper = opt_from(r, "NSuper");
    m.nfail = r.at("NFail").get<int>();
    t.rows.push_back(std::move(m));
  }
  return t;
}

std::string run_id(const RunResult &run) {
  std::string alg = run.algorithm;
  std::replace(alg.begin(), alg.end(), '/', '_');
  return alg + "_" + std::to_string(run.instance);
}

namespace {

std::ofstream open_out(const std::filesystem::path &p) {
  std::ofstream os(p);
  if (!os) {
    throw std::runtime_error("cannot write '" + p.string() + "'");
  }
  return os;
}

} // namespace

void emit_report(const ExperimentResult &result, const std::filesystem::path &dir,
                 const std::string &format) {
  if (format != "csv" && format != "json") {
    throw ConfigError("format must be csv or json");
  }
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "runs.csv");
    write_runs_csv(os, result.runs);
  }
  if (format == "csv") {
    auto os = open_out(dir / "metrics.csv");
    write_metrics_csv(os, result.metrics);
  } else {
    auto os = open_out(dir / "metrics.json");
    os << metrics_to_json(result.metrics) << '\n';
  }
  if (result.config.write_traces) {
    std::filesystem::create_directories(dir / "traces");
    for (const RunResult &r : result.runs) {
      auto os = open_out(dir / "traces" / (run_id(r) + ".csv"));
      write_trace_csv(os, r.record);
    }
  }
}

namespace {

json matrix_json(const Matrix &M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      row.push_back(M(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json &j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) {
    throw std::invalid_argument("empty matrix in instance file");
  }
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols) {
      throw std::invalid_argument("ragged matrix in instance file");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      M(i, k) = j.at(i).at(k).get<double>();
    }
  }
  return M;
}

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

} // namespace

std::string instance_to_json(const ProblemInstance &inst, const ManifoldPoint &x0) {
  json j;
  j["manifold"] = {{"type", inst.manifold.is_stiefel() ? "stiefel" : "grassmann"},
                   {"n", inst.manifold.n()},
                   {"k", inst.manifold.k()}};
  j["known_fstar"] = inst.known_fstar ? json(*inst.known_fstar) : json(nullptr);
  j["x0"] = matrix_json(x0.value());
  std::visit(overloaded{[&](const problem::Eigenvalue &p) {
                          j["kind"] = "eigenvalue";
                          j["A"] = matrix_json(p.A);
                        },
                        [&](const problem::QpInhomo &p) {
                          j["kind"] = "qp_inhomo";
                          j["A"] = matrix_json(p.A);
                          j["Xstar"] = matrix_json(p.Xstar);
                        },
                        [&](const problem::Jamds &p) {
                          j["kind"] = "jamds";
                          json list = json::array();
                          for (const Matrix &A : p.A) {
                            list.push_back(matrix_json(A));
                          }
                          j["A"] = std::move(list);
                        },
                        [&](const problem::Jatds &p) {
                          j["kind"] = "jatds";
                          json list = json::array();
                          for (const SymTensor3 &T : p.T) {
                            list.push_back({{"n", T.dim()}, {"data", T.data()}});
                          }
                          j["T"] = std::move(list);
                        }},
             inst.data);
  return j.dump();
}

GeneratedInstance instance_from_json(const std::string &text) {
  const json j = json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  const int k = j.at("manifold").at("k").get<int>();
  ProblemData data = [&]() -> ProblemData {
    if (kind == "eigenvalue") {
      return problem::Eigenvalue{matrix_from(j.at("A"))};
    }
    if (kind == "qp_inhomo") {
      return problem::QpInhomo{matrix_from(j.at("A")), matrix_from(j.at("Xstar"))};
    }
    if (kind == "jamds") {
      problem::Jamds p;
      for (const json &A : j.at("A")) {
        p.A.push_back(matrix_from(A));
      }
      return p;
    }
    if (kind == "jatds") {
      problem::Jatds p;
      for (const json &T : j.at("T")) {
        const int n = T.at("n").get<int>();
        // Already symmetric, so symmetrizing again is exact up to rounding
        // of the six-term average; keep the stored values instead.
        SymTensor3 t = SymTensor3::symmetrize(n, T.at("data").get<std::vector<double>>());
        p.T.push_back(std::move(t));
      }
      return p;
    }
    throw std::invalid_argument("unknown instance kind '" + kind + "'");
  }();
  ProblemInstance inst = make_instance(std::move(data), k);
  if (!j.at("known_fstar").is_null()) {
    inst.known_fstar = j.at("known_fstar").get<double>();
  }
  ManifoldPoint x0(inst.manifold, matrix_from(j.at("x0")));
  return {std::move(inst), std::move(x0)};
}

std::vector<DemoRun> run_eigenvalue_demo() {
  std::vector<DemoRun> out;
  auto run = [&](const std::string &scenario, const std::string &alg,
                 const ProblemInstance &inst, const Matrix &x0, SolverConfig sc) {
    sc.record_points = true;
    const ManifoldPoint X0(inst.manifold, x0);
    out.push_back({scenario, alg, solve(make_objective(inst), X0, sc)});
  };

  {
    Vector d(3);
    d << 4.0, 2.0, -2.0;
    const ProblemInstance inst = make_instance(problem::Eigenvalue{d.asDiagonal().toDenseMatrix()});
    Matrix x0(3, 1);
    x0 << std::sqrt(3.0) / 2.0, 0.5, 0.0;
    SolverConfig rgd;
    rgd.direction = preset::Rgd{};
    run("saddle", "RGD", inst, x0, rgd);

    SolverConfig eig;
    eig.direction = preset::TgpAEigen{0.05};
    ArmijoParams ap;
    ap.trial_hi = 0.5;
    eig.stepsize = ArmijoMode{ap, 0.5};
    run("saddle", "TGP-A-Eigen", inst, x0, eig);
  }
  {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 5.0;
    A(1, 1) = 2.0;
    Matrix xs(2, 1);
    xs << 0.0, 1.0;
    const ProblemInstance inst = make_instance(problem::QpInhomo{A, xs});
    Matrix x0(2, 1);
    x0 << -1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    SolverConfig rgd;
    rgd.direction = preset::Rgd{};
    run("inhomogeneous", "RGD", inst, x0, rgd);

    SolverConfig tgp;
    tgp.direction = preset::TgpR{2.0, SPolicy::identity()};
    run("inhomogeneous", "TGP-A-R", inst, x0, tgp);
  }
  {
    Vector d(3);
    d << 3.0, 3.0, 2.0;
    const ProblemInstance inst = make_instance(problem::Eigenvalue{d.asDiagonal().toDenseMatrix()});
    const Matrix x0 = Matrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
    SolverConfig egp;
    egp.direction = preset::Egp{};
    egp.stepsize = FixedMode{0.2};
    run("contraction", "EGP", inst, x0, egp);

    SolverConfig rgd;
    rgd.direction = preset::Rgd{};
    rgd.stepsize = FixedMode{0.2};
    run("contraction", "RGD", inst, x0, rgd);

    SolverConfig pm;
    pm.direction = preset::ShiftedPM{4.0};
    pm.stepsize = FixedMode{1.0};
    run("contraction", "ShiftedPM", inst, x0, pm);
  }
  return out;
}

std::vector<double> contraction_ratios(const RunRecord &record) {
  auto progress = [](const Matrix &x) {
    const Eigen::Index n = x.rows();
    double m = 0.0;
    for (Eigen::Index l = 0; l + 1 < n; ++l) {
      m = std::max(m, std::abs(x(l, 0) / x(n - 1, 0)));
    }
    return m;
  };
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < record.points.size(); ++k) {
    out.push_back(progress(record.points[k + 1]) / progress(record.points[k]));
  }
  return out;
}

ManifoldKind parse_manifold(const std::string &spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) {
    throw ConfigError("manifold must be stiefel:n:r or grassmann:n:p");
  }
  const int n = static_cast<int>(to_long("manifold", parts[1]));
  const int k = static_cast<int>(to_long("manifold", parts[2]));
  if (parts[0] == "stiefel") {
    return ManifoldKind::stiefel(n, k);
  }
  if (parts[0] == "grassmann") {
    return ManifoldKind::grassmann(n, k);
  }
  throw ConfigError("unknown manifold '" + parts[0] + "'");
}

namespace {

Objective probe_objective(const ManifoldKind &kind, std::uint64_t seed) {
  if (kind.is_stiefel()) {
    GenerateParams gp;
    gp.n = kind.n();
    gp.r = kind.k();
    return make_objective(generate_instance(ProblemKind::QpCase1, gp, seed).instance);
  }
  // Linear cost tr(A X) with symmetric A on the projector representation.
  const Matrix A = sym(rand_gaussian(kind.n(), kind.n(), seed));
  return Objective{kind, [A](const Matrix &X) { return (A * X).trace(); },
                   [A](const Matrix &) { return A; }, std::nullopt};
}

} // namespace

ProbeSuite run_probes(const std::string &manifold, const std::string &lemma, long samples,
                      std::uint64_t seed) {
  const ManifoldKind kind = parse_manifold(manifold);
  static const std::vector<std::string> known{"first_order",        "second_order",
                                              "lower_bound",        "normal_quadratic",
                                              "descent_inequality", "normal_stability"};
  if (lemma != "all" && std::find(known.begin(), known.end(), lemma) == known.end()) {
    throw ConfigError("unknown lemma '" + lemma + "'");
  }
  auto wanted = [&](const char *name) { return lemma == "all" || lemma == name; };
  const double rs = reach(kind);
  ProbeSuite suite;
  for (double frac : {0.1, 0.25, 0.5}) {
    const double delta = frac * rs;
    if (wanted("first_order")) {
      suite.reports.push_back(probe_first_order_bound(kind, delta, samples, seed));
    }
    if (wanted("second_order")) {
      suite.reports.push_back(probe_second_order_bound(kind, delta, samples, seed));
    }
    if (wanted("descent_inequality")) {
      suite.reports.push_back(
          probe_descent_inequality(probe_objective(kind, seed), delta, samples, seed));
    }
  }
  if (wanted("lower_bound")) {
    suite.reports.push_back(probe_lower_bound(kind, samples, seed));
  }
  if (wanted("normal_quadratic")) {
    suite.reports.push_back(probe_normal_quadratic(kind, samples, seed));
  }
  if (wanted("normal_stability")) {
    suite.reports.push_back(probe_normal_stability(kind, samples, seed));
  }
  return suite;
}

void write_probe_csv(std::ostream &os, const ProbeSuite &suite) {
  os << "lemma,manifold,samples,violations,bound,fitted_constant,fitted_constant_2,"
        "worst_ratio\n";
  for (const ProbeReport &r : suite.reports) {
    os << r.lemma << ',' << r.manifold << ',' << r.samples << ',' << r.violations << ','
       << format_double(r.bound) << ',' << format_double(r.fitted_constant) << ','
       << format_double(r.fitted_constant_2) << ',' << format_double(r.worst_ratio) << '\n';
  }
}

std::string probes_to_json(const ProbeSuite &suite) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json rows = json::array();
  for (const ProbeReport &r : suite.reports) {
    rows.push_back({{"lemma", r.lemma},
                    {"manifold", r.manifold},
                    {"samples", r.samples},
                    {"violations", r.violations},
                    {"bound", num(r.bound)},
                    {"fitted_constant", num(r.fitted_constant)},
                    {"fitted_constant_2", num(r.fitted_constant_2)},
                    {"worst_ratio", num(r.worst_ratio)}});
  }
  return json{{"probes", rows}}.dump(2);
}

} // namespace tgp::bench
