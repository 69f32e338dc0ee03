#include "tgp/geometry_probe.hpp"

#include <algorithm>
#include <cmath>

namespace tgp {

namespace {

struct Triple {
  ManifoldPoint X;
  Matrix V;
  Matrix W;
};

/// Sample s uses tangent stratum s mod 4 and normal stratum (s / 4) mod 4,
/// so every block of 16 consecutive samples covers all combinations.
Triple draw_triple(const ManifoldKind &kind, const std::vector<double> &strata,
                   long s, Rng &rng) {
  ManifoldPoint X = random_point(kind, rng);
  const std::size_t m = strata.size();
  const double vn = strata[static_cast<std::size_t>(s) % m];
  const double wn = strata[(static_cast<std::size_t>(s) / m) % m];
  Matrix V = random_tangent(X, vn, rng);
  Matrix W = random_normal(X, wn, rng);
  return {std::move(X), std::move(V), std::move(W)};
}

void require_delta(const ManifoldKind &kind, double delta) {
  if (!(delta > 0.0 && delta <= reach(kind))) {
    throw std::invalid_argument("probe: delta must lie in (0, reach]");
  }
}

void require_samples(long samples) {
  if (samples < 1) {
    throw std::invalid_argument("probe: need at least one sample");
  }
}

Matrix project(const ManifoldKind &kind, const Matrix &Y) {
  return project_to_manifold(kind, Y).point.value();
}

} // namespace

std::vector<double> probe_strata(const ManifoldKind &kind, double delta) {
  require_delta(kind, delta);
  std::vector<double> out{1e-3, 1e-2, 0.1};
  // At delta = reach the outer stratum collapses to zero.
  if (delta < reach(kind)) {
    out.push_back(0.5 * (reach(kind) - delta));
  }
  return out;
}

double first_order_constant(const ManifoldKind &kind, double delta) {
  require_delta(kind, delta);
  if (kind.is_stiefel()) {
    return 2.0 / delta;
  }
  return 4.0 * std::sqrt(static_cast<double>(kind.k())) / delta;
}

ProbeReport probe_first_order_bound(const ManifoldKind &kind, double delta,
                                    long samples, std::uint64_t seed) {
  require_samples(samples);
  const auto strata = probe_strata(kind, delta);
  const double L0 = first_order_constant(kind, delta);
  Rng rng(seed);
  ProbeReport rep{"first_order", kind.name(), samples};
  rep.bound = L0;
  double fit = 0.0;
  for (long s = 0; s < samples; ++s) {
    const Triple t = draw_triple(kind, strata, s, rng);
    const double d = (project(kind, t.X.value() + t.V + t.W) - t.X.value()).norm();
    const double ratio = d / t.V.norm();
    fit = std::max(fit, ratio);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio / L0);
    if (d > L0 * t.V.norm()) {
      ++rep.violations;
    }
  }
  rep.fitted_constant = fit;
  return rep;
}

ProbeReport probe_second_order_bound(const ManifoldKind &kind, double delta,
                                     long samples, std::uint64_t seed) {
  require_samples(samples);
  const auto strata = probe_strata(kind, delta);
  Rng rng(seed);
  std::vector<double> a, b, e;
  a.reserve(samples);
  b.reserve(samples);
  e.reserve(samples);
  for (long s = 0; s < samples; ++s) {
    const Triple t = draw_triple(kind, strata, s, rng);
    const Matrix Z = project(kind, t.X.value() + t.V + t.W);
    const double vn = t.V.norm();
    a.push_back(vn * vn);
    b.push_back(vn * t.W.norm());
    e.push_back((Z - t.X.value() - t.V).norm());
  }
  const TwoConstantFit fit = fit_two_constants(a, b, e);
  ProbeReport rep{"second_order", kind.name(), samples};
  rep.fitted_constant = fit.c1;
  rep.fitted_constant_2 = fit.c2;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double rhs = fit.c1 * a[i] + fit.c2 * b[i];
    if (rhs > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, e[i] / rhs);
    }
  }
  return rep;
}

ProbeReport probe_lower_bound(const ManifoldKind &kind, long samples,
                              std::uint64_t seed) {
  require_samples(samples);
  const auto strata = probe_strata(kind, 0.5 * reach(kind));
  Rng rng(seed);
  ProbeReport rep{"lower_bound", kind.name(), samples};
  double L3 = 0.0;
  const double r1 = static_cast<double>(kind.k()) + 1.0;
  for (long s = 0; s < samples; ++s) {
    const Triple t = draw_triple(kind, strata, s, rng);
    const Matrix Y = t.X.value() + t.V + t.W;
    const double d = (project(kind, Y) - t.X.value()).norm();
    const double vn = t.V.norm();
    if (d > 0.0) {
      L3 = std::max(L3, (vn / d - 1.0) / (t.V + t.W).norm());
    }
    if (kind.is_stiefel()) {
      const double lower = vn / (r1 * Y.norm());
      rep.worst_ratio = std::max(rep.worst_ratio, lower / d);
      if (d < lower) {
        ++rep.violations;
      }
    }
  }
  rep.fitted_constant = L3;
  if (kind.is_stiefel()) {
    rep.bound = r1;
  }
  return rep;
}

ProbeReport probe_normal_quadratic(const ManifoldKind &kind, long samples,
                                   std::uint64_t seed) {
  require_samples(samples);
  // y = P(x + V) for stratified tangent steps, plus independent far pairs.
  // Steps below 1e-2 only measure rounding in ||x - y||^2.
  const std::vector<double> steps{1e-2, 0.1, 0.5, 1.5};
  Rng rng(seed);
  ProbeReport rep{"normal_quadratic", kind.name(), samples};
  double L4 = 0.0;
  for (long s = 0; s < samples; ++s) {
    const ManifoldPoint X = random_point(kind, rng);
    const std::size_t slot = static_cast<std::size_t>(s) % (steps.size() + 1);
    Matrix Y;
    if (slot < steps.size()) {
      Y = project(kind, X.value() + random_tangent(X, steps[slot], rng));
    } else {
      Y = random_point(kind, rng).value();
    }
    const Matrix D = X.value() - Y;
    const double dn = D.norm();
    if (dn == 0.0) {
      continue;
    }
    L4 = std::max(L4, project_normal(X, D).value.norm() / (dn * dn));
  }
  rep.fitted_constant = L4;
  rep.worst_ratio = 1.0;
  return rep;
}

ProbeReport probe_descent_inequality(const Objective &objective, double delta,
                                     long samples, std::uint64_t seed) {
  require_samples(samples);
  const ManifoldKind &kind = objective.manifold;
  const auto strata = probe_strata(kind, delta);
  Rng rng(seed);
  std::vector<double> a, b, e;
  for (long s = 0; s < samples; ++s) {
    const Triple t = draw_triple(kind, strata, s, rng);
    const Matrix &x = t.X.value();
    const double fx = objective.cost(x);
    const Matrix g = riemannian_gradient(t.X, objective.egrad(x)).value;
    const double fz = objective.cost(project(kind, x + t.V + t.W));
    const double vn = t.V.norm();
    a.push_back(vn * vn);
    b.push_back(g.norm() * vn * t.W.norm());
    e.push_back(std::abs(fz - fx - inner(g, t.V)));
  }
  const TwoConstantFit fit = fit_two_constants(a, b, e);
  ProbeReport rep{"descent_inequality", kind.name(), samples};
  rep.fitted_constant = fit.c1;
  rep.fitted_constant_2 = fit.c2;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double rhs = fit.c1 * a[i] + fit.c2 * b[i];
    if (rhs > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, e[i] / rhs);
    }
  }
  return rep;
}

ProbeReport probe_normal_stability(const ManifoldKind &kind, long samples,
                                   std::uint64_t seed) {
  require_samples(samples);
  constexpr double kMargin = 1e-6;
  constexpr double kTol = 1e-10;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProbeReport rep{"normal_stability", kind.name(), samples};
  rep.bound = kTol;
  for (long s = 0; s < samples; ++s) {
    const ManifoldPoint X = random_point(kind, rng);
    Matrix W;
    if (kind.is_stiefel()) {
      const Matrix S = rand_sym_with_spectrum(kind.k(), -1.0 + kMargin, 2.0, rng);
      W = X.value() * S;
    } else {
      W = random_normal(X, (reach(kind) - kMargin) * u(rng), rng);
    }
    const double err = (project(kind, X.value() + W) - X.value()).norm();
    rep.worst_ratio = std::max(rep.worst_ratio, err / kTol);
    if (!(err < kTol)) {
      ++rep.violations;
    }
  }
  return rep;
}

TwoConstantFit fit_two_constants(const std::vector<double> &a,
                                 const std::vector<double> &b,
                                 const std::vector<double> &e) {
  if (a.size() != b.size() || a.size() != e.size()) {
    throw std::invalid_argument("fit_two_constants: length mismatch");
  }
  auto c1_at = [&](double t) {
    double c1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0.0) {
        c1 = std::max(c1, (e[i] - t * b[i]) / a[i]);
      }
    }
    return c1;
  };
  // Rows with a_i = 0 can only be met through c2, which gives t_lo. Beyond
  // t_hi every row with b_i > 0 holds with c1 = 0.
  double t_lo = 0.0;
  double t_hi = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] > 0.0) {
      t_hi = std::max(t_hi, e[i] / b[i]);
      if (!(a[i] > 0.0)) {
        t_lo = std::max(t_lo, e[i] / b[i]);
      }
    }
  }
  // Golden-section search on the convex function t + c1(t).
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = t_lo;
  double hi = t_hi;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = x1 + c1_at(x1);
  double f2 = x2 + c1_at(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = x1 + c1_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = x2 + c1_at(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  // The lower endpoint can beat the interior when the minimum sits on a kink.
  if (t_lo + c1_at(t_lo) <= t + c1_at(t)) {
    t = t_lo;
  }
  return {c1_at(t), t};
}

} // namespace tgp
