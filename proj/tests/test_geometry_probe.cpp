#include "tgp/geometry_probe.hpp"
#include "tgp/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tgp;

namespace {

const ManifoldKind kSt = ManifoldKind::stiefel(4, 2);
const ManifoldKind kGr = ManifoldKind::grassmann(4, 2);

// Exhaustive vertex search for min c1 + c2 s.t. a c1 + b c2 >= e, c >= 0.
// The optimum sits where two constraints (or an axis) are tight.
TwoConstantFit brute_fit(const std::vector<double> &a, const std::vector<double> &b,
                         const std::vector<double> &e) {
  auto feasible = [&](double c1, double c2) {
    if (c1 < -1e-12 || c2 < -1e-12) {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] * c1 + b[i] * c2 < e[i] * (1 - 1e-12)) {
        return false;
      }
    }
    return true;
  };
  std::vector<std::pair<double, double>> cands;
  const std::size_t m = a.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i] > 0) {
      cands.emplace_back(e[i] / a[i], 0.0);
    }
    if (b[i] > 0) {
      cands.emplace_back(0.0, e[i] / b[i]);
    }
    for (std::size_t j = i + 1; j < m; ++j) {
      const double det = a[i] * b[j] - a[j] * b[i];
      if (std::abs(det) > 1e-14) {
        cands.emplace_back((e[i] * b[j] - e[j] * b[i]) / det, (a[i] * e[j] - a[j] * e[i]) / det);
      }
    }
  }
  TwoConstantFit best{1e300, 0.0};
  for (auto [c1, c2] : cands) {
    if (feasible(c1, c2) && c1 + c2 < best.c1 + best.c2) {
      best = {c1, c2};
    }
  }
  return best;
}

} // namespace

TEST(GeometryProbe, StrataAndConstants) {
  const auto s = probe_strata(kSt, 0.5);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[3], 0.25);
  EXPECT_EQ(probe_strata(kSt, reach(kSt)).size(), 3u);
  EXPECT_DOUBLE_EQ(first_order_constant(kSt, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(first_order_constant(kGr, 0.5), 4.0 * std::sqrt(2.0) / 0.5);
  EXPECT_THROW(probe_strata(kGr, 0.9), std::invalid_argument);
  EXPECT_THROW(first_order_constant(kSt, 0.0), std::invalid_argument);
}

TEST(GeometryProbe, FirstOrderBoundHolds) {
  for (const ManifoldKind &kind : {kSt, kGr}) {
    for (double frac : {0.1, 0.5, 1.0}) {
      const ProbeReport r = probe_first_order_bound(kind, frac * reach(kind), 2000, 3);
      EXPECT_EQ(r.violations, 0) << kind.name();
      EXPECT_LE(r.fitted_constant, r.bound);
      EXPECT_LE(r.worst_ratio, 1.0);
    }
  }
}

TEST(GeometryProbe, StiefelLowerBoundHolds) {
  const ProbeReport r = probe_lower_bound(kSt, 2000, 4);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.bound, 3.0);
  EXPECT_GT(r.fitted_constant, 0.0);
  const ProbeReport g = probe_lower_bound(kGr, 500, 4);
  EXPECT_TRUE(std::isnan(g.bound));
  EXPECT_TRUE(std::isfinite(g.fitted_constant));
}

TEST(GeometryProbe, SphereNormalQuadraticConstantIsHalf) {
  // On the unit sphere ||x x^T (x - y)|| = (1 - <x,y>) = ||x - y||^2 / 2.
  for (int n : {2, 3, 6}) {
    const ProbeReport r = probe_normal_quadratic(ManifoldKind::stiefel(n, 1), 500, 5);
    EXPECT_NEAR(r.fitted_constant, 0.5, 1e-10);
  }
}

TEST(GeometryProbe, SecondOrderFitCoversEverySample) {
  const ProbeReport r = probe_second_order_bound(kSt, 0.5, 1000, 6);
  EXPECT_GE(r.fitted_constant, 0.0);
  EXPECT_GE(r.fitted_constant_2, 0.0);
  EXPECT_LE(r.worst_ratio, 1.0 + 1e-9);
}

TEST(GeometryProbe, DescentInequalityFit) {
  const GeneratedInstance g =
      generate_instance(ProblemKind::QpCase1, default_params(ProblemKind::QpCase1), 2);
  const ProbeReport r = probe_descent_inequality(make_objective(g.instance), 0.5, 1000, 7);
  EXPECT_GT(r.fitted_constant + r.fitted_constant_2, 0.0);
  EXPECT_LE(r.worst_ratio, 1.0 + 1e-9);
}

TEST(GeometryProbe, NormalStability) {
  for (const ManifoldKind &kind : {kSt, kGr}) {
    const ProbeReport r = probe_normal_stability(kind, 1000, 8);
    EXPECT_EQ(r.violations, 0) << kind.name();
    EXPECT_LT(r.worst_ratio, 1.0);
  }
}

TEST(GeometryProbe, TwoConstantFitMatchesVertexSearch) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a, b, e;
    for (int i = 0; i < 25; ++i) {
      a.push_back(u(rng));
      b.push_back(u(rng));
      e.push_back(u(rng) * (0.3 + a.back() + 2.0 * b.back()));
    }
    const TwoConstantFit f = fit_two_constants(a, b, e);
    const TwoConstantFit ref = brute_fit(a, b, e);
    EXPECT_NEAR(f.c1 + f.c2, ref.c1 + ref.c2, 1e-8 * (ref.c1 + ref.c2));
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_GE(a[i] * f.c1 + b[i] * f.c2, e[i] * (1 - 1e-9));
    }
  }
  EXPECT_THROW(fit_two_constants({1.0}, {}, {1.0}), std::invalid_argument);
}

TEST(GeometryProbe, TwoConstantFitPureCases) {
  // e = 2 a exactly: the optimum puts everything on c1.
  const TwoConstantFit f = fit_two_constants({1, 2, 3}, {1, 1, 1}, {2, 4, 6});
  EXPECT_NEAR(f.c1, 2.0, 1e-9);
  EXPECT_NEAR(f.c2, 0.0, 1e-9);
  const TwoConstantFit g = fit_two_constants({0, 0}, {1, 2}, {3, 2});
  EXPECT_NEAR(g.c2, 3.0, 1e-9);
}

TEST(GeometryProbe, SampleCountValidated) {
  EXPECT_THROW(probe_lower_bound(kSt, 0, 1), std::invalid_argument);
}
