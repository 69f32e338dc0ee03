#pragma once

#include "tgp/solver.hpp"

#include <string>
#include <vector>

namespace tgp {

/// Outcome of one empirical probe. Fitted constants are the smallest values
/// consistent with every drawn sample, hence lower bounds on the true ones.
struct ProbeReport {
  std::string lemma;
  std::string manifold;
  long samples = 0;
  long violations = 0;
  /// Constant the samples are checked against, NaN for pure fits.
  double bound = std::numeric_limits<double>::quiet_NaN();
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  double fitted_constant_2 = std::numeric_limits<double>::quiet_NaN();
  /// Largest lhs / rhs seen, using `bound` when set and the fit otherwise.
  double worst_ratio = 0.0;
};

/// Tangent and normal magnitudes cycled through by the probes:
/// {1e-3, 1e-2, 0.1, 0.5 (reach - delta)}, the last omitted when delta = reach.
std::vector<double> probe_strata(const ManifoldKind &kind, double delta);

/// Reference first-order constant: 2/delta on Stiefel, 4 sqrt(p)/delta on
/// Grassmann.
double first_order_constant(const ManifoldKind &kind, double delta);

/// ||P(X+V+W) - X|| <= L0 ||V|| with ||W|| <= reach - delta.
ProbeReport probe_first_order_bound(const ManifoldKind &kind, double delta,
                                    long samples, std::uint64_t seed);

/// Fits ||P(X+V+W) - X - V|| <= L1 ||V||^2 + L2 ||V|| ||W||.
ProbeReport probe_second_order_bound(const ManifoldKind &kind, double delta,
                                     long samples, std::uint64_t seed);

/// Stiefel: counts violations of ||P(X+V+W) - X|| >= ||V|| / ((r+1) ||X+V+W||).
/// Both kinds: fits L3 in ||P(X+V+W) - X|| >= ||V|| / (1 + L3 ||V+W||).
ProbeReport probe_lower_bound(const ManifoldKind &kind, long samples,
                              std::uint64_t seed);

/// Fits ||P_N(x)(x - y)|| <= L4 ||x - y||^2 over pairs on the manifold.
ProbeReport probe_normal_quadratic(const ManifoldKind &kind, long samples,
                                   std::uint64_t seed);

/// Fits |f(P(x+v+w)) - f(x) - <grad f, v>| <= G1 ||v||^2 + G2 ||grad f|| ||v|| ||w||.
ProbeReport probe_descent_inequality(const Objective &objective, double delta,
                                     long samples, std::uint64_t seed);

/// P(X + W) = X within 1e-10 for normal W inside the reach. Stiefel draws
/// W = X S with lambda_min(S) > -1 + 1e-6; Grassmann draws ||W|| < reach - 1e-6.
ProbeReport probe_normal_stability(const ManifoldKind &kind, long samples,
                                   std::uint64_t seed);

/// Minimises c1 + c2 subject to a_i c1 + b_i c2 >= e_i, c1, c2 >= 0.
struct TwoConstantFit {
  double c1 = 0.0;
  double c2 = 0.0;
};
TwoConstantFit fit_two_constants(const std::vector<double> &a,
                                 const std::vector<double> &b,
                                 const std::vector<double> &e);

} // namespace tgp
