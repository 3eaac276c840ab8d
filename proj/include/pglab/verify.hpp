#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pglab/dynamics.hpp"
#include "pglab/policy.hpp"

namespace pglab {

// Outcome of one numerical check. passed is a pure function of observed
// versus bound_or_target under the check's comparison.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::vector<double> observed;
  std::vector<double> bound_or_target;
  std::int64_t samples_used = 0;
  std::uint64_t seed = 0;
};

// Closed-form per-sample quantity for each linear testbed:
//   MB -> (T-2) (beta+theta)^(T-3) * zeta      (pathwise gradient sample)
//   PG -> beta^(T-2) * xi^2                    (estimate w/ exact baseline,
//                                               Gaussian xi, unit sigma)
//   FD -> beta^(T-2) * zeta + phi(beta^(T-2) * theta)   (J_hat itself)
double analytic_gradient_linear(TestbedKind kind, double beta, int T, double theta,
                                double noise_or_xi);

// Master oracle: draws random (beta, T, theta, noise) tuples, runs the
// simulated per-sample estimator quantity, and compares it to
// analytic_gradient_linear at 1e-10 relative.
CheckResult testbed_oracle_check(TestbedKind kind, int draws, std::uint64_t seed);

// Shared-noise finite differences of J_hat against the pathwise gradient:
// fits err(lambda) ~= c * lambda through the origin and fails if any error
// exceeds the linear envelope by more than 2x.
CheckResult fd_remainder_check(const DynamicalSystem& system, const Policy& policy,
                               const std::vector<double>& lambdas, std::uint64_t seed);

enum class NoiseFamily { Gaussian, Laplace, Logistic };

// E[xi * d/dxi log p(xi)] = -1 for any admissible density; Monte-Carlo
// check at 4 standard errors.
CheckResult score_identity_check(NoiseFamily family, std::int64_t n, std::uint64_t seed);

// Empirical two-sided Gaussian tail against the lower bound
// sqrt(e/2pi) * exp(-t^2/sigma^2), cross-checked against the erfc oracle.
CheckResult gaussian_tail_check(double sigma, const std::vector<double>& t_values, std::int64_t n,
                                std::uint64_t seed);

// Empirical upper tail of the mean of n_dof squared standard normals
// against the lower bound exp(-n_dof*eps/2) / (e^2 sqrt(2 n_dof)).
CheckResult chisq_tail_check(int n_dof, const std::vector<double>& eps_values, std::int64_t trials,
                             std::uint64_t seed);

// Smallest sigma on a log grid around the sample std whose Gaussian MGF
// envelope dominates the empirical MGF at a handful of test points.
// Instrumentation for comparing error-tail heaviness, not a certified
// bound.
double subgaussian_fit(const std::vector<double>& samples);

// The default battery behind `pglab verify`.
std::vector<CheckResult> run_all_checks(std::uint64_t seed);

std::string noise_family_name(NoiseFamily family);

}  // namespace pglab
