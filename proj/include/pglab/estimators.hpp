#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

#include "pglab/dynamics.hpp"
#include "pglab/policy.hpp"

namespace pglab {

enum class EstimatorKind { MB, PG, FD };
enum class BaselineMode { None, ExactAnalytic, McRollouts };
enum class FdMode { Basis, Sphere };

struct PgConfig {
  // <= 0 means "default to the system's sigma_zeta"; if that is also zero
  // the estimator is undefined and estimate_pg fails.
  double sigma_xi = 0.0;
  BaselineMode baseline = BaselineMode::McRollouts;
  int baseline_samples = 16;  // restart rollouts per (s_t, t)
};

struct FdConfig {
  double lambda = 1e-3;
  FdMode mode = FdMode::Basis;
  bool crn = false;  // share the noise realization between the +/- sides
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::MB;
  PgConfig pg;
  FdConfig fd;
};

// Estimated grad J with exact rollout accounting: n_rollouts counts the
// simulator rollouts issued by the estimator itself (FD basis: 2*n*d_Theta,
// FD sphere: 2*n, MB/PG: n); baseline restarts are counted separately.
struct GradientEstimate {
  Eigen::VectorXd grad;
  std::int64_t n_rollouts = 0;
  std::int64_t baseline_rollouts = 0;
  EstimatorConfig config;
  std::uint64_t seed = 0;
};

// Pathwise gradient of J_hat(theta; zeta) for one noise realization:
// a single forward rollout followed by one backward pass through the
// analytic system and policy Jacobians. Action noise in `noise` is ignored
// (the model-based estimator differentiates the deterministic policy).
Eigen::VectorXd mb_single(const DynamicalSystem& system, const Policy& policy,
                          const NoiseSequence& noise);

// Score-function estimate for one stochastic-policy rollout (noise must
// carry action noise). Advantage uses reward-to-go minus the configured
// baseline; restart rollouts for the Monte-Carlo baseline draw their own
// streams from baseline_seed and are tallied into *baseline_rollouts.
Eigen::VectorXd pg_single(const DynamicalSystem& system, const Policy& policy,
                          const NoiseSequence& noise, double sigma_xi, BaselineMode baseline,
                          int baseline_samples, std::uint64_t baseline_seed,
                          std::int64_t* baseline_rollouts);

GradientEstimate estimate_mb(const DynamicalSystem& system, const Policy& policy, int n,
                             std::uint64_t seed);
GradientEstimate estimate_pg(const DynamicalSystem& system, const Policy& policy, int n,
                             const PgConfig& config, std::uint64_t seed);
GradientEstimate estimate_fd(const DynamicalSystem& system, const Policy& policy, int n,
                             const FdConfig& config, std::uint64_t seed);

// Dispatch on config.kind.
GradientEstimate estimate(const DynamicalSystem& system, const Policy& policy,
                          const EstimatorConfig& config, int n, std::uint64_t seed);

std::string estimator_name(EstimatorKind kind);
std::string baseline_name(BaselineMode mode);
std::string fd_mode_name(FdMode mode);

}  // namespace pglab
