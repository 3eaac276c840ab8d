#include "pglab/estimators.hpp"

#include <vector>

#include "pglab/parallel.hpp"
#include "pglab/rng.hpp"

namespace pglab {

namespace {

// Mean over sample vectors, anchored at the first sample so that identical
// samples (the zero-variance case) reproduce the sample bit-exactly.
Eigen::VectorXd anchored_mean(const std::vector<Eigen::VectorXd>& samples) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(samples.front().size());
  for (const auto& s : samples) acc += s - samples.front();
  return samples.front() + acc / static_cast<double>(samples.size());
}

double j_hat_only(const DynamicalSystem& system, const Policy& policy,
                  const NoiseSequence& noise) {
  return rollout_from(system, policy, 0, system.initial_state, noise);
}

// Reward-to-go of one restart rollout, drawing only the tail noise it
// consumes from a stream of its own.
double restart_reward_to_go(const DynamicalSystem& system, const Policy& policy, int t0,
                            const Eigen::VectorXd& s0, double sigma_xi, std::uint64_t seed) {
  RandomStream stream(seed);
  double q = 0.0;
  Eigen::VectorXd s = s0;
  for (int t = t0; t < system.horizon; ++t) {
    const Eigen::VectorXd a = policy.forward(s) + stream.gaussian(system.action_dim, sigma_xi);
    q += system.reward(t, s, a);
    s = system.transition(t, s, a) + stream.gaussian(system.noise_std(t));
  }
  return q;
}

}  // namespace

Eigen::VectorXd mb_single(const DynamicalSystem& system, const Policy& policy,
                          const NoiseSequence& noise) {
  if (!system.has_jacobians()) {
    throw UnsupportedOperation("mb_single: system does not expose analytic Jacobians");
  }
  const int T = system.horizon;
  if (static_cast<int>(noise.zetas.size()) != T) {
    throw std::invalid_argument("mb_single: noise horizon mismatch");
  }

  // Forward pass under the deterministic policy.
  std::vector<Eigen::VectorXd> states;
  states.reserve(T);
  Eigen::VectorXd s = system.initial_state;
  for (int t = 0; t < T; ++t) {
    states.push_back(s);
    if (t + 1 < T) s = step(system, t, s, policy.forward(s), noise.zetas[t]);
  }

  // Backward pass: g_theta accumulates grad_theta V, g_state tracks
  // grad_s V of the tail.
  Eigen::RowVectorXd g_theta = Eigen::RowVectorXd::Zero(policy.param_dim());
  Eigen::RowVectorXd g_state = Eigen::RowVectorXd::Zero(system.state_dim);
  for (int t = T - 1; t >= 0; --t) {
    const Eigen::VectorXd a = policy.forward(states[t]);
    const SystemJacobians sj = system.jacobians(t, states[t], a);
    const PolicyJacobians pj = policy.jacobians(states[t]);

    const Eigen::RowVectorXd dr_theta = sj.dr_da.transpose() * pj.d_theta;
    const Eigen::RowVectorXd dr_state =
        sj.dr_ds.transpose() + sj.dr_da.transpose() * pj.d_state;
    const Eigen::MatrixXd df_theta = sj.df_da * pj.d_theta;
    const Eigen::MatrixXd df_state = sj.df_ds + sj.df_da * pj.d_state;

    g_theta = dr_theta + g_theta + g_state * df_theta;
    g_state = dr_state + g_state * df_state;
  }
  return g_theta.transpose();
}

Eigen::VectorXd pg_single(const DynamicalSystem& system, const Policy& policy,
                          const NoiseSequence& noise, double sigma_xi, BaselineMode baseline,
                          int baseline_samples, std::uint64_t baseline_seed,
                          std::int64_t* baseline_rollouts) {
  if (!noise.has_action_noise()) {
    throw std::invalid_argument("pg_single: noise sequence lacks action noise");
  }
  if (sigma_xi <= 0.0) throw std::invalid_argument("pg_single: sigma_xi must be positive");
  if (baseline == BaselineMode::ExactAnalytic && !system.has_analytic_value()) {
    throw UnsupportedOperation("pg_single: system has no closed-form value function");
  }
  const int T = system.horizon;
  const Rollout traj = rollout(system, policy, noise);

  // Reward-to-go Q_hat^(t) = sum_{i >= t} r_i.
  std::vector<double> q(T);
  double tail = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    tail += traj.rewards[t];
    q[t] = tail;
  }

  const double inv_var = 1.0 / (sigma_xi * sigma_xi);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.param_dim());
  for (int t = 0; t < T; ++t) {
    double value = 0.0;
    switch (baseline) {
      case BaselineMode::None:
        break;
      case BaselineMode::ExactAnalytic:
        value = system.analytic_state_value(t, traj.states[t], policy.theta());
        break;
      case BaselineMode::McRollouts: {
        double acc = 0.0;
        for (int j = 0; j < baseline_samples; ++j) {
          const std::uint64_t restart_seed =
              derive_seed(baseline_seed, {seed_tag::kPgBaseline, static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(j)});
          acc += restart_reward_to_go(system, policy, t, traj.states[t], sigma_xi, restart_seed);
        }
        value = acc / static_cast<double>(baseline_samples);
        if (baseline_rollouts != nullptr) *baseline_rollouts += baseline_samples;
        break;
      }
    }
    const double advantage = q[t] - value;
    // grad_theta log pi~ = (grad_theta pi)^T xi / sigma_xi^2
    const PolicyJacobians pj = policy.jacobians(traj.states[t]);
    grad += advantage * inv_var * (pj.d_theta.transpose() * noise.xis[t]);
  }
  return grad;
}

GradientEstimate estimate_mb(const DynamicalSystem& system, const Policy& policy, int n,
                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("estimate_mb: n must be >= 1");
  std::vector<Eigen::VectorXd> samples(n);
  parallel_for(n, [&](std::int64_t i) {
    const NoiseSequence noise =
        sample_noise(system, derive_seed(seed, {seed_tag::kMbSample, static_cast<std::uint64_t>(i)}));
    samples[i] = mb_single(system, policy, noise);
  });
  GradientEstimate est;
  est.grad = anchored_mean(samples);
  est.n_rollouts = n;
  est.config.kind = EstimatorKind::MB;
  est.seed = seed;
  return est;
}

GradientEstimate estimate_pg(const DynamicalSystem& system, const Policy& policy, int n,
                             const PgConfig& config, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("estimate_pg: n must be >= 1");
  double sigma_xi = config.sigma_xi > 0.0 ? config.sigma_xi : system.sigma_zeta;
  if (sigma_xi <= 0.0) {
    throw std::invalid_argument(
        "estimate_pg: action noise required (system sigma_zeta is zero; supply sigma_xi > 0)");
  }
  if (config.baseline == BaselineMode::McRollouts && config.baseline_samples < 1) {
    throw std::invalid_argument("estimate_pg: baseline_samples must be >= 1");
  }
  std::vector<Eigen::VectorXd> samples(n);
  std::vector<std::int64_t> baseline_counts(n, 0);
  parallel_for(n, [&](std::int64_t i) {
    const std::uint64_t sample_seed =
        derive_seed(seed, {seed_tag::kPgSample, static_cast<std::uint64_t>(i)});
    const NoiseSequence noise = sample_noise(system, sample_seed, sigma_xi);
    samples[i] = pg_single(system, policy, noise, sigma_xi, config.baseline,
                           config.baseline_samples, sample_seed, &baseline_counts[i]);
  });
  GradientEstimate est;
  est.grad = anchored_mean(samples);
  est.n_rollouts = n;
  for (std::int64_t c : baseline_counts) est.baseline_rollouts += c;
  est.config.kind = EstimatorKind::PG;
  est.config.pg = config;
  est.config.pg.sigma_xi = sigma_xi;
  est.seed = seed;
  return est;
}

GradientEstimate estimate_fd(const DynamicalSystem& system, const Policy& policy, int n,
                             const FdConfig& config, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("estimate_fd: n must be >= 1");
  if (config.lambda <= 0.0) throw std::invalid_argument("estimate_fd: lambda must be positive");
  const int d = policy.param_dim();
  const double lambda = config.lambda;

  GradientEstimate est;
  est.config.kind = EstimatorKind::FD;
  est.config.fd = config;
  est.seed = seed;

  if (config.mode == FdMode::Basis) {
    // Two one-sided sample means per basis direction.
    std::vector<double> plus(static_cast<std::size_t>(d) * n);
    std::vector<double> minus(static_cast<std::size_t>(d) * n);
    parallel_for(static_cast<std::int64_t>(d) * n, [&](std::int64_t idx) {
      const int k = static_cast<int>(idx / n);
      const int i = static_cast<int>(idx % n);
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(d);
      delta[k] = lambda;
      const std::uint64_t plus_seed = derive_seed(
          seed, {seed_tag::kFdPlus, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)});
      const std::uint64_t minus_seed =
          config.crn ? plus_seed
                     : derive_seed(seed, {seed_tag::kFdMinus, static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(i)});
      plus[idx] = j_hat_only(system, policy.perturbed(delta), sample_noise(system, plus_seed));
      minus[idx] = j_hat_only(system, policy.perturbed(-delta), sample_noise(system, minus_seed));
    });
    est.grad = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < d; ++k) {
      double plus_mean = 0.0, minus_mean = 0.0;
      for (int i = 0; i < n; ++i) {
        plus_mean += plus[static_cast<std::size_t>(k) * n + i];
        minus_mean += minus[static_cast<std::size_t>(k) * n + i];
      }
      plus_mean /= n;
      minus_mean /= n;
      est.grad[k] = (plus_mean - minus_mean) / (2.0 * lambda);
    }
    est.n_rollouts = 2LL * n * d;
  } else {
    std::vector<Eigen::VectorXd> samples(n);
    parallel_for(n, [&](std::int64_t i) {
      RandomStream direction_stream(
          derive_seed(seed, {seed_tag::kFdDirection, static_cast<std::uint64_t>(i)}));
      const Eigen::VectorXd nu = direction_stream.unit_sphere(d);
      const std::uint64_t plus_seed =
          derive_seed(seed, {seed_tag::kFdPlus, static_cast<std::uint64_t>(i)});
      const std::uint64_t minus_seed =
          config.crn ? plus_seed
                     : derive_seed(seed, {seed_tag::kFdMinus, static_cast<std::uint64_t>(i)});
      const double jp =
          j_hat_only(system, policy.perturbed(lambda * nu), sample_noise(system, plus_seed));
      const double jm =
          j_hat_only(system, policy.perturbed(-lambda * nu), sample_noise(system, minus_seed));
      samples[i] = static_cast<double>(d) * (jp - jm) / (2.0 * lambda) * nu;
    });
    est.grad = anchored_mean(samples);
    est.n_rollouts = 2LL * n;
  }
  return est;
}

GradientEstimate estimate(const DynamicalSystem& system, const Policy& policy,
                          const EstimatorConfig& config, int n, std::uint64_t seed) {
  switch (config.kind) {
    case EstimatorKind::MB:
      return estimate_mb(system, policy, n, seed);
    case EstimatorKind::PG:
      return estimate_pg(system, policy, n, config.pg, seed);
    case EstimatorKind::FD:
      return estimate_fd(system, policy, n, config.fd, seed);
  }
  throw std::invalid_argument("estimate: unknown estimator kind");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MB:
      return "mb";
    case EstimatorKind::PG:
      return "pg";
    case EstimatorKind::FD:
      return "fd";
  }
  return "unknown";
}

std::string baseline_name(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::None:
      return "none";
    case BaselineMode::ExactAnalytic:
      return "exact";
    case BaselineMode::McRollouts:
      return "mc";
  }
  return "unknown";
}

std::string fd_mode_name(FdMode mode) {
  return mode == FdMode::Basis ? "basis" : "sphere";
}

}  // namespace pglab
