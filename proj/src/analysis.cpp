#include "pglab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pglab/parallel.hpp"
#include "pglab/rng.hpp"

namespace pglab {

namespace {

Eigen::VectorXd analytic_testbed_gradient(const DynamicalSystem& system, const Policy& policy) {
  if (!system.testbed.has_value()) {
    throw UnsupportedOperation("ground_truth_gradient: analytic form only on testbeds");
  }
  const TestbedInfo& tb = *system.testbed;
  const int T = system.horizon;
  auto beta_pow = [&](int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= tb.beta;
    return v;
  };
  switch (tb.kind) {
    case TestbedKind::MB:
      // E[zeta] = 0, so grad J vanishes at every theta.
      return Eigen::VectorXd::Zero(policy.param_dim());
    case TestbedKind::PG:
      return Eigen::VectorXd::Constant(1, beta_pow(T - 2));
    case TestbedKind::FD: {
      const double x = beta_pow(T - 2) * policy.theta()[0];
      return Eigen::VectorXd::Constant(1, fd_phi_prime(x) * beta_pow(T - 2));
    }
  }
  throw std::invalid_argument("analytic_testbed_gradient: unknown testbed kind");
}

}  // namespace

GroundTruth ground_truth_gradient(const DynamicalSystem& system, const Policy& policy,
                                  const GroundTruthMethod& method, std::uint64_t seed) {
  GroundTruth out;
  if (method.kind == GroundTruthMethod::Kind::Analytic) {
    out.grad = analytic_testbed_gradient(system, policy);
    out.standard_error = Eigen::VectorXd::Zero(out.grad.size());
    return out;
  }
  const std::int64_t n = method.n;
  if (n < 1) throw std::invalid_argument("ground_truth_gradient: n must be >= 1");
  const int d = policy.param_dim();

  // Chunked, anchor-centered accumulation: worker-count independent and
  // exact when every sample is identical.
  const Eigen::VectorXd anchor = mb_single(
      system, policy, sample_noise(system, derive_seed(seed, {seed_tag::kMbSample, 0})));
  constexpr std::int64_t kChunk = 1024;
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::VectorXd> sums(chunks), sq_sums(chunks);
  parallel_for(chunks, [&](std::int64_t c) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(n, lo + kChunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      const Eigen::VectorXd g =
          i == 0 ? anchor
                 : mb_single(system, policy,
                             sample_noise(system, derive_seed(seed, {seed_tag::kMbSample,
                                                                     static_cast<std::uint64_t>(i)})));
      const Eigen::VectorXd centered = g - anchor;
      sum += centered;
      sq += centered.cwiseProduct(centered);
    }
    sums[c] = sum;
    sq_sums[c] = sq;
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (std::int64_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += sq_sums[c];
  }
  const Eigen::VectorXd centered_mean = sum / static_cast<double>(n);
  out.grad = anchor + centered_mean;
  out.standard_error = Eigen::VectorXd::Zero(d);
  if (n > 1) {
    const Eigen::VectorXd var =
        (sq - static_cast<double>(n) * centered_mean.cwiseProduct(centered_mean)) /
        static_cast<double>(n - 1);
    out.standard_error = (var.cwiseMax(0.0) / static_cast<double>(n)).cwiseSqrt();
  }
  return out;
}

namespace {

SweepPoint summarize_errors(double axis_value, const std::vector<Eigen::VectorXd>& errors) {
  const std::int64_t repeats = static_cast<std::int64_t>(errors.size());
  const int d = static_cast<int>(errors.front().size());
  SweepPoint point;
  point.axis_value = axis_value;
  point.mean_err.resize(d);
  point.std_err.resize(d);
  point.q05.resize(d);
  point.q50.resize(d);
  point.q95.resize(d);
  std::vector<double> column(repeats);
  double var_acc = 0.0;
  for (int k = 0; k < d; ++k) {
    for (std::int64_t r = 0; r < repeats; ++r) column[r] = errors[r][k];
    point.mean_err[k] = mean(column);
    point.std_err[k] = repeats > 1 ? sample_std(column) : 0.0;
    point.q05[k] = quantile(column, 0.05);
    point.q50[k] = quantile(column, 0.50);
    point.q95[k] = quantile(column, 0.95);
    var_acc += point.std_err[k] * point.std_err[k];
  }
  point.agg_std = std::sqrt(var_acc / d);
  std::vector<double> norms(repeats);
  for (std::int64_t r = 0; r < repeats; ++r) norms[r] = errors[r].norm();
  point.norm_mean = mean(norms);
  point.norm_std = repeats > 1 ? sample_std(norms) : 0.0;
  point.norm_q05 = quantile(norms, 0.05);
  point.norm_q50 = quantile(norms, 0.50);
  point.norm_q95 = quantile(norms, 0.95);
  return point;
}

GroundTruth sweep_ground_truth(const DynamicalSystem& system, const Policy& policy,
                               std::uint64_t seed) {
  GroundTruthMethod method;
  if (system.testbed.has_value()) {
    method.kind = GroundTruthMethod::Kind::Analytic;
  } else {
    method.kind = GroundTruthMethod::Kind::MbBigN;
    method.n = 100000;
  }
  return ground_truth_gradient(system, policy, method, seed);
}

}  // namespace

SweepReport empirical_sample_complexity(const EstimatorConfig& config,
                                        const DynamicalSystem& system, const Policy& policy,
                                        double epsilon, double delta,
                                        const std::vector<std::int64_t>& n_grid,
                                        std::int64_t repeats, std::uint64_t seed) {
  if (epsilon <= 0.0) throw std::invalid_argument("empirical_sample_complexity: epsilon <= 0");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("empirical_sample_complexity: delta outside (0, 1)");
  }
  if (n_grid.empty() || repeats < 1) {
    throw std::invalid_argument("empirical_sample_complexity: empty grid or repeats < 1");
  }

  const GroundTruth truth = sweep_ground_truth(system, policy, derive_seed(seed, {0}));

  SweepReport report;
  report.axis_name = "n";
  report.epsilon = epsilon;
  report.delta = delta;
  report.repeats = repeats;
  report.config = config;
  report.seed = seed;
  report.low_repeat_warning = repeats < 100;

  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const std::int64_t n = n_grid[gi];
    std::vector<Eigen::VectorXd> errors(repeats);
    parallel_for(repeats, [&](std::int64_t r) {
      const std::uint64_t run_seed =
          derive_seed(seed, {seed_tag::kSweepRepeat, static_cast<std::uint64_t>(gi),
                             static_cast<std::uint64_t>(r)});
      const GradientEstimate est = estimate(system, policy, config, static_cast<int>(n), run_seed);
      errors[r] = est.grad - truth.grad;
    });
    SweepPoint point = summarize_errors(static_cast<double>(n), errors);
    std::int64_t exceed = 0;
    for (const auto& e : errors) {
      if (e.norm() >= epsilon) ++exceed;
    }
    point.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(repeats);
    const WilsonInterval wilson = wilson_interval(exceed, repeats);
    point.wilson_lo = wilson.lower;
    point.wilson_hi = wilson.upper;
    point.gt_se = truth.standard_error.norm();
    report.points.push_back(std::move(point));
    if (!report.threshold_reached && wilson.upper <= delta) {
      report.threshold_reached = true;
      report.threshold_n = n;
    }
  }
  return report;
}

std::vector<SweepReport> variance_sweep(
    const std::vector<EstimatorConfig>& configs,
    const std::function<DynamicalSystem(double)>& system_family,
    const std::vector<double>& sigma_grid, const Policy& policy, std::int64_t repeats,
    std::uint64_t seed) {
  if (sigma_grid.empty()) throw std::invalid_argument("variance_sweep: empty sigma grid");
  for (std::size_t i = 1; i < sigma_grid.size(); ++i) {
    if (sigma_grid[i] <= sigma_grid[i - 1] || sigma_grid[i - 1] <= 0.0) {
      throw std::invalid_argument("variance_sweep: sigma grid must be positive and increasing");
    }
  }
  // Ground truth once per grid point, shared by every estimator config.
  std::vector<DynamicalSystem> systems;
  std::vector<GroundTruth> truths;
  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    systems.push_back(system_family(sigma_grid[si]));
    truths.push_back(sweep_ground_truth(systems.back(), policy, derive_seed(seed, {si})));
  }

  std::vector<SweepReport> reports;
  for (const EstimatorConfig& config : configs) {
    SweepReport report;
    report.axis_name = "sigma_zeta";
    report.repeats = repeats;
    report.config = config;
    report.seed = seed;
    report.low_repeat_warning = repeats < 100;
    for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
      const DynamicalSystem& system = systems[si];
      const GroundTruth& truth = truths[si];
      std::vector<Eigen::VectorXd> errors(repeats);
      // Repeat streams deliberately exclude the sigma index, so every grid
      // point consumes the same underlying normals.
      parallel_for(repeats, [&](std::int64_t r) {
        const std::uint64_t run_seed =
            derive_seed(seed, {seed_tag::kSweepRepeat, static_cast<std::uint64_t>(r)});
        const GradientEstimate est = estimate(system, policy, config, 1, run_seed);
        errors[r] = est.grad - truth.grad;
      });
      SweepPoint point = summarize_errors(sigma_grid[si], errors);
      point.gt_se = truth.standard_error.norm();
      report.points.push_back(std::move(point));
    }
    if (report.points.size() >= 2) {
      std::vector<double> xs, ys;
      for (const auto& p : report.points) {
        if (p.agg_std > 0.0) {
          xs.push_back(p.axis_value);
          ys.push_back(p.agg_std);
        }
      }
      if (xs.size() >= 2) report.fit = fit_loglog(xs, ys);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

BoundsReport theoretical_bounds(const LipschitzProfile& profile, int T, int d_s, int d_a,
                                int d_theta, double sigma_zeta, double epsilon, double delta) {
  if (T < 1 || d_s < 1 || d_a < 1 || d_theta < 1) {
    throw std::invalid_argument("theoretical_bounds: dimensions must be positive");
  }
  if (epsilon <= 0.0 || epsilon > 1.0 || delta <= 0.0 || delta > 1.0) {
    throw std::invalid_argument("theoretical_bounds: epsilon, delta must lie in (0, 1]");
  }
  if (sigma_zeta < 0.0) throw std::invalid_argument("theoretical_bounds: sigma_zeta < 0");

  const double t_d = static_cast<double>(T);
  const double bar_f = profile.bar_f_theta();
  const double bar_r = profile.bar_r_theta();
  const double bar_f_tilde = profile.bar_f_tilde_theta();

  BoundsReport out;
  out.l_v0 = 3.0 * t_d * t_d * profile.l_r_theta * std::pow(bar_f, T - 1);
  out.l_grad_v0 = 44.0 * std::pow(t_d, 5) * bar_r * std::pow(bar_f, 4 * (T - 1));
  out.l_v_tilde0 = 3.0 * t_d * t_d * profile.l_r_tilde_theta * std::pow(bar_f_tilde, T - 1);

  out.sigma_mb = 1320.0 * std::pow(t_d, 8) * bar_r * std::pow(bar_f, 5 * T) * sigma_zeta * d_s *
                 std::log(t_d * d_s);
  out.sqrt_n_mb = out.sigma_mb * std::sqrt(2.0 * std::log(2.0 * d_s / delta)) / epsilon;

  out.lambda_fd = epsilon / (88.0 * std::pow(t_d, 5) * bar_r * std::pow(bar_f, 4 * T) * d_a);
  out.sigma_fd = 60.0 * std::pow(t_d, 4) * profile.l_r_theta * std::pow(bar_f, T) * sigma_zeta *
                 d_a * std::log(t_d * d_a) / out.lambda_fd;
  const double eps_coord = epsilon / (2.0 * std::sqrt(static_cast<double>(d_theta)));
  const double delta_coord = delta / d_theta;
  out.sqrt_n_fd = out.sigma_fd * std::sqrt(2.0 * std::log(2.0 * d_a / delta_coord)) / eps_coord;

  // The sigma_xi = sigma_zeta choice makes the noise scale cancel, leaving
  // a floor that never shrinks with sigma_zeta.
  const double d = static_cast<double>(std::max(d_s, d_a));
  const double prod_dim = t_d * t_d * (d_s + d_a + 1.0) * d_a;
  out.tau_pg = 6.0 * std::pow(t_d, 4) * (profile.l_r + profile.l_r_tilde_theta) * profile.bar_f() *
               profile.l_pi * std::pow(bar_f_tilde, T) * d * d * prod_dim * std::log(prod_dim);
  out.sqrt_n_pg = out.tau_pg * std::sqrt(2.0 * std::log(2.0 * t_d * d_a / delta)) / epsilon;

  out.vacuous = !(std::isfinite(out.sqrt_n_mb) && std::isfinite(out.sqrt_n_fd) &&
                  std::isfinite(out.sqrt_n_pg) && std::isfinite(out.lambda_fd));
  return out;
}

LearningCurve sgd_train(const DynamicalSystem& system, const Policy& policy,
                        const EstimatorConfig& config, const TrainOptions& options,
                        std::uint64_t eval_seed, std::uint64_t train_seed) {
  if (options.steps < 1) throw std::invalid_argument("sgd_train: steps must be >= 1");
  if (options.learning_rate < 0.0) throw std::invalid_argument("sgd_train: negative learning rate");
  if (options.eval_every < 1 || options.eval_batch < 1) {
    throw std::invalid_argument("sgd_train: bad eval settings");
  }

  LearningCurve curve;

  // Fixed evaluation batch, reused at every evaluation point.
  std::vector<NoiseSequence> eval_noise;
  eval_noise.reserve(options.eval_batch);
  for (int b = 0; b < options.eval_batch; ++b) {
    const std::uint64_t s =
        derive_seed(eval_seed, {seed_tag::kEvalBatch, static_cast<std::uint64_t>(b)});
    curve.eval_seeds.insert(s);
    eval_noise.push_back(sample_noise(system, s));
  }
  auto evaluate = [&](const Policy& p) {
    double acc = 0.0;
    for (const NoiseSequence& noise : eval_noise) {
      acc += rollout_from(system, p, 0, system.initial_state, noise);
    }
    return acc / static_cast<double>(options.eval_batch);
  };
  auto record = [&](int step_index, const Policy& p, double j) {
    LearningCurvePoint point;
    point.step = step_index;
    point.theta_hash = fnv1a_hex(p.theta().data(), sizeof(double) * p.theta().size());
    point.j = j;
    point.rollouts = curve.total_rollouts;
    curve.points.push_back(std::move(point));
  };

  Policy current = policy;
  curve.initial_j = evaluate(current);
  curve.final_j = curve.initial_j;
  record(0, current, curve.initial_j);
  if (!std::isfinite(curve.initial_j)) {
    curve.diverged = true;
    curve.final_theta = current.theta();
    return curve;
  }

  for (int s = 1; s <= options.steps; ++s) {
    const std::uint64_t step_seed =
        derive_seed(train_seed, {seed_tag::kTrainStep, static_cast<std::uint64_t>(s)});
    curve.train_seeds.insert(step_seed);
    const GradientEstimate est = estimate(system, current, config, 1, step_seed);
    curve.total_rollouts += est.n_rollouts + est.baseline_rollouts;
    current = current.perturbed(options.learning_rate * est.grad);
    if (!current.theta().allFinite()) {
      curve.diverged = true;
      break;
    }
    if (s % options.eval_every == 0 || s == options.steps) {
      const double j = evaluate(current);
      record(s, current, j);
      if (!std::isfinite(j)) {
        curve.diverged = true;
        break;
      }
      curve.final_j = j;
    }
  }
  curve.final_theta = current.theta();
  for (std::uint64_t s : curve.train_seeds) {
    if (curve.eval_seeds.count(s) > 0) curve.seeds_disjoint = false;
  }
  curve.converged = !curve.diverged && curve.final_j >= curve.initial_j;
  return curve;
}

SearchResult hyperparameter_search(const DynamicalSystem& system, const Policy& policy,
                                   const EstimatorConfig& base_config, const TrainOptions& options,
                                   const std::vector<double>& lr_grid,
                                   const std::vector<double>& lambda_grid,
                                   const std::vector<double>& sigma_xi_grid,
                                   const std::vector<std::uint64_t>& seeds, std::int64_t budget,
                                   std::uint64_t eval_seed) {
  if (lr_grid.empty() || seeds.empty()) {
    throw std::invalid_argument("hyperparameter_search: empty lr grid or seed list");
  }
  const std::vector<double> lambdas =
      base_config.kind == EstimatorKind::FD && !lambda_grid.empty()
          ? lambda_grid
          : std::vector<double>{base_config.fd.lambda};
  const std::vector<double> sigma_xis =
      base_config.kind == EstimatorKind::PG && !sigma_xi_grid.empty()
          ? sigma_xi_grid
          : std::vector<double>{base_config.pg.sigma_xi};

  SearchResult result;
  double best = -std::numeric_limits<double>::infinity();
  double best_lr = std::numeric_limits<double>::infinity();
  bool found = false;

  for (double lambda : lambdas) {
    for (double sigma_xi : sigma_xis) {
      for (double lr : lr_grid) {
        if (result.runs_used + static_cast<std::int64_t>(seeds.size()) > budget) {
          result.partial = true;
          return result;
        }
        EstimatorConfig config = base_config;
        config.fd.lambda = lambda;
        config.pg.sigma_xi = sigma_xi;
        TrainOptions opts = options;
        opts.learning_rate = lr;

        std::vector<double> finals(seeds.size());
        std::vector<LearningCurve> curves(seeds.size());
        parallel_for(static_cast<std::int64_t>(seeds.size()), [&](std::int64_t i) {
          curves[i] = sgd_train(system, policy, config, opts,
                                derive_seed(eval_seed, {seeds[i]}), seeds[i]);
          finals[i] = curves[i].final_j;
        });
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          SearchRow row;
          row.lr = lr;
          row.lambda = lambda;
          row.sigma_xi = sigma_xi;
          row.seed = seeds[i];
          row.final_j = finals[i];
          row.converged = curves[i].converged;
          row.diverged = curves[i].diverged;
          result.table.push_back(row);
        }
        result.runs_used += static_cast<std::int64_t>(seeds.size());
        const double score = quantile(finals, 0.5);
        if (!found || score > best || (score == best && lr < best_lr)) {
          found = true;
          best = score;
          best_lr = lr;
          result.best_lr = lr;
          result.best_lambda = lambda;
          result.best_sigma_xi = sigma_xi;
          result.best_score = score;
        }
      }
    }
  }
  return result;
}

}  // namespace pglab
