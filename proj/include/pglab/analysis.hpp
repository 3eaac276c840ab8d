#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "pglab/estimators.hpp"
#include "pglab/stats.hpp"

namespace pglab {

struct GroundTruthMethod {
  enum class Kind { Analytic, MbBigN };
  Kind kind = Kind::Analytic;
  std::int64_t n = 1000000;  // samples for MbBigN
};

struct GroundTruth {
  Eigen::VectorXd grad;
  Eigen::VectorXd standard_error;  // zero for the analytic method
};

// Closed-form grad J on the testbeds, or a large-n model-based estimate
// with its standard error.
GroundTruth ground_truth_gradient(const DynamicalSystem& system, const Policy& policy,
                                  const GroundTruthMethod& method, std::uint64_t seed);

// Per-grid-point statistics of D_hat - D* over R repeats.
struct SweepPoint {
  double axis_value = 0.0;
  Eigen::VectorXd mean_err, std_err, q05, q50, q95;  // per coordinate
  double norm_mean = 0.0, norm_std = 0.0;
  double norm_q05 = 0.0, norm_q50 = 0.0, norm_q95 = 0.0;
  // Scalar error scale used by the slope fit: RMS over coordinates of the
  // per-coordinate std (equals std_err for scalar estimators).
  double agg_std = 0.0;
  // Sample-complexity extras; NaN outside empirical_sample_complexity.
  double exceed_fraction = std::nan("");
  double wilson_lo = std::nan("");
  double wilson_hi = std::nan("");
  // Norm of the ground-truth standard error (0 for analytic ground truth).
  double gt_se = 0.0;
};

struct SweepReport {
  std::string axis_name;
  std::vector<SweepPoint> points;
  std::optional<LogLogFit> fit;  // log-log fit of agg_std against the axis
  // empirical_sample_complexity fields
  bool threshold_reached = false;
  std::int64_t threshold_n = -1;
  double epsilon = std::nan("");
  double delta = std::nan("");
  bool low_repeat_warning = false;
  // run echo
  std::int64_t repeats = 0;
  EstimatorConfig config;
  std::uint64_t seed = 0;
};

// Estimates Pr[||D_hat_n - D*|| >= epsilon] at each n in the grid as the
// exceedance fraction over R repeats with a Wilson 95% interval, and
// reports the smallest n whose interval upper end is <= delta.
SweepReport empirical_sample_complexity(const EstimatorConfig& config,
                                        const DynamicalSystem& system, const Policy& policy,
                                        double epsilon, double delta,
                                        const std::vector<std::int64_t>& n_grid, std::int64_t repeats,
                                        std::uint64_t seed);

// Per estimator and per sigma_zeta, the spread of single-sample estimates
// against a ground truth recomputed at that sigma, plus the fitted log-log
// slope of the error std. Repeat streams are shared across grid points so
// scale relations hold exactly for linear testbeds.
std::vector<SweepReport> variance_sweep(
    const std::vector<EstimatorConfig>& configs,
    const std::function<DynamicalSystem(double)>& system_family,
    const std::vector<double>& sigma_grid, const Policy& policy, std::int64_t repeats,
    std::uint64_t seed);

// Lipschitz constants of the system maps and their gradient counterparts.
// bar(h) = max{L_grad_h, L_h, 1} as the bounds use them.
struct LipschitzProfile {
  double l_r = 1.0, l_f = 1.0, l_pi = 1.0;
  double l_r_theta = 1.0, l_f_theta = 1.0;
  double l_r_tilde_theta = 1.0, l_f_tilde_theta = 1.0;
  double l_grad_r = 1.0, l_grad_f = 1.0, l_grad_pi = 1.0;
  double l_grad_r_theta = 1.0, l_grad_f_theta = 1.0;
  double l_grad_r_tilde_theta = 1.0, l_grad_f_tilde_theta = 1.0;

  double bar_r() const { return std::max({l_grad_r, l_r, 1.0}); }
  double bar_f() const { return std::max({l_grad_f, l_f, 1.0}); }
  double bar_r_theta() const { return std::max({l_grad_r_theta, l_r_theta, 1.0}); }
  double bar_f_theta() const { return std::max({l_grad_f_theta, l_f_theta, 1.0}); }
  double bar_r_tilde_theta() const { return std::max({l_grad_r_tilde_theta, l_r_tilde_theta, 1.0}); }
  double bar_f_tilde_theta() const { return std::max({l_grad_f_tilde_theta, l_f_tilde_theta, 1.0}); }
};

// Proof-constant sample-complexity predictions. These evaluate the bound
// expressions with the explicit constants from the derivations; they are
// worst-case certificates, not tight predictions.
struct BoundsReport {
  double l_v0 = 0.0;        // Lipschitz bound for V at t = 0
  double l_grad_v0 = 0.0;   // Lipschitz bound for grad V at t = 0
  double l_v_tilde0 = 0.0;  // Lipschitz bound for V~ at t = 0
  double sigma_mb = 0.0;
  double sqrt_n_mb = 0.0;
  double lambda_fd = 0.0;  // recommended finite-difference step
  double sigma_fd = 0.0;
  double sqrt_n_fd = 0.0;
  double tau_pg = 0.0;
  double sqrt_n_pg = 0.0;
  bool vacuous = false;  // some bound overflowed to infinity
};

BoundsReport theoretical_bounds(const LipschitzProfile& profile, int T, int d_s, int d_a,
                                int d_theta, double sigma_zeta, double epsilon, double delta);

struct LearningCurvePoint {
  int step = 0;
  std::string theta_hash;
  double j = 0.0;
  std::int64_t rollouts = 0;  // cumulative training rollouts (incl. baselines)
};

struct LearningCurve {
  std::vector<LearningCurvePoint> points;
  bool diverged = false;
  bool converged = false;
  double initial_j = 0.0;
  double final_j = 0.0;
  Eigen::VectorXd final_theta;
  std::int64_t total_rollouts = 0;
  // Stream-root seeds, recorded to verify train/eval disjointness.
  std::unordered_set<std::uint64_t> train_seeds;
  std::unordered_set<std::uint64_t> eval_seeds;
  bool seeds_disjoint = true;
};

struct TrainOptions {
  int steps = 1000;
  double learning_rate = 1e-3;
  int eval_every = 10;
  int eval_batch = 64;
};

// Plain SGD ascent with batch-size-1 gradient estimates. J(theta) is
// evaluated on a fixed eval_seed-derived batch disjoint from the training
// streams; a non-finite theta or J truncates the curve and marks the run
// diverged. Converged means: finite throughout and final J >= initial J.
LearningCurve sgd_train(const DynamicalSystem& system, const Policy& policy,
                        const EstimatorConfig& config, const TrainOptions& options,
                        std::uint64_t eval_seed, std::uint64_t train_seed);

struct SearchRow {
  double lr = 0.0;
  double lambda = std::nan("");
  double sigma_xi = std::nan("");
  std::uint64_t seed = 0;
  double final_j = 0.0;
  bool converged = false;
  bool diverged = false;
};

struct SearchResult {
  double best_lr = 0.0;
  double best_lambda = std::nan("");
  double best_sigma_xi = std::nan("");
  double best_score = 0.0;  // median final J across seeds
  std::vector<SearchRow> table;
  bool partial = false;  // budget ran out before the grid was exhausted
  std::int64_t runs_used = 0;
};

// Grid search over (lr [, lambda for FD] [, sigma_xi for PG]) scored by the
// median final evaluated J across seeds; ties break toward smaller lr.
// budget caps the number of sgd_train runs.
SearchResult hyperparameter_search(const DynamicalSystem& system, const Policy& policy,
                                   const EstimatorConfig& base_config, const TrainOptions& options,
                                   const std::vector<double>& lr_grid,
                                   const std::vector<double>& lambda_grid,
                                   const std::vector<double>& sigma_xi_grid,
                                   const std::vector<std::uint64_t>& seeds, std::int64_t budget,
                                   std::uint64_t eval_seed);

}  // namespace pglab
