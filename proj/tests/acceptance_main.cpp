// Acceptance suite: one pass/fail line per criterion, deterministic report
// files per criterion, and a final determinism pass that re-runs everything
// with a different worker count and compares the report bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pglab/analysis.hpp"
#include "pglab/io.hpp"
#include "pglab/parallel.hpp"
#include "pglab/rng.hpp"
#include "pglab/verify.hpp"
#include "../tests/test_helpers.hpp"

namespace fs = std::filesystem;
using namespace pglab;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // one-line summary for stdout
  std::string report;  // deterministic file content
};

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

std::string fmt(double x) { return fmt_double(x); }

// ---------------------------------------------------------------------------
// 1. Testbed oracle equivalence (Appendices A/B/C closed forms, 1e-10 rel).
Criterion criterion_1(std::uint64_t seed) {
  Criterion c{1, "testbed oracle equivalence"};
  std::ostringstream report;
  double worst = 0.0;
  for (TestbedKind kind : {TestbedKind::MB, TestbedKind::PG, TestbedKind::FD}) {
    const CheckResult r = testbed_oracle_check(
        kind, 1000, derive_seed(seed, {1, static_cast<std::uint64_t>(kind)}));
    report << r.name << " worst_rel " << fmt(r.observed[0]) << " pass " << r.passed << "\n";
    worst = std::max(worst, r.observed[0]);
  }
  c.passed = worst <= 1e-10;
  c.detail = "worst relative error " + fmt(worst) + " (bound 1e-10)";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 2. MB error distribution: std of 1e5 single-sample estimates within 2% of
//    0.675, Gaussian two-sided tail frequencies at 1 and 2 sigma.
Criterion criterion_2(std::uint64_t seed) {
  Criterion c{2, "mb error distribution"};
  const DynamicalSystem sys = linear_testbed(TestbedKind::MB, 1.5, 0.1, 5);
  const Policy policy = Policy::linear_gain(0.0);
  const int n = 100000;
  std::vector<double> errors(n);
  parallel_for(n, [&](std::int64_t i) {
    errors[i] =
        estimate_mb(sys, policy, 1, derive_seed(seed, {2, static_cast<std::uint64_t>(i)})).grad[0];
  });
  const double sigma_true = 0.675;  // sigma_zeta (T-2) beta^(T-3)
  const double std_hat = sample_std(errors);

  bool ok = std::abs(std_hat - sigma_true) <= 0.02 * sigma_true;
  std::ostringstream report;
  report << "std_hat " << fmt(std_hat) << " target " << fmt(sigma_true) << " rel_dev "
         << fmt(std::abs(std_hat - sigma_true) / sigma_true) << "\n";
  for (double t : {1.0, 2.0}) {
    std::int64_t exceed = 0;
    for (double e : errors) {
      if (std::abs(e) >= t * sigma_true) ++exceed;
    }
    const double freq = static_cast<double>(exceed) / n;
    const double target = gaussian_two_sided_tail(t, 1.0);
    const double margin = 4.0 * std::sqrt(target * (1.0 - target) / n);
    report << "tail_" << fmt(t) << "sigma freq " << fmt(freq) << " target " << fmt(target)
           << " margin " << fmt(margin) << "\n";
    if (std::abs(freq - target) > margin) ok = false;
  }
  c.passed = ok;
  c.detail = "std " + fmt(std_hat) + " vs 0.675; Gaussian tails at 1,2 sigma";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 3. Pathwise gradient vs shared-noise central differences on the pendulum.
//    Brackets that straddle a ReLU kink are not valid difference oracles;
//    they reveal themselves by step-size inconsistency and are redrawn.
Criterion criterion_3(std::uint64_t seed) {
  Criterion c{3, "pathwise gradient vs finite differences"};
  const DynamicalSystem sys = pendulum_system(1e-2);
  std::ostringstream report;
  double worst = 0.0;
  int tested = 0, skipped = 0;
  for (int trial = 0; tested < 20 && trial < 60; ++trial) {
    const std::uint64_t pair_seed = derive_seed(seed, {3, static_cast<std::uint64_t>(trial)});
    const Policy policy = Policy::mlp_random(2, 8, 1, pair_seed);
    const NoiseSequence noise = sample_noise(sys, derive_seed(pair_seed, {1}));
    Eigen::VectorXd fd;
    if (!testing::fd_oracle_valid(sys, policy, noise, 1e-5, &fd)) {
      ++skipped;
      continue;
    }
    ++tested;
    const Eigen::VectorXd grad = mb_single(sys, policy, noise);
    const double rel = (grad - fd).norm() / std::max(grad.norm(), fd.norm());
    report << "pair " << trial << " rel " << fmt(rel) << "\n";
    worst = std::max(worst, rel);
  }
  report << "tested " << tested << " kink_skipped " << skipped << " worst " << fmt(worst) << "\n";
  c.passed = tested == 20 && worst <= 1e-4;
  c.detail = "worst relative discrepancy " + fmt(worst) + " over 20 pairs (bound 1e-4)";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 4. PG unbiasedness: mean of 1e6 single-sample estimates within 3 standard
//    errors of beta^(T-2) = 2.0736.
Criterion criterion_4(std::uint64_t seed) {
  Criterion c{4, "pg unbiasedness"};
  const DynamicalSystem sys = linear_testbed(TestbedKind::PG, 1.2, 0.0, 6);
  const Policy policy = Policy::constant(scalar(0.0), 1);
  PgConfig config;
  config.sigma_xi = 1.0;
  config.baseline = BaselineMode::ExactAnalytic;
  const int n = 1000000;
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks, 0.0), sqs(chunks, 0.0);
  parallel_for(chunks, [&](std::int64_t chunk) {
    double sum = 0.0, sq = 0.0;
    const std::int64_t lo = chunk * kChunk, hi = std::min<std::int64_t>(n, lo + kChunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      const double est =
          estimate_pg(sys, policy, 1, config, derive_seed(seed, {4, static_cast<std::uint64_t>(i)}))
              .grad[0];
      sum += est;
      sq += est * est;
    }
    sums[chunk] = sum;
    sqs[chunk] = sq;
  });
  double sum = 0.0, sq = 0.0;
  for (std::int64_t i = 0; i < chunks; ++i) {
    sum += sums[i];
    sq += sqs[i];
  }
  const double mean_hat = sum / n;
  const double var_hat = (sq - n * mean_hat * mean_hat) / (n - 1);
  const double se = std::sqrt(var_hat / n);
  const double truth = std::pow(1.2, 4);
  c.passed = std::abs(mean_hat - truth) <= 3.0 * se;
  std::ostringstream report;
  report << "mean " << fmt(mean_hat) << " truth " << fmt(truth) << " se " << fmt(se)
         << " deviation_in_se " << fmt(std::abs(mean_hat - truth) / se) << "\n";
  c.detail = "mean " + fmt(mean_hat) + " vs 2.0736, |dev| = " +
             fmt(std::abs(mean_hat - truth) / se) + " se";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 5. PG variance floor 2 beta^(2(T-2)), independent of injected state noise.
Criterion criterion_5(std::uint64_t seed) {
  Criterion c{5, "pg variance floor"};
  const double beta = 1.2;
  const int T = 6;
  const double floor_target = 2.0 * std::pow(beta, 2 * (T - 2));
  const Policy policy = Policy::constant(scalar(0.0), 1);
  PgConfig config;
  config.sigma_xi = 1.0;
  config.baseline = BaselineMode::ExactAnalytic;
  const int n = 400000;
  std::ostringstream report;
  bool ok = true;
  int sigma_index = 0;
  for (double sigma : {0.0, 1e-3, 1e-1}) {
    const DynamicalSystem sys = linear_testbed(TestbedKind::PG, beta, sigma, T);
    constexpr std::int64_t kChunk = 4096;
    const std::int64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0), sqs(chunks, 0.0);
    parallel_for(chunks, [&](std::int64_t chunk) {
      double sum = 0.0, sq = 0.0;
      const std::int64_t lo = chunk * kChunk, hi = std::min<std::int64_t>(n, lo + kChunk);
      for (std::int64_t i = lo; i < hi; ++i) {
        const double est =
            estimate_pg(sys, policy, 1, config,
                        derive_seed(seed, {5, static_cast<std::uint64_t>(sigma_index),
                                           static_cast<std::uint64_t>(i)}))
                .grad[0];
        sum += est;
        sq += est * est;
      }
      sums[chunk] = sum;
      sqs[chunk] = sq;
    });
    double sum = 0.0, sq = 0.0;
    for (std::int64_t i = 0; i < chunks; ++i) {
      sum += sums[i];
      sq += sqs[i];
    }
    const double mean_hat = sum / n;
    const double var_hat = (sq - n * mean_hat * mean_hat) / (n - 1);
    const double rel = std::abs(var_hat - floor_target) / floor_target;
    report << "sigma " << fmt(sigma) << " var " << fmt(var_hat) << " target "
           << fmt(floor_target) << " rel_dev " << fmt(rel) << "\n";
    if (rel > 0.05) ok = false;
    ++sigma_index;
  }
  c.passed = ok;
  c.detail = "variance within 5% of " + fmt(floor_target) + " at sigma in {0, 1e-3, 1e-1}";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 6. FD bias law: bias(lambda)/lambda constant and equal to beta^(2(T-2)).
Criterion criterion_6(std::uint64_t seed) {
  Criterion c{6, "fd bias law"};
  const double beta = 1.5;
  const int T = 5;
  const double scale = std::pow(beta, T - 2);
  const double target = std::pow(beta, 2 * (T - 2));
  const DynamicalSystem sys = linear_testbed(TestbedKind::FD, beta, 0.0, T);
  const Policy policy = Policy::constant(scalar(0.0), 2);
  std::ostringstream report;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool ok = true;
  for (double lambda : {1e-3 / scale, 1e-2 / scale, 1e-1 / scale}) {
    FdConfig config;
    config.lambda = lambda;
    const double ratio =
        estimate_fd(sys, policy, 1, config, derive_seed(seed, {6})).grad[0] / lambda;
    report << "lambda " << fmt(lambda) << " bias_over_lambda " << fmt(ratio) << "\n";
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (std::abs(ratio - target) > 1e-10 * target) ok = false;
  }
  if ((hi - lo) > 1e-10 * target) ok = false;
  report << "target " << fmt(target) << " spread " << fmt(hi - lo) << "\n";
  c.passed = ok;
  c.detail = "bias/lambda = " + fmt(lo) + ".." + fmt(hi) + " vs " + fmt(target);
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 7. sigma_zeta scaling on the pendulum: error-std slope 1 +- 0.15 for MB
//    and FD(crn=false, lambda=1e-3); PG floor check.
Criterion criterion_7(std::uint64_t seed) {
  Criterion c{7, "sigma_zeta scaling sweep"};
  // Fixed initialized theta: the criterion measures scaling at one theta.
  const Policy policy = Policy::mlp_random(2, 8, 1, 4242);
  EstimatorConfig mb;
  mb.kind = EstimatorKind::MB;
  EstimatorConfig fd;
  fd.kind = EstimatorKind::FD;
  fd.fd.lambda = 1e-3;
  fd.fd.mode = FdMode::Basis;
  fd.fd.crn = false;
  EstimatorConfig pg;
  pg.kind = EstimatorKind::PG;  // sigma_xi defaults to sigma_zeta
  pg.pg.baseline = BaselineMode::McRollouts;
  pg.pg.baseline_samples = 16;
  const std::vector<double> grid = {1e-4, 1e-3, 1e-2, 1e-1};
  const auto reports = variance_sweep(
      {mb, fd, pg}, [](double sigma) { return pendulum_system(sigma); }, grid, policy, 2000,
      derive_seed(seed, {7}));

  std::ostringstream report;
  const char* names[] = {"mb", "fd", "pg"};
  for (int i = 0; i < 3; ++i) {
    report << names[i] << " agg_std";
    for (const auto& p : reports[i].points) report << " " << fmt(p.agg_std);
    if (reports[i].fit.has_value()) report << " slope " << fmt(reports[i].fit->slope);
    report << "\n";
  }
  const double slope_mb = reports[0].fit->slope;
  const double slope_fd = reports[1].fit->slope;
  const double pg_small = reports[2].points.front().agg_std;
  const double pg_large = reports[2].points.back().agg_std;
  c.passed = std::abs(slope_mb - 1.0) <= 0.15 && std::abs(slope_fd - 1.0) <= 0.15 &&
             pg_small >= 0.5 * pg_large;
  c.detail = "slopes mb " + fmt(slope_mb) + ", fd " + fmt(slope_fd) + "; pg floor ratio " +
             fmt(pg_small / pg_large);
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 8. Concentration-lemma Monte-Carlo suite.
Criterion criterion_8(std::uint64_t seed) {
  Criterion c{8, "concentration lemma suite"};
  std::vector<CheckResult> results;
  results.push_back(gaussian_tail_check(1.0, {0.0, 0.5, 1.0, 2.0}, 1000000, derive_seed(seed, {8, 1})));
  results.push_back(chisq_tail_check(2, {0.5, 1.0}, 1000000, derive_seed(seed, {8, 2})));
  results.push_back(chisq_tail_check(10, {0.5, 1.0}, 1000000, derive_seed(seed, {8, 3})));
  results.push_back(score_identity_check(NoiseFamily::Gaussian, 1000000, derive_seed(seed, {8, 4})));
  results.push_back(score_identity_check(NoiseFamily::Laplace, 1000000, derive_seed(seed, {8, 5})));
  results.push_back(score_identity_check(NoiseFamily::Logistic, 1000000, derive_seed(seed, {8, 6})));
  std::ostringstream report;
  bool ok = true;
  int passed_count = 0;
  for (const CheckResult& r : results) {
    report << r.name << " pass " << r.passed;
    for (double o : r.observed) report << " " << fmt(o);
    report << "\n";
    ok = ok && r.passed;
    passed_count += r.passed ? 1 : 0;
  }
  c.passed = ok;
  c.detail = std::to_string(passed_count) + "/" + std::to_string(results.size()) + " checks passed";
  c.report = report.str();
  return c;
}

// ---------------------------------------------------------------------------
// 9. Empirical sample-complexity calibration against the Gaussian oracle.
Criterion criterion_9(std::uint64_t seed) {
  Criterion c{9, "sample complexity calibration"};
  EstimatorConfig config;
  config.kind = EstimatorKind::MB;
  const DynamicalSystem sys = linear_testbed(TestbedKind::MB, 1.5, 0.1, 5);
  const double epsilon = 0.2, delta = 0.1;
  const SweepReport report = empirical_sample_complexity(
      config, sys, Policy::linear_gain(0.0), epsilon, delta, {1, 2, 3, 5, 8, 12, 18, 27, 41, 62, 93},
      2000, derive_seed(seed, {9}));
  const double sigma_mb = 0.675;
  const double z = normal_quantile(1.0 - delta / 2.0);
  const double analytic = std::pow(sigma_mb * z / epsilon, 2);
  std::ostringstream text;
  for (const auto& p : report.points) {
    text << "n " << fmt(p.axis_value) << " exceed " << fmt(p.exceed_fraction) << " wilson_hi "
         << fmt(p.wilson_hi) << "\n";
  }
  text << "threshold " << report.threshold_n << " analytic " << fmt(analytic) << "\n";
  const double ratio =
      report.threshold_reached
          ? std::max(report.threshold_n / analytic, analytic / report.threshold_n)
          : std::numeric_limits<double>::infinity();
  c.passed = report.threshold_reached && ratio <= 1.5;
  c.detail = "empirical n = " + std::to_string(report.threshold_n) + ", analytic n* = " +
             fmt(analytic) + ", ratio " + fmt(ratio) + " (grid step 1.5)";
  c.report = text.str();
  return c;
}

// ---------------------------------------------------------------------------
// 10. Training property check: pendulum, width-8 MLP initialized to
//     J >= -100, tuned learning rates, matched rollout budgets of 500.
namespace training {

double evaluate(const DynamicalSystem& sys, const Policy& policy,
                const std::vector<NoiseSequence>& batch) {
  double acc = 0.0;
  for (const NoiseSequence& noise : batch) {
    acc += rollout_from(sys, policy, 0, sys.initial_state, noise);
  }
  return acc / static_cast<double>(batch.size());
}

Policy pretrain_to_threshold(const DynamicalSystem& sys, Policy policy, std::uint64_t seed,
                             double* j_out) {
  std::vector<NoiseSequence> batch;
  for (int b = 0; b < 32; ++b) {
    batch.push_back(sample_noise(sys, derive_seed(seed, {1, static_cast<std::uint64_t>(b)})));
  }
  double j = evaluate(sys, policy, batch);
  for (int s = 0; s < 4000 && j < -100.0; ++s) {
    const GradientEstimate est =
        estimate_mb(sys, policy, 1, derive_seed(seed, {2, static_cast<std::uint64_t>(s)}));
    policy = policy.perturbed(3e-6 * est.grad);
    if (s % 25 == 24) j = evaluate(sys, policy, batch);
  }
  *j_out = evaluate(sys, policy, batch);
  return policy;
}

}  // namespace training

Criterion criterion_10(std::uint64_t seed) {
  Criterion c{10, "training property check"};
  const DynamicalSystem sys = pendulum_system(1e-4);
  const int n_seeds = 10;

  std::vector<Policy> inits;
  std::vector<double> init_j(n_seeds);
  std::ostringstream report;
  bool all_initialized = true;
  for (int i = 0; i < n_seeds; ++i) {
    const std::uint64_t s = derive_seed(seed, {10, 1, static_cast<std::uint64_t>(i)});
    double j = 0.0;
    inits.push_back(training::pretrain_to_threshold(sys, Policy::mlp_random(2, 8, 1, s), s, &j));
    init_j[i] = j;
    if (!(j >= -100.0)) all_initialized = false;
    report << "init_j seed" << i << " " << fmt(j) << "\n";
  }

  struct Arm {
    std::string name;
    EstimatorConfig config;
    int steps;  // 500-rollout budget per run
    std::vector<double> lr_grid;
  };
  std::vector<Arm> arms;
  {
    Arm mb{"mb", {}, 500, {1e-6, 3e-6, 1e-5, 3e-5}};
    mb.config.kind = EstimatorKind::MB;
    arms.push_back(mb);
    Arm fd{"fd", {}, 250, {1e-6, 3e-6, 1e-5, 3e-5}};
    fd.config.kind = EstimatorKind::FD;
    fd.config.fd.mode = FdMode::Sphere;
    fd.config.fd.lambda = 1e-3;
    arms.push_back(fd);
    Arm pg{"pg", {}, 500, {1e-8, 1e-7, 1e-6, 1e-5}};
    pg.config.kind = EstimatorKind::PG;
    pg.config.pg.baseline = BaselineMode::None;
    pg.config.pg.sigma_xi = 0.1;
    arms.push_back(pg);
  }

  std::vector<double> medians;
  double median_init_mb = 0.0, median_final_mb = 0.0;
  for (const Arm& arm : arms) {
    TrainOptions options;
    options.steps = arm.steps;
    options.eval_every = arm.steps;
    options.eval_batch = 32;

    // Tune the learning rate on the first three initializations.
    double best_lr = arm.lr_grid.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (double lr : arm.lr_grid) {
      TrainOptions tune = options;
      tune.learning_rate = lr;
      std::vector<double> finals(3);
      parallel_for(3, [&](std::int64_t i) {
        const LearningCurve curve =
            sgd_train(sys, inits[i], arm.config, tune,
                      derive_seed(seed, {10, 2, static_cast<std::uint64_t>(i)}),
                      derive_seed(seed, {10, 3, static_cast<std::uint64_t>(i)}));
        finals[i] = curve.final_j;
      });
      const double score = quantile(finals, 0.5);
      report << arm.name << " tune lr " << fmt(lr) << " median_final " << fmt(score) << "\n";
      if (score > best_score) {
        best_score = score;
        best_lr = lr;
      }
    }

    TrainOptions final_options = options;
    final_options.learning_rate = best_lr;
    std::vector<double> finals(n_seeds);
    std::vector<int> discarded_flags(n_seeds, 0);
    std::vector<std::int64_t> rollout_counts(n_seeds, 0);
    parallel_for(n_seeds, [&](std::int64_t i) {
      const LearningCurve curve =
          sgd_train(sys, inits[i], arm.config, final_options,
                    derive_seed(seed, {10, 4, static_cast<std::uint64_t>(i)}),
                    derive_seed(seed, {10, 5, static_cast<std::uint64_t>(i)}));
      finals[i] = curve.final_j;
      discarded_flags[i] = curve.converged ? 0 : 1;
      rollout_counts[i] = curve.total_rollouts;
    });
    int discarded = 0;
    for (int flag : discarded_flags) discarded += flag;
    const double median_final = quantile(finals, 0.5);
    medians.push_back(median_final);
    report << arm.name << " best_lr " << fmt(best_lr) << " median_final " << fmt(median_final)
           << " discarded " << discarded << " rollouts_per_run " << rollout_counts[0] << "\n";
    if (arm.name == "mb") {
      median_init_mb = quantile(init_j, 0.5);
      median_final_mb = median_final;
    }
  }

  const bool improved = median_final_mb > median_init_mb;
  const bool ordered = medians[0] >= medians[1] && medians[1] >= medians[2];
  report << "median_init_mb " << fmt(median_init_mb) << " all_initialized " << all_initialized
         << "\n";
  c.passed = all_initialized && improved && ordered;
  c.detail = "median J: init " + fmt(median_init_mb) + " -> mb " + fmt(medians[0]) + ", fd " +
             fmt(medians[1]) + ", pg " + fmt(medians[2]);
  c.report = report.str();
  return c;
}

std::vector<Criterion> run_criteria(std::uint64_t seed, int workers, const fs::path& out_dir,
                                    bool verbose) {
  set_worker_count(workers);
  fs::create_directories(out_dir);
  std::vector<Criterion> results;
  using Runner = Criterion (*)(std::uint64_t);
  const Runner runners[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  for (Runner runner : runners) {
    const auto start = Clock::now();
    Criterion c = runner(seed);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    char name[32];
    std::snprintf(name, sizeof(name), "criterion_%02d.txt", c.id);
    std::ofstream out(out_dir / name);
    out << c.report;
    if (verbose) {
      std::printf("criterion %2d [%s] %s — %s (%.1f s)\n", c.id, c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.detail.c_str(), secs);
      std::fflush(stdout);
    }
    results.push_back(std::move(c));
  }
  return results;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20250810;
  fs::path out_dir = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
    } else if (arg == "--out" && i + 1 < argc) {
      out_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--seed U64] [--out DIR]\n");
      return 2;
    }
  }

  std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(seed));
  const std::vector<Criterion> first = run_criteria(seed, 1, out_dir / "workers1", true);

  // 11. Determinism: identical report bytes for a different worker count.
  std::printf("re-running criteria 1-10 with 2 workers for the determinism check...\n");
  std::fflush(stdout);
  const std::vector<Criterion> second = run_criteria(seed, 2, out_dir / "workers2", false);
  bool identical = true;
  std::string mismatch;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].report != second[i].report) {
      identical = false;
      mismatch += " " + std::to_string(first[i].id);
    }
  }
  {
    std::ofstream out(out_dir / "criterion_11.txt");
    out << "reports_identical " << identical << "\n";
  }
  std::printf("criterion 11 [%s] determinism — reports byte-identical across worker counts%s\n",
              identical ? "PASS" : "FAIL", identical ? "" : (":" + mismatch).c_str());

  bool all = identical;
  for (const Criterion& c : first) all = all && c.passed;
  for (const Criterion& c : second) all = all && c.passed;
  std::printf("acceptance: %s\n", all ? "ALL CRITERIA PASSED" : "FAILURES PRESENT");
  return all ? 0 : 1;
}
