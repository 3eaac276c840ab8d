#include "pglab/verify.hpp"

#include <algorithm>
#include <cmath>

#include "pglab/estimators.hpp"
#include "pglab/rng.hpp"
#include "pglab/stats.hpp"

namespace pglab {

double analytic_gradient_linear(TestbedKind kind, double beta, int T, double theta,
                                double noise_or_xi) {
  if (T < 4) throw std::invalid_argument("analytic_gradient_linear: T must be >= 4");
  switch (kind) {
    case TestbedKind::MB:
      return (T - 2) * std::pow(beta + theta, T - 3) * noise_or_xi;
    case TestbedKind::PG:
      return std::pow(beta, T - 2) * noise_or_xi * noise_or_xi;
    case TestbedKind::FD:
      return std::pow(beta, T - 2) * noise_or_xi + fd_phi(std::pow(beta, T - 2) * theta);
  }
  throw std::invalid_argument("analytic_gradient_linear: unknown kind");
}

CheckResult testbed_oracle_check(TestbedKind kind, int draws, std::uint64_t seed) {
  CheckResult result;
  result.name = std::string("testbed_oracle_") + (kind == TestbedKind::MB   ? "mb"
                                                  : kind == TestbedKind::PG ? "pg"
                                                                            : "fd");
  result.seed = seed;
  result.samples_used = draws;
  RandomStream stream(derive_seed(seed, {seed_tag::kCheck}));

  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double beta = 1.1 + 0.9 * stream.uniform();
    const int T = 4 + static_cast<int>(stream.uniform() * 5.0);  // 4..8
    double simulated = 0.0, analytic = 0.0;
    switch (kind) {
      case TestbedKind::MB: {
        const double theta = -0.5 + stream.uniform();
        const double zeta = (stream.uniform() < 0.5 ? -1.0 : 1.0) * (0.1 + 1.9 * stream.uniform());
        const DynamicalSystem sys = linear_testbed(TestbedKind::MB, beta, 1.0, T);
        NoiseSequence noise;
        noise.zetas.assign(T, Eigen::VectorXd::Zero(1));
        noise.zetas[0][0] = zeta;
        simulated = mb_single(sys, Policy::linear_gain(theta), noise)[0];
        analytic = analytic_gradient_linear(kind, beta, T, theta, zeta);
        break;
      }
      case TestbedKind::PG: {
        const double theta = -0.5 + stream.uniform();
        const double xi = (stream.uniform() < 0.5 ? -1.0 : 1.0) * (0.1 + 1.9 * stream.uniform());
        const DynamicalSystem sys = linear_testbed(TestbedKind::PG, beta, 0.0, T);
        NoiseSequence noise;
        noise.zetas.assign(T, Eigen::VectorXd::Zero(1));
        noise.xis.assign(T, Eigen::VectorXd::Zero(1));
        noise.xis[0][0] = xi;
        for (int t = 1; t < T; ++t) noise.xis[t][0] = stream.normal();
        simulated = pg_single(sys, Policy::constant(Eigen::VectorXd::Constant(1, theta), 1), noise,
                              1.0, BaselineMode::ExactAnalytic, 0, 0, nullptr)[0];
        analytic = analytic_gradient_linear(kind, beta, T, theta, xi);
        break;
      }
      case TestbedKind::FD: {
        // Positive draws keep the two terms of J_hat from cancelling, so a
        // relative comparison stays meaningful.
        const double zeta = 0.1 + 1.9 * stream.uniform();
        const double theta = (0.05 + 0.85 * stream.uniform()) / std::pow(beta, T - 2);
        const DynamicalSystem sys = linear_testbed(TestbedKind::FD, beta, 1.0, T);
        NoiseSequence noise;
        noise.zetas.assign(T, Eigen::VectorXd::Zero(2));
        noise.zetas[0][0] = zeta;
        const Rollout traj =
            rollout(sys, Policy::constant(Eigen::VectorXd::Constant(1, theta), 2), noise);
        simulated = traj.j_hat;
        analytic = analytic_gradient_linear(kind, beta, T, theta, zeta);
        break;
      }
    }
    const double rel = std::abs(simulated - analytic) / std::max(1e-300, std::abs(analytic));
    worst = std::max(worst, rel);
  }
  result.observed = {worst};
  result.bound_or_target = {1e-10};
  result.passed = worst <= 1e-10;
  return result;
}

CheckResult fd_remainder_check(const DynamicalSystem& system, const Policy& policy,
                               const std::vector<double>& lambdas, std::uint64_t seed) {
  CheckResult result;
  result.name = "fd_remainder_" + system.name;
  result.seed = seed;
  if (lambdas.empty()) throw std::invalid_argument("fd_remainder_check: empty lambda list");

  // One fixed noise realization shared by every evaluation.
  const NoiseSequence noise = sample_noise(system, derive_seed(seed, {seed_tag::kCheck}));
  const Eigen::VectorXd pathwise = mb_single(system, policy, noise);
  const int d = policy.param_dim();

  std::vector<double> errors;
  for (double lambda : lambdas) {
    if (lambda <= 0.0) throw std::invalid_argument("fd_remainder_check: lambda <= 0");
    Eigen::VectorXd fd(d);
    for (int k = 0; k < d; ++k) {
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(d);
      delta[k] = lambda;
      const double jp = rollout(system, policy.perturbed(delta), noise).j_hat;
      const double jm = rollout(system, policy.perturbed(-delta), noise).j_hat;
      fd[k] = (jp - jm) / (2.0 * lambda);
    }
    errors.push_back((fd - pathwise).norm());
    result.samples_used += 2 * d;
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    num += errors[i] * lambdas[i];
    den += lambdas[i] * lambdas[i];
  }
  const double c = num / den;
  const double atol = 1e-9 * (1.0 + pathwise.norm());
  result.passed = true;
  result.observed = errors;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double envelope = std::max(2.0 * c * lambdas[i], atol);
    result.bound_or_target.push_back(envelope);
    if (errors[i] > envelope) result.passed = false;
  }
  // Fitted slope goes last so callers can report it.
  result.bound_or_target.push_back(c);
  return result;
}

namespace {

double sample_noise_family(NoiseFamily family, RandomStream& stream) {
  switch (family) {
    case NoiseFamily::Gaussian:
      return stream.normal();
    case NoiseFamily::Laplace: {
      double v = stream.uniform();
      while (v == 0.0 || v == 0.5) v = stream.uniform();
      return v < 0.5 ? std::log(2.0 * v) : -std::log(2.0 * (1.0 - v));
    }
    case NoiseFamily::Logistic: {
      double v = stream.uniform();
      while (v == 0.0) v = stream.uniform();
      return std::log(v / (1.0 - v));
    }
  }
  throw std::invalid_argument("unsupported noise family");
}

double score_times_x(NoiseFamily family, double x) {
  switch (family) {
    case NoiseFamily::Gaussian:
      return -x * x;
    case NoiseFamily::Laplace:
      return -std::abs(x);
    case NoiseFamily::Logistic:
      return -x * std::tanh(0.5 * x);
  }
  throw std::invalid_argument("unsupported noise family");
}

}  // namespace

CheckResult score_identity_check(NoiseFamily family, std::int64_t n, std::uint64_t seed) {
  if (n < 10000) throw std::invalid_argument("score_identity_check: need n >= 10^4");
  CheckResult result;
  result.name = "score_identity_" + noise_family_name(family);
  result.seed = seed;
  result.samples_used = n;

  RandomStream stream(derive_seed(seed, {seed_tag::kCheck}));
  double sum = 0.0, sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double g = score_times_x(family, sample_noise_family(family, stream));
    sum += g;
    sq += g * g;
  }
  const double m = sum / static_cast<double>(n);
  const double var = (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  const double margin = 4.0 * std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  result.observed = {m};
  result.bound_or_target = {-1.0, margin};
  result.passed = std::abs(m + 1.0) <= margin;
  return result;
}

CheckResult gaussian_tail_check(double sigma, const std::vector<double>& t_values, std::int64_t n,
                                std::uint64_t seed) {
  if (n < 100000) throw std::invalid_argument("gaussian_tail_check: need n >= 10^5");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_tail_check: sigma must be positive");
  CheckResult result;
  result.name = "gaussian_tail";
  result.seed = seed;
  result.samples_used = n;

  RandomStream stream(derive_seed(seed, {seed_tag::kCheck}));
  std::vector<double> absolutes(n);
  for (std::int64_t i = 0; i < n; ++i) absolutes[i] = std::abs(sigma * stream.normal());
  std::sort(absolutes.begin(), absolutes.end());

  result.passed = true;
  for (double t : t_values) {
    const auto it = std::lower_bound(absolutes.begin(), absolutes.end(), t);
    const double empirical =
        static_cast<double>(absolutes.end() - it) / static_cast<double>(n);
    const double bound = std::sqrt(std::exp(1.0) / (2.0 * M_PI)) * std::exp(-t * t / (sigma * sigma));
    const double exact = gaussian_two_sided_tail(t, sigma);
    const double margin = 4.0 * std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    result.observed.push_back(empirical);
    result.bound_or_target.push_back(bound);
    const bool tail_ok = empirical >= bound - margin;
    const bool oracle_ok = std::abs(empirical - exact) <= std::max(margin, 1e-12);
    const bool bound_below_exact = bound <= exact + 1e-15;
    if (!(tail_ok && oracle_ok && bound_below_exact)) result.passed = false;
  }
  return result;
}

CheckResult chisq_tail_check(int n_dof, const std::vector<double>& eps_values, std::int64_t trials,
                             std::uint64_t seed) {
  if (n_dof < 2 || n_dof % 2 != 0) {
    throw std::invalid_argument("chisq_tail_check: n_dof must be a positive even integer");
  }
  if (trials < 100000) throw std::invalid_argument("chisq_tail_check: need trials >= 10^5");
  CheckResult result;
  result.name = "chisq_tail_dof" + std::to_string(n_dof);
  result.seed = seed;
  result.samples_used = trials;

  RandomStream stream(derive_seed(seed, {seed_tag::kCheck}));
  std::vector<double> means(trials);
  for (std::int64_t i = 0; i < trials; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n_dof; ++k) {
      const double z = stream.normal();
      acc += z * z;
    }
    means[i] = acc / static_cast<double>(n_dof);
  }
  std::sort(means.begin(), means.end());

  result.passed = true;
  for (double eps : eps_values) {
    const auto it = std::lower_bound(means.begin(), means.end(), 1.0 + eps);
    const double empirical = static_cast<double>(means.end() - it) / static_cast<double>(trials);
    const double bound = std::exp(-0.5 * n_dof * eps) /
                         (std::exp(2.0) * std::sqrt(2.0 * static_cast<double>(n_dof)));
    const double margin =
        4.0 * std::sqrt(std::max(empirical * (1.0 - empirical), 1.0 / trials) /
                        static_cast<double>(trials));
    result.observed.push_back(empirical);
    result.bound_or_target.push_back(bound);
    if (empirical < bound - margin) result.passed = false;
  }
  return result;
}

double subgaussian_fit(const std::vector<double>& samples) {
  if (samples.size() < 10000) throw std::invalid_argument("subgaussian_fit: need >= 10^4 samples");
  double base = sample_std(samples);
  if (base <= 0.0) base = 1e-12;
  const double test_scales[] = {0.5, -0.5, 1.0, -1.0, 2.0, -2.0};

  double mgf[6];
  double ts[6];
  for (int j = 0; j < 6; ++j) {
    ts[j] = test_scales[j] / base;
    double acc = 0.0;
    for (double x : samples) acc += std::exp(ts[j] * x);
    mgf[j] = acc / static_cast<double>(samples.size());
  }

  // 81-point log grid spanning one decade on each side of the sample std.
  const int grid_points = 81;
  for (int g = 0; g < grid_points; ++g) {
    const double sigma = base * std::pow(10.0, -1.0 + 2.0 * g / (grid_points - 1));
    bool ok = true;
    for (int j = 0; j < 6; ++j) {
      if (mgf[j] > std::exp(0.5 * sigma * sigma * ts[j] * ts[j])) {
        ok = false;
        break;
      }
    }
    if (ok) return sigma;
  }
  return base * 10.0;
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  results.push_back(testbed_oracle_check(TestbedKind::MB, 1000, derive_seed(seed, {1})));
  results.push_back(testbed_oracle_check(TestbedKind::PG, 1000, derive_seed(seed, {2})));
  results.push_back(testbed_oracle_check(TestbedKind::FD, 1000, derive_seed(seed, {3})));
  {
    const DynamicalSystem sys = linear_testbed(TestbedKind::FD, 1.5, 0.0, 5);
    const Policy policy = Policy::constant(Eigen::VectorXd::Zero(1), 2);
    const double scale = std::pow(1.5, 3);
    results.push_back(
        fd_remainder_check(sys, policy, {1e-3 / scale, 1e-2 / scale, 1e-1 / scale},
                           derive_seed(seed, {4})));
  }
  {
    const DynamicalSystem sys = pendulum_system(0.0);
    const Policy policy = Policy::mlp_random(2, 8, 1, derive_seed(seed, {5}));
    results.push_back(fd_remainder_check(sys, policy, {4e-4, 2e-4, 1e-4}, derive_seed(seed, {6})));
  }
  results.push_back(score_identity_check(NoiseFamily::Gaussian, 1000000, derive_seed(seed, {7})));
  results.push_back(score_identity_check(NoiseFamily::Laplace, 1000000, derive_seed(seed, {8})));
  results.push_back(score_identity_check(NoiseFamily::Logistic, 1000000, derive_seed(seed, {9})));
  results.push_back(
      gaussian_tail_check(1.0, {0.0, 0.5, 1.0, 2.0}, 1000000, derive_seed(seed, {10})));
  results.push_back(chisq_tail_check(2, {0.5, 1.0}, 1000000, derive_seed(seed, {11})));
  results.push_back(chisq_tail_check(10, {0.5, 1.0}, 1000000, derive_seed(seed, {12})));
  {
    RandomStream stream(derive_seed(seed, {13}));
    std::vector<double> samples(100000);
    for (double& x : samples) x = stream.normal();
    const double fitted = subgaussian_fit(samples);
    CheckResult r;
    r.name = "subgaussian_fit_gaussian";
    r.seed = seed;
    r.samples_used = static_cast<std::int64_t>(samples.size());
    r.observed = {fitted};
    r.bound_or_target = {0.9, 1.1};
    r.passed = fitted >= 0.9 && fitted <= 1.1;
    results.push_back(r);
  }
  return results;
}

std::string noise_family_name(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian:
      return "gaussian";
    case NoiseFamily::Laplace:
      return "laplace";
    case NoiseFamily::Logistic:
      return "logistic";
  }
  return "unknown";
}

}  // namespace pglab
