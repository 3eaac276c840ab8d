#include "pglab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pglab/analysis.hpp"
#include "pglab/io.hpp"
#include "pglab/parallel.hpp"
#include "pglab/rng.hpp"

namespace pglab {

namespace {

namespace fs = std::filesystem;

struct RunContext {
  Config config;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  std::ofstream open_output(const std::string& name) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) throw std::runtime_error("cannot open output file: " + name);
    outputs.push_back(name);
    return out;
  }

  void finish(const std::string& command) {
    fs::create_directories(out_dir);
    config.set_uint("seed", seed);
    config.write_file((fs::path(out_dir) / "config.txt").string());
    nlohmann::json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["seed"] = seed;
    manifest["workers"] = worker_count();
    outputs.push_back("config.txt");
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
};

DynamicalSystem system_from_config(Config& config) {
  const std::string name = config.required_str("system.name");
  if (name == "pendulum") {
    return pendulum_system(config.get_double("system.sigma_zeta", 0.0));
  }
  const double beta = config.get_double("system.beta", 1.5);
  const double sigma = config.get_double("system.sigma_zeta", 0.0);
  const int T = static_cast<int>(config.get_int("system.horizon", 5));
  if (name == "mb_testbed") return linear_testbed(TestbedKind::MB, beta, sigma, T);
  if (name == "pg_testbed") return linear_testbed(TestbedKind::PG, beta, sigma, T);
  if (name == "fd_testbed") return linear_testbed(TestbedKind::FD, beta, sigma, T);
  throw ConfigError("unknown system.name '" + name + "' (expected pendulum, mb_testbed, pg_testbed or fd_testbed)");
}

Eigen::VectorXd parse_theta(Config& config, const std::string& fallback) {
  const std::vector<double> values = config.get_double_list("policy.theta", fallback);
  Eigen::VectorXd theta(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) theta[i] = values[i];
  return theta;
}

Policy policy_from_config(Config& config, const DynamicalSystem& system, std::uint64_t seed) {
  if (config.has("policy.checkpoint")) {
    return Policy::load_file(config.required_str("policy.checkpoint"));
  }
  std::string fallback_family = "mlp";
  if (system.testbed.has_value()) {
    fallback_family = system.testbed->kind == TestbedKind::MB ? "linear_gain" : "constant";
  }
  const std::string family = config.get_str("policy.family", fallback_family);
  if (family == "linear_gain") {
    return Policy::linear_gain(parse_theta(config, "0")[0]);
  }
  if (family == "constant") {
    return Policy::constant(parse_theta(config, "0"), system.state_dim);
  }
  if (family == "mlp") {
    const int hidden = static_cast<int>(config.get_int("policy.hidden", 100));
    const std::uint64_t init_seed = config.get_uint("policy.init_seed", mix64(seed));
    return Policy::mlp_random(system.state_dim, hidden, system.action_dim, init_seed);
  }
  throw ConfigError("unknown policy.family '" + family + "'");
}

EstimatorConfig estimator_from_config(Config& config, const std::string& kind_override = "") {
  EstimatorConfig out;
  const std::string kind =
      kind_override.empty() ? config.get_str("estimator.kind", "mb") : kind_override;
  if (kind == "mb") {
    out.kind = EstimatorKind::MB;
  } else if (kind == "pg") {
    out.kind = EstimatorKind::PG;
  } else if (kind == "fd") {
    out.kind = EstimatorKind::FD;
  } else {
    throw ConfigError("unknown estimator kind '" + kind + "'");
  }
  out.pg.sigma_xi = config.get_double("estimator.sigma_xi", 0.0);
  const std::string baseline = config.get_str("estimator.baseline", "mc");
  if (baseline == "none") {
    out.pg.baseline = BaselineMode::None;
  } else if (baseline == "exact") {
    out.pg.baseline = BaselineMode::ExactAnalytic;
  } else if (baseline == "mc") {
    out.pg.baseline = BaselineMode::McRollouts;
  } else {
    throw ConfigError("unknown estimator.baseline '" + baseline + "'");
  }
  out.pg.baseline_samples = static_cast<int>(config.get_int("estimator.baseline_samples", 16));
  out.fd.lambda = config.get_double("estimator.lambda", 1e-3);
  const std::string mode = config.get_str("estimator.mode", "basis");
  if (mode == "basis") {
    out.fd.mode = FdMode::Basis;
  } else if (mode == "sphere") {
    out.fd.mode = FdMode::Sphere;
  } else {
    throw ConfigError("unknown estimator.mode '" + mode + "'");
  }
  out.fd.crn = config.get_bool("estimator.crn", false);
  return out;
}

int cmd_rollout(RunContext& ctx) {
  const DynamicalSystem system = system_from_config(ctx.config);
  const Policy policy = policy_from_config(ctx.config, system, ctx.seed);
  const NoiseSequence noise = sample_noise(system, ctx.seed);
  const Rollout traj = rollout(system, policy, noise);
  {
    auto out = ctx.open_output("rollout.csv");
    write_rollout_csv(out, traj);
  }
  {
    auto out = ctx.open_output("summary.json");
    nlohmann::json j;
    j["j_hat"] = traj.j_hat;
    j["horizon"] = system.horizon;
    j["system"] = system.name;
    out << j.dump(2) << '\n';
  }
  ctx.finish("rollout");
  return 0;
}

int cmd_estimate(RunContext& ctx) {
  const DynamicalSystem system = system_from_config(ctx.config);
  const Policy policy = policy_from_config(ctx.config, system, ctx.seed);
  const EstimatorConfig config = estimator_from_config(ctx.config);
  const int n = static_cast<int>(ctx.config.get_int("estimator.n", 1));
  const GradientEstimate est = estimate(system, policy, config, n, ctx.seed);
  {
    auto out = ctx.open_output("estimate.json");
    out << estimate_to_json(est).dump(2) << '\n';
  }
  ctx.finish("estimate");
  return 0;
}

int cmd_sweep(RunContext& ctx) {
  Config& config = ctx.config;
  const std::string name = config.required_str("system.name");
  const std::vector<double> grid = config.get_double_list("sweep.sigma_grid", "1e-4,1e-3,1e-2,1e-1");
  const std::int64_t repeats = config.get_int("sweep.repeats", 200);
  const double beta = config.get_double("system.beta", 1.5);
  const int T = static_cast<int>(config.get_int("system.horizon", 5));

  std::function<DynamicalSystem(double)> family;
  if (name == "pendulum") {
    family = [](double sigma) { return pendulum_system(sigma); };
  } else if (name == "mb_testbed") {
    family = [=](double sigma) { return linear_testbed(TestbedKind::MB, beta, sigma, T); };
  } else if (name == "pg_testbed") {
    family = [=](double sigma) { return linear_testbed(TestbedKind::PG, beta, sigma, T); };
  } else if (name == "fd_testbed") {
    family = [=](double sigma) { return linear_testbed(TestbedKind::FD, beta, sigma, T); };
  } else {
    throw ConfigError("unknown system.name '" + name + "'");
  }
  const DynamicalSystem probe = family(grid.front());
  const Policy policy = policy_from_config(config, probe, ctx.seed);

  std::vector<EstimatorConfig> configs;
  std::vector<std::string> kinds;
  for (const std::string& kind : {"mb", "pg", "fd"}) {
    const std::string requested = config.get_str("sweep.estimators", "mb,fd,pg");
    if (requested.find(kind) != std::string::npos) {
      configs.push_back(estimator_from_config(config, kind));
      kinds.push_back(kind);
    }
  }
  const std::vector<SweepReport> reports =
      variance_sweep(configs, family, grid, policy, repeats, ctx.seed);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    {
      auto out = ctx.open_output("sweep_" + kinds[i] + ".csv");
      write_sweep_csv(out, reports[i]);
    }
    auto out = ctx.open_output("sweep_" + kinds[i] + ".json");
    out << sweep_to_json(reports[i]).dump(2) << '\n';
  }
  ctx.finish("sweep");
  return 0;
}

int cmd_complexity(RunContext& ctx) {
  const DynamicalSystem system = system_from_config(ctx.config);
  const Policy policy = policy_from_config(ctx.config, system, ctx.seed);
  const EstimatorConfig config = estimator_from_config(ctx.config);
  const double epsilon = ctx.config.get_double("complexity.epsilon", 0.2);
  const double delta = ctx.config.get_double("complexity.delta", 0.1);
  const std::vector<std::int64_t> n_grid =
      ctx.config.get_int_list("complexity.n_grid", "1,2,3,5,8,12,18,27,41,62,93");
  const std::int64_t repeats = ctx.config.get_int("complexity.repeats", 1000);
  const SweepReport report =
      empirical_sample_complexity(config, system, policy, epsilon, delta, n_grid, repeats, ctx.seed);
  {
    auto out = ctx.open_output("complexity.csv");
    write_complexity_csv(out, report);
  }
  {
    auto out = ctx.open_output("errors.csv");
    write_sweep_csv(out, report);
  }
  {
    auto out = ctx.open_output("complexity.json");
    out << sweep_to_json(report).dump(2) << '\n';
  }
  ctx.finish("complexity");
  return 0;
}

int cmd_train(RunContext& ctx) {
  const DynamicalSystem system = system_from_config(ctx.config);
  const Policy policy = policy_from_config(ctx.config, system, ctx.seed);
  const EstimatorConfig config = estimator_from_config(ctx.config);
  TrainOptions options;
  options.steps = static_cast<int>(ctx.config.get_int("train.steps", 1000));
  options.learning_rate = ctx.config.get_double("train.learning_rate", 1e-3);
  options.eval_every = static_cast<int>(ctx.config.get_int("train.eval_every", 10));
  options.eval_batch = static_cast<int>(ctx.config.get_int("train.eval_batch", 64));
  const std::uint64_t train_seed = derive_seed(ctx.seed, {1});
  const std::uint64_t eval_seed = derive_seed(ctx.seed, {2});
  const LearningCurve curve = sgd_train(system, policy, config, options, eval_seed, train_seed);
  {
    auto out = ctx.open_output("curve.csv");
    write_curve_csv(out, curve);
  }
  {
    auto out = ctx.open_output("curve.json");
    out << curve_to_json(curve).dump(2) << '\n';
  }
  ctx.finish("train");
  return 0;
}

int cmd_search(RunContext& ctx) {
  const DynamicalSystem system = system_from_config(ctx.config);
  const Policy policy = policy_from_config(ctx.config, system, ctx.seed);
  const EstimatorConfig config = estimator_from_config(ctx.config);
  TrainOptions options;
  options.steps = static_cast<int>(ctx.config.get_int("train.steps", 200));
  options.eval_every = static_cast<int>(ctx.config.get_int("train.eval_every", 50));
  options.eval_batch = static_cast<int>(ctx.config.get_int("train.eval_batch", 64));
  const std::vector<double> lr_grid = ctx.config.get_double_list("search.lr_grid", "1e-4,1e-3,1e-2");
  const std::vector<double> lambda_grid = ctx.config.get_double_list("search.lambda_grid", "");
  const std::vector<double> sigma_xi_grid = ctx.config.get_double_list("search.sigma_xi_grid", "");
  const std::int64_t n_seeds = ctx.config.get_int("search.seeds", 3);
  const std::int64_t budget = ctx.config.get_int("search.budget", 1000000);
  std::vector<std::uint64_t> seeds;
  for (std::int64_t i = 0; i < n_seeds; ++i) seeds.push_back(derive_seed(ctx.seed, {3, static_cast<std::uint64_t>(i)}));
  const SearchResult result =
      hyperparameter_search(system, policy, config, options, lr_grid, lambda_grid, sigma_xi_grid,
                            seeds, budget, derive_seed(ctx.seed, {4}));
  {
    auto out = ctx.open_output("search.csv");
    write_search_csv(out, result);
  }
  {
    auto out = ctx.open_output("search.json");
    out << search_to_json(result).dump(2) << '\n';
  }
  ctx.finish("search");
  return 0;
}

int cmd_bounds(RunContext& ctx) {
  Config& config = ctx.config;
  LipschitzProfile profile;
  profile.l_r = config.get_double("profile.l_r", 1.0);
  profile.l_f = config.get_double("profile.l_f", 1.0);
  profile.l_pi = config.get_double("profile.l_pi", 1.0);
  profile.l_r_theta = config.get_double("profile.l_r_theta", 1.0);
  profile.l_f_theta = config.get_double("profile.l_f_theta", 1.0);
  profile.l_r_tilde_theta = config.get_double("profile.l_r_tilde_theta", 1.0);
  profile.l_f_tilde_theta = config.get_double("profile.l_f_tilde_theta", 1.0);
  profile.l_grad_r = config.get_double("profile.l_grad_r", 1.0);
  profile.l_grad_f = config.get_double("profile.l_grad_f", 1.0);
  profile.l_grad_pi = config.get_double("profile.l_grad_pi", 1.0);
  profile.l_grad_r_theta = config.get_double("profile.l_grad_r_theta", 1.0);
  profile.l_grad_f_theta = config.get_double("profile.l_grad_f_theta", 1.0);
  profile.l_grad_r_tilde_theta = config.get_double("profile.l_grad_r_tilde_theta", 1.0);
  profile.l_grad_f_tilde_theta = config.get_double("profile.l_grad_f_tilde_theta", 1.0);
  const BoundsReport report = theoretical_bounds(
      profile, static_cast<int>(config.get_int("bounds.horizon", 5)),
      static_cast<int>(config.get_int("bounds.d_s", 1)),
      static_cast<int>(config.get_int("bounds.d_a", 1)),
      static_cast<int>(config.get_int("bounds.d_theta", 1)),
      config.get_double("bounds.sigma_zeta", 0.1), config.get_double("bounds.epsilon", 0.1),
      config.get_double("bounds.delta", 0.1));
  const nlohmann::json j = bounds_to_json(report);
  {
    auto out = ctx.open_output("bounds.json");
    out << j.dump(2) << '\n';
  }
  std::printf("%-12s %-22s\n", "bound", "value");
  for (const char* key : {"sqrt_n_mb", "sqrt_n_pg", "sqrt_n_fd", "lambda_fd"}) {
    std::printf("%-12s %-22.10g\n", key, j[key].get<double>());
  }
  if (report.vacuous) std::printf("warning: bound vacuous (overflowed)\n");
  ctx.finish("bounds");
  return 0;
}

int cmd_verify(RunContext& ctx) {
  const std::vector<CheckResult> results = run_all_checks(ctx.seed);
  bool all_passed = true;
  {
    auto out = ctx.open_output("checks.jsonl");
    for (const CheckResult& r : results) {
      out << check_to_json(r).dump() << '\n';
    }
  }
  std::printf("%-28s %-6s %-14s %-14s %s\n", "check", "pass", "observed[0]", "target[0]", "samples");
  for (const CheckResult& r : results) {
    std::printf("%-28s %-6s %-14.6g %-14.6g %lld\n", r.name.c_str(), r.passed ? "ok" : "FAIL",
                r.observed.empty() ? 0.0 : r.observed[0],
                r.bound_or_target.empty() ? 0.0 : r.bound_or_target[0],
                static_cast<long long>(r.samples_used));
    if (!r.passed) all_passed = false;
  }
  ctx.finish("verify");
  return all_passed ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"pglab: policy-gradient estimation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  std::string out_dir = "pglab_out";
  app.add_option("--config", config_path, "path to a key = value config file");
  app.add_option("--seed", seed, "master seed (overrides the config)")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--workers", workers, "worker threads (never changes output bytes)");
  app.add_option("--out", out_dir, "output directory");

  CLI::App* sub_rollout = app.add_subcommand("rollout", "simulate one rollout, write CSV");
  CLI::App* sub_estimate = app.add_subcommand("estimate", "run one gradient estimate");
  CLI::App* sub_sweep = app.add_subcommand("sweep", "sigma_zeta error sweep per estimator");
  CLI::App* sub_complexity = app.add_subcommand("complexity", "empirical sample complexity");
  CLI::App* sub_train = app.add_subcommand("train", "SGD training run");
  CLI::App* sub_search = app.add_subcommand("search", "hyperparameter grid search");
  CLI::App* sub_bounds = app.add_subcommand("bounds", "theoretical bound calculator");
  CLI::App* sub_verify = app.add_subcommand("verify", "run the analytic check battery");
  for (CLI::App* sub : {sub_rollout, sub_estimate, sub_sweep, sub_complexity, sub_train, sub_search,
                        sub_bounds, sub_verify}) {
    sub->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunContext ctx;
    if (!config_path.empty()) ctx.config = Config::from_file(config_path);
    ctx.seed = seed_given ? seed : ctx.config.get_uint("seed", 0);
    ctx.out_dir = out_dir;
    set_worker_count(workers);

    if (sub_rollout->parsed()) return cmd_rollout(ctx);
    if (sub_estimate->parsed()) return cmd_estimate(ctx);
    if (sub_sweep->parsed()) return cmd_sweep(ctx);
    if (sub_complexity->parsed()) return cmd_complexity(ctx);
    if (sub_train->parsed()) return cmd_train(ctx);
    if (sub_search->parsed()) return cmd_search(ctx);
    if (sub_bounds->parsed()) return cmd_bounds(ctx);
    if (sub_verify->parsed()) return cmd_verify(ctx);
    std::fprintf(stderr, "error: no subcommand\n%s", app.help().c_str());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n%s", e.what(), app.help().c_str());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n%s", e.what(), app.help().c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace pglab
