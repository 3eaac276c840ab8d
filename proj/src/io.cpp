#include "pglab/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pglab {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

Config Config::from_text(const std::string& text) {
  Config config;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    config.values_[key] = value;
  }
  return config;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }
void Config::set_double(const std::string& key, double value) { values_[key] = fmt_double(value); }
void Config::set_int(const std::string& key, std::int64_t value) {
  values_[key] = std::to_string(value);
}
void Config::set_uint(const std::string& key, std::uint64_t value) {
  values_[key] = std::to_string(value);
}
void Config::set_bool(const std::string& key, bool value) {
  values_[key] = value ? "true" : "false";
}

std::string Config::required_str(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    values_[key] = fallback;
    return fallback;
  }
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    set_double(key, fallback);
    return fallback;
  }
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + it->second + "'");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    set_int(key, fallback);
    return fallback;
  }
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + it->second + "'");
  }
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    set_uint(key, fallback);
    return fallback;
  }
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an unsigned integer");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    set_bool(key, fallback);
    return fallback;
  }
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false");
}

std::vector<double> Config::get_double_list(const std::string& key, const std::string& fallback) {
  const std::string raw = get_str(key, fallback);
  std::vector<double> out;
  for (const std::string& item : split_list(raw)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad list entry '" + item + "'");
    }
  }
  return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key, const std::string& fallback) {
  const std::string raw = get_str(key, fallback);
  std::vector<std::int64_t> out;
  for (const std::string& item : split_list(raw)) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad list entry '" + item + "'");
    }
  }
  return out;
}

void Config::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) {
    out << key << " = " << value << '\n';
  }
}

void Config::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config echo: " + path);
  write(out);
}

void write_rollout_csv(std::ostream& out, const Rollout& traj) {
  const int T = static_cast<int>(traj.states.size());
  const int d_s = T > 0 ? static_cast<int>(traj.states[0].size()) : 0;
  const int d_a = T > 0 ? static_cast<int>(traj.actions[0].size()) : 0;
  out << "t";
  for (int i = 1; i <= d_s; ++i) out << ",s_" << i;
  for (int i = 1; i <= d_a; ++i) out << ",a_" << i;
  for (int i = 1; i <= d_s; ++i) out << ",zeta_" << i;
  out << ",reward\n";
  for (int t = 0; t < T; ++t) {
    out << t;
    for (int i = 0; i < d_s; ++i) out << ',' << fmt_double(traj.states[t][i]);
    for (int i = 0; i < d_a; ++i) out << ',' << fmt_double(traj.actions[t][i]);
    for (int i = 0; i < d_s; ++i) out << ',' << fmt_double(traj.zetas[t][i]);
    out << ',' << fmt_double(traj.rewards[t]) << '\n';
  }
}

nlohmann::json estimator_config_to_json(const EstimatorConfig& config) {
  nlohmann::json j;
  j["kind"] = estimator_name(config.kind);
  if (config.kind == EstimatorKind::PG) {
    j["sigma_xi"] = config.pg.sigma_xi;
    j["baseline"] = baseline_name(config.pg.baseline);
    if (config.pg.baseline == BaselineMode::McRollouts) {
      j["baseline_samples"] = config.pg.baseline_samples;
    }
  } else if (config.kind == EstimatorKind::FD) {
    j["lambda"] = config.fd.lambda;
    j["mode"] = fd_mode_name(config.fd.mode);
    j["crn"] = config.fd.crn;
  }
  return j;
}

nlohmann::json estimate_to_json(const GradientEstimate& est) {
  nlohmann::json j;
  j["estimator"] = estimator_name(est.config.kind);
  j["config"] = estimator_config_to_json(est.config);
  j["seed"] = est.seed;
  j["n_rollouts"] = est.n_rollouts;
  j["baseline_rollouts"] = est.baseline_rollouts;
  j["grad"] = std::vector<double>(est.grad.data(), est.grad.data() + est.grad.size());
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "axis_value,coord,mean_err,std_err,q05,q50,q95\n";
  for (const SweepPoint& p : report.points) {
    for (Eigen::Index k = 0; k < p.mean_err.size(); ++k) {
      out << fmt_double(p.axis_value) << ',' << k << ',' << fmt_double(p.mean_err[k]) << ','
          << fmt_double(p.std_err[k]) << ',' << fmt_double(p.q05[k]) << ','
          << fmt_double(p.q50[k]) << ',' << fmt_double(p.q95[k]) << '\n';
    }
    out << fmt_double(p.axis_value) << ",norm," << fmt_double(p.norm_mean) << ','
        << fmt_double(p.norm_std) << ',' << fmt_double(p.norm_q05) << ','
        << fmt_double(p.norm_q50) << ',' << fmt_double(p.norm_q95) << '\n';
  }
}

void write_complexity_csv(std::ostream& out, const SweepReport& report) {
  out << "n,exceed_fraction,wilson_lo,wilson_hi\n";
  for (const SweepPoint& p : report.points) {
    out << static_cast<std::int64_t>(p.axis_value) << ',' << fmt_double(p.exceed_fraction) << ','
        << fmt_double(p.wilson_lo) << ',' << fmt_double(p.wilson_hi) << '\n';
  }
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json sweep_to_json(const SweepReport& report) {
  nlohmann::json j;
  j["axis"] = report.axis_name;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  j["config"] = estimator_config_to_json(report.config);
  j["low_repeat_warning"] = report.low_repeat_warning;
  if (report.axis_name == "n") {
    j["epsilon"] = report.epsilon;
    j["delta"] = report.delta;
    j["threshold_reached"] = report.threshold_reached;
    j["threshold_n"] = report.threshold_n;
  }
  if (report.fit.has_value()) {
    j["fit"] = {{"slope", report.fit->slope},
                {"intercept", report.fit->intercept},
                {"residual", report.fit->residual}};
  }
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : report.points) {
    nlohmann::json pj;
    pj["axis_value"] = p.axis_value;
    pj["mean_err"] = vec_to_json(p.mean_err);
    pj["std_err"] = vec_to_json(p.std_err);
    pj["q05"] = vec_to_json(p.q05);
    pj["q50"] = vec_to_json(p.q50);
    pj["q95"] = vec_to_json(p.q95);
    pj["norm_mean"] = p.norm_mean;
    pj["norm_std"] = p.norm_std;
    pj["norm_q05"] = p.norm_q05;
    pj["norm_q50"] = p.norm_q50;
    pj["norm_q95"] = p.norm_q95;
    pj["agg_std"] = p.agg_std;
    pj["gt_se"] = p.gt_se;
    if (!std::isnan(p.exceed_fraction)) {
      pj["exceed_fraction"] = p.exceed_fraction;
      pj["wilson_lo"] = p.wilson_lo;
      pj["wilson_hi"] = p.wilson_hi;
    }
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
  out << "step,J,rollouts\n";
  for (const LearningCurvePoint& p : curve.points) {
    out << p.step << ',' << fmt_double(p.j) << ',' << p.rollouts << '\n';
  }
}

nlohmann::json curve_to_json(const LearningCurve& curve) {
  nlohmann::json j;
  j["diverged"] = curve.diverged;
  j["converged"] = curve.converged;
  j["initial_j"] = curve.initial_j;
  j["final_j"] = curve.final_j;
  j["total_rollouts"] = curve.total_rollouts;
  j["seeds_disjoint"] = curve.seeds_disjoint;
  nlohmann::json points = nlohmann::json::array();
  for (const LearningCurvePoint& p : curve.points) {
    points.push_back({{"step", p.step}, {"theta_hash", p.theta_hash}, {"J", p.j},
                      {"rollouts", p.rollouts}});
  }
  j["points"] = std::move(points);
  return j;
}

nlohmann::json bounds_to_json(const BoundsReport& report) {
  nlohmann::json j;
  j["note"] = "proof-constant bounds, not tight predictions";
  j["l_v0"] = report.l_v0;
  j["l_grad_v0"] = report.l_grad_v0;
  j["l_v_tilde0"] = report.l_v_tilde0;
  j["sigma_mb"] = report.sigma_mb;
  j["sqrt_n_mb"] = report.sqrt_n_mb;
  j["lambda_fd"] = report.lambda_fd;
  j["sigma_fd"] = report.sigma_fd;
  j["sqrt_n_fd"] = report.sqrt_n_fd;
  j["tau_pg"] = report.tau_pg;
  j["sqrt_n_pg"] = report.sqrt_n_pg;
  j["vacuous"] = report.vacuous;
  return j;
}

nlohmann::json check_to_json(const CheckResult& result) {
  nlohmann::json j;
  j["name"] = result.name;
  j["passed"] = result.passed;
  j["observed"] = result.observed;
  j["bound_or_target"] = result.bound_or_target;
  j["samples_used"] = result.samples_used;
  j["seed"] = result.seed;
  return j;
}

nlohmann::json search_to_json(const SearchResult& result) {
  nlohmann::json j;
  j["best_lr"] = result.best_lr;
  if (!std::isnan(result.best_lambda)) j["best_lambda"] = result.best_lambda;
  if (!std::isnan(result.best_sigma_xi)) j["best_sigma_xi"] = result.best_sigma_xi;
  j["best_score"] = result.best_score;
  j["partial"] = result.partial;
  j["runs_used"] = result.runs_used;
  return j;
}

void write_search_csv(std::ostream& out, const SearchResult& result) {
  out << "lr,lambda,sigma_xi,seed,final_j,converged,diverged\n";
  for (const SearchRow& row : result.table) {
    out << fmt_double(row.lr) << ',' << fmt_double(row.lambda) << ',' << fmt_double(row.sigma_xi)
        << ',' << row.seed << ',' << fmt_double(row.final_j) << ',' << (row.converged ? 1 : 0)
        << ',' << (row.diverged ? 1 : 0) << '\n';
  }
}

}  // namespace pglab
