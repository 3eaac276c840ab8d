#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pglab/analysis.hpp"
#include "pglab/dynamics.hpp"
#include "pglab/estimators.hpp"
#include "pglab/verify.hpp"

namespace pglab {

inline constexpr char kVersion[] = "0.1.0";

// Round-trip double formatting used by every CSV writer.
std::string fmt_double(double x);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value run configuration with dotted section keys
// (system.name, estimator.lambda, ...). One `key = value` pair per line;
// '#' starts a comment. Keys are kept sorted so the echo is diffable.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);
  void set_uint(const std::string& key, std::uint64_t value);
  void set_bool(const std::string& key, bool value);

  // get_* record the resolved value (default included) so the echo shows
  // the effective configuration. required_str throws ConfigError.
  std::string required_str(const std::string& key);
  std::string get_str(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key, const std::string& fallback);
  std::vector<std::int64_t> get_int_list(const std::string& key, const std::string& fallback);

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
};

void write_rollout_csv(std::ostream& out, const Rollout& traj);

nlohmann::json estimate_to_json(const GradientEstimate& est);
nlohmann::json estimator_config_to_json(const EstimatorConfig& config);

// Columns: axis_value, coord, mean_err, std_err, q05, q50, q95. One row
// per coordinate plus a "norm" row per grid point.
void write_sweep_csv(std::ostream& out, const SweepReport& report);
// Columns: n, exceed_fraction, wilson_lo, wilson_hi.
void write_complexity_csv(std::ostream& out, const SweepReport& report);
nlohmann::json sweep_to_json(const SweepReport& report);

// Columns: step, J, rollouts.
void write_curve_csv(std::ostream& out, const LearningCurve& curve);
nlohmann::json curve_to_json(const LearningCurve& curve);

nlohmann::json bounds_to_json(const BoundsReport& report);
nlohmann::json check_to_json(const CheckResult& result);

nlohmann::json search_to_json(const SearchResult& result);
void write_search_csv(std::ostream& out, const SearchResult& result);

}  // namespace pglab
