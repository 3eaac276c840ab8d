#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pglab/cli.hpp"
#include "pglab/io.hpp"

using namespace pglab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("pglab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "run.cfg";
  std::ofstream out(path);
  out << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("rollout writes the documented CSV") {
  const fs::path dir = fresh_dir("rollout");
  const std::string cfg = write_config(dir, "system.name = pendulum\nsystem.sigma_zeta = 0\n"
                                            "policy.family = mlp\npolicy.hidden = 4\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"rollout", "--config", cfg, "--seed", "7", "--out", out.string()}) == 0);
  const std::string csv = slurp(out / "rollout.csv");
  CHECK(count_lines(csv) == 51);  // header + T rows
  CHECK(csv.rfind("t,s_1,s_2,a_1,zeta_1,zeta_2,reward\n", 0) == 0);

  const fs::path out2 = dir / "out2";
  CHECK(run_cli({"rollout", "--config", cfg, "--seed", "7", "--out", out2.string()}) == 0);
  CHECK(slurp(out2 / "rollout.csv") == csv);
}

TEST_CASE("missing system name exits with a usage error") {
  const fs::path dir = fresh_dir("badcfg");
  const std::string cfg = write_config(dir, "policy.family = mlp\n");
  CHECK(run_cli({"rollout", "--config", cfg, "--out", (dir / "o").string()}) == 2);
}

TEST_CASE("estimate reports exact rollout accounting") {
  const fs::path dir = fresh_dir("estimate");
  const std::string cfg = write_config(dir,
                                       "system.name = pendulum\nsystem.sigma_zeta = 1e-2\n"
                                       "policy.family = mlp\npolicy.hidden = 4\n"
                                       "estimator.kind = fd\nestimator.mode = basis\n"
                                       "estimator.n = 5\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"estimate", "--config", cfg, "--seed", "3", "--out", out.string()}) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out / "estimate.json"));
  // d_theta = 4*2 + 4 + 4 + 1 = 17, so 2 * n * d_theta = 170.
  CHECK(j["n_rollouts"].get<int>() == 170);
}

TEST_CASE("mb estimate on the noiseless testbed is exactly zero") {
  const fs::path dir = fresh_dir("mbzero");
  const std::string cfg = write_config(dir, "system.name = mb_testbed\nsystem.sigma_zeta = 0\n"
                                            "estimator.kind = mb\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"estimate", "--config", cfg, "--out", out.string()}) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out / "estimate.json"));
  REQUIRE(j["grad"].size() == 1);
  CHECK(j["grad"][0].get<double>() == 0.0);
}

TEST_CASE("pg on a noiseless system demands explicit action noise") {
  const fs::path dir = fresh_dir("pgnoise");
  const std::string cfg = write_config(dir, "system.name = pg_testbed\nsystem.sigma_zeta = 0\n"
                                            "estimator.kind = pg\nestimator.baseline = exact\n");
  CHECK(run_cli({"estimate", "--config", cfg, "--out", (dir / "o").string()}) == 2);
}

TEST_CASE("the echoed config reproduces the run byte for byte") {
  const fs::path dir = fresh_dir("echo");
  const std::string cfg = write_config(dir,
                                       "system.name = mb_testbed\nsystem.sigma_zeta = 0.1\n"
                                       "estimator.kind = mb\nestimator.n = 32\n");
  const fs::path out1 = dir / "a";
  CHECK(run_cli({"estimate", "--config", cfg, "--seed", "11", "--out", out1.string()}) == 0);
  const fs::path out2 = dir / "b";
  CHECK(run_cli({"estimate", "--config", (out1 / "config.txt").string(), "--out",
                 out2.string()}) == 0);
  CHECK(slurp(out1 / "estimate.json") == slurp(out2 / "estimate.json"));
  CHECK(slurp(out1 / "config.txt") == slurp(out2 / "config.txt"));
}

TEST_CASE("worker count never changes output bytes") {
  const fs::path dir = fresh_dir("workers");
  const std::string cfg = write_config(dir,
                                       "system.name = mb_testbed\nsystem.sigma_zeta = 0.1\n"
                                       "sweep.sigma_grid = 1e-3,1e-2,1e-1\nsweep.repeats = 200\n"
                                       "sweep.estimators = mb,fd\n");
  const fs::path out1 = dir / "w1";
  const fs::path out2 = dir / "w4";
  CHECK(run_cli({"sweep", "--config", cfg, "--seed", "5", "--workers", "1", "--out",
                 out1.string()}) == 0);
  CHECK(run_cli({"sweep", "--config", cfg, "--seed", "5", "--workers", "4", "--out",
                 out2.string()}) == 0);
  for (const char* name : {"sweep_mb.csv", "sweep_fd.csv", "sweep_mb.json", "sweep_fd.json"}) {
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
  const std::string csv = slurp(out1 / "sweep_mb.csv");
  CHECK(csv.rfind("axis_value,coord,mean_err,std_err,q05,q50,q95\n", 0) == 0);
}

TEST_CASE("train with zero learning rate goes nowhere") {
  const fs::path dir = fresh_dir("train");
  const std::string cfg = write_config(dir,
                                       "system.name = pendulum\nsystem.sigma_zeta = 1e-3\n"
                                       "policy.family = mlp\npolicy.hidden = 4\n"
                                       "estimator.kind = mb\n"
                                       "train.steps = 10\ntrain.learning_rate = 0\n"
                                       "train.eval_every = 5\ntrain.eval_batch = 8\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"train", "--config", cfg, "--seed", "2", "--out", out.string()}) == 0);
  const std::string csv = slurp(out / "curve.csv");
  std::stringstream ss(csv);
  std::string header, first;
  std::getline(ss, header);
  CHECK(header == "step,J,rollouts");
  std::getline(ss, first);
  const std::string j0 = first.substr(first.find(',') + 1, first.rfind(',') - first.find(',') - 1);
  std::string line;
  while (std::getline(ss, line)) {
    CHECK(line.find(j0) != std::string::npos);
  }
}

TEST_CASE("bounds command emits a finite table") {
  const fs::path dir = fresh_dir("bounds");
  const std::string cfg = write_config(dir, "bounds.horizon = 3\nbounds.sigma_zeta = 0.1\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"bounds", "--config", cfg, "--out", out.string()}) == 0);
  const std::string json = slurp(out / "bounds.json");
  CHECK(json.find("\"vacuous\": false") != std::string::npos);
  CHECK(json.find("\"sqrt_n_mb\"") != std::string::npos);
}

TEST_CASE("manifest records the run") {
  const fs::path dir = fresh_dir("manifest");
  const std::string cfg = write_config(dir, "system.name = mb_testbed\n");
  const fs::path out = dir / "out";
  CHECK(run_cli({"rollout", "--config", cfg, "--seed", "1", "--out", out.string()}) == 0);
  const std::string manifest = slurp(out / "manifest.json");
  CHECK(manifest.find("\"command\": \"rollout\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 1") != std::string::npos);
  CHECK(manifest.find("rollout.csv") != std::string::npos);
}

TEST_SUITE_END();
