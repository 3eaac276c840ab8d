#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pglab {

// splitmix64 finalizer; good avalanche, used only for seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a master seed and an index path.
// Pure function of (master, path), so results never depend on evaluation
// order or thread count.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Fixed tags for the index paths used across the library. Keeping them in
// one place guarantees distinct consumers never share a stream.
namespace seed_tag {
inline constexpr std::uint64_t kZeta = 1;
inline constexpr std::uint64_t kXi = 2;
inline constexpr std::uint64_t kMbSample = 3;
inline constexpr std::uint64_t kPgSample = 4;
inline constexpr std::uint64_t kPgBaseline = 5;
inline constexpr std::uint64_t kFdPlus = 6;
inline constexpr std::uint64_t kFdMinus = 7;
inline constexpr std::uint64_t kFdDirection = 8;
inline constexpr std::uint64_t kSweepRepeat = 9;
inline constexpr std::uint64_t kTrainStep = 10;
inline constexpr std::uint64_t kEvalBatch = 11;
inline constexpr std::uint64_t kPolicyInit = 12;
inline constexpr std::uint64_t kCheck = 13;
}  // namespace seed_tag

// One independent random stream. Each consumer constructs its own stream
// from a derived seed; streams are never shared between consumers.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0, 1)

  // Vector of independent N(0, std_k^2) entries.
  Eigen::VectorXd gaussian(const Eigen::VectorXd& std_per_dim);
  // Vector of independent N(0, std^2) entries.
  Eigen::VectorXd gaussian(int dim, double std);
  // Uniform draw from the unit sphere in R^dim.
  Eigen::VectorXd unit_sphere(int dim);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace pglab
