#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pglab {

enum class PolicyFamily { LinearGain, Constant, Mlp };

// Exact Jacobians of the policy output at one (theta, s) point.
struct PolicyJacobians {
  Eigen::MatrixXd d_theta;  // d_A x d_Theta
  Eigen::MatrixXd d_state;  // d_A x d_S
};

// Deterministic parameterized policy pi_theta. Immutable value type;
// forward and jacobians are pure and safe to call concurrently.
//
// Parameter layouts:
//   linear_gain  theta = (g),          pi(s) = g * s          (scalar)
//   constant     theta = a,            pi(s) = a              (any state)
//   mlp          theta = flat(W1 row-major, b1, W2 row-major, b2),
//                pi(s) = W2 * relu(W1 s + b1) + b2
class Policy {
 public:
  static Policy linear_gain(double gain);
  static Policy constant(const Eigen::VectorXd& action, int state_dim);
  static Policy mlp(int state_dim, int hidden_dim, int action_dim, const Eigen::VectorXd& theta);
  // Uniform init on [-1/sqrt(fan_in), +1/sqrt(fan_in)] for each layer.
  static Policy mlp_random(int state_dim, int hidden_dim, int action_dim, std::uint64_t seed);

  Eigen::VectorXd forward(const Eigen::VectorXd& s) const;
  PolicyJacobians jacobians(const Eigen::VectorXd& s) const;

  // New policy with theta + delta; this policy is unmodified.
  Policy perturbed(const Eigen::VectorXd& delta) const;
  Policy with_theta(const Eigen::VectorXd& theta) const;

  const Eigen::VectorXd& theta() const { return theta_; }
  PolicyFamily family() const { return family_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  int param_dim() const { return static_cast<int>(theta_.size()); }

  // Checkpoint format: line 1 is the family token and layout, then one
  // parameter per line with 17 significant digits.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Policy load(std::istream& in);
  static Policy load_file(const std::string& path);

 private:
  Policy(PolicyFamily family, int state_dim, int hidden_dim, int action_dim,
         Eigen::VectorXd theta);

  PolicyFamily family_;
  int state_dim_;
  int hidden_dim_;  // 0 unless mlp
  int action_dim_;
  Eigen::VectorXd theta_;
};

std::string family_name(PolicyFamily family);

}  // namespace pglab
