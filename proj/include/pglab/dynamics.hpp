#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pglab {

class Policy;

// Thrown when a system lacks an optional capability (analytic Jacobians,
// closed-form value function) that an operation requires.
struct UnsupportedOperation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Partial derivatives of the transition f and reward R at (t, s, a).
struct SystemJacobians {
  Eigen::MatrixXd df_ds;  // d_S x d_S
  Eigen::MatrixXd df_da;  // d_S x d_A
  Eigen::VectorXd dr_ds;  // d_S
  Eigen::VectorXd dr_da;  // d_A
};

enum class TestbedKind { MB, PG, FD };

struct TestbedInfo {
  TestbedKind kind;
  double beta;
  double sigma;
};

// A finite-horizon controlled system s_{t+1} = f(t, s_t, a_t) + zeta_t with
// per-step reward R(t, s_t, a_t). Values are immutable after construction
// and safe to share across concurrent rollouts. Time-invariant systems
// simply ignore t.
struct DynamicalSystem {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  int horizon = 0;  // number of decision steps T
  Eigen::VectorXd initial_state;
  double sigma_zeta = 0.0;

  std::function<Eigen::VectorXd(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> transition;
  std::function<double(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> reward;
  // Per-dimension noise std at step t. Default profile is i.i.d.
  // N(0, sigma_zeta^2 I) every step; testbeds concentrate it at t = 0.
  std::function<Eigen::VectorXd(int)> noise_std;

  // Optional analytic Jacobians; required by the model-based estimator.
  std::function<SystemJacobians(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> jacobians;
  // Optional closed-form value function V~(t, s) of the paired policy class
  // under additive zero-mean action noise; theta is the flat parameter
  // vector of that class. Only the linear testbeds provide this.
  std::function<double(int, const Eigen::VectorXd&, const Eigen::VectorXd&)> analytic_state_value;

  std::optional<TestbedInfo> testbed;

  bool has_jacobians() const { return static_cast<bool>(jacobians); }
  bool has_analytic_value() const { return static_cast<bool>(analytic_state_value); }
};

// T step-noise vectors (and optionally T action-noise vectors), together
// with the seed that generated them; regeneration from (system, seed) is
// bit-identical.
struct NoiseSequence {
  std::vector<Eigen::VectorXd> zetas;
  std::vector<Eigen::VectorXd> xis;  // empty unless sampled with action noise
  std::uint64_t seed = 0;

  bool has_action_noise() const { return !xis.empty(); }
};

// One simulated trajectory. states holds s_0..s_{T-1}; j_hat is the plain
// left-to-right sum of rewards.
struct Rollout {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> actions;
  std::vector<Eigen::VectorXd> zetas;
  std::vector<Eigen::VectorXd> xis;  // empty for deterministic-policy rollouts
  std::vector<double> rewards;
  double j_hat = 0.0;
};

// Single transition: f(t, s, a) + zeta.
Eigen::VectorXd step(const DynamicalSystem& system, int t, const Eigen::VectorXd& s,
                     const Eigen::VectorXd& a, const Eigen::VectorXd& zeta);

// Full trajectory under a_t = pi(s_t) + xi_t (xi_t = 0 when the sequence
// has no action noise). Deterministic function of (system, policy, noise).
Rollout rollout(const DynamicalSystem& system, const Policy& policy, const NoiseSequence& noise);

// Continuation of a trajectory from state s at step t0; used by the
// Monte-Carlo restart baseline. Returns the reward-to-go sum.
double rollout_from(const DynamicalSystem& system, const Policy& policy, int t0,
                    const Eigen::VectorXd& s, const NoiseSequence& noise);

// T draws from the system noise profile; if sigma_xi > 0, also T draws of
// N(0, sigma_xi^2 I_{d_A}) action noise. Reproducible from seed.
NoiseSequence sample_noise(const DynamicalSystem& system, std::uint64_t seed, double sigma_xi = 0.0);

// Inverted pendulum, T = 50, explicit-Euler dynamics, quadratic reward.
// State is the raw (angle from upright, angular velocity) pair; no angle
// wrapping and no torque or velocity clipping, so pathwise gradients are
// exact.
DynamicalSystem pendulum_system(double sigma_zeta);

// Analytic linear testbeds. All require T >= 4.
//   MB: f(s,a) = beta*s + a, N(0, sigma^2) state noise at t = 0 only,
//       reward s at t = T-1, paired with pi_theta(s) = theta*s.
//   PG: f_t(s,a) = beta*s + a while s == 0, beta*s after; reward s at
//       t = T-1, paired with the constant policy pi_theta(s) = theta.
//       sigma > 0 injects N(0, sigma^2) state noise at t = 0, which leaves
//       grad J unchanged (pass 0 for the canonical zero-noise system).
//   FD: two-dimensional variant whose terminal reward is s + phi(s'),
//       noise on the first coordinate at t = 0 only, constant policy.
DynamicalSystem linear_testbed(TestbedKind kind, double beta, double sigma, int T);

// The piecewise map used by the FD testbed reward: x|x| on [-1, 1),
// 2x - 1 for x >= 1, 2x + 1 for x < -1. Odd (phi(-x) = -phi(x)) with a
// Lipschitz derivative; equals x^2 on [0, 1).
double fd_phi(double x);
double fd_phi_prime(double x);

}  // namespace pglab
