#include "pglab/policy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pglab/rng.hpp"

namespace pglab {

Policy::Policy(PolicyFamily family, int state_dim, int hidden_dim, int action_dim,
               Eigen::VectorXd theta)
    : family_(family),
      state_dim_(state_dim),
      hidden_dim_(hidden_dim),
      action_dim_(action_dim),
      theta_(std::move(theta)) {}

Policy Policy::linear_gain(double gain) {
  return Policy(PolicyFamily::LinearGain, 1, 0, 1, Eigen::VectorXd::Constant(1, gain));
}

Policy Policy::constant(const Eigen::VectorXd& action, int state_dim) {
  if (action.size() < 1) throw std::invalid_argument("constant policy: empty action");
  if (state_dim < 1) throw std::invalid_argument("constant policy: bad state dim");
  return Policy(PolicyFamily::Constant, state_dim, 0, static_cast<int>(action.size()), action);
}

Policy Policy::mlp(int state_dim, int hidden_dim, int action_dim, const Eigen::VectorXd& theta) {
  if (state_dim < 1 || hidden_dim < 1 || action_dim < 1) {
    throw std::invalid_argument("mlp policy: bad layout");
  }
  const int expected = hidden_dim * state_dim + hidden_dim + action_dim * hidden_dim + action_dim;
  if (theta.size() != expected) throw std::invalid_argument("mlp policy: theta length mismatch");
  return Policy(PolicyFamily::Mlp, state_dim, hidden_dim, action_dim, theta);
}

Policy Policy::mlp_random(int state_dim, int hidden_dim, int action_dim, std::uint64_t seed) {
  const int n = hidden_dim * state_dim + hidden_dim + action_dim * hidden_dim + action_dim;
  Eigen::VectorXd theta(n);
  RandomStream stream(derive_seed(seed, {seed_tag::kPolicyInit}));
  const double b1 = 1.0 / std::sqrt(static_cast<double>(state_dim));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  int k = 0;
  for (int i = 0; i < hidden_dim * state_dim + hidden_dim; ++i) {
    theta[k++] = b1 * (2.0 * stream.uniform() - 1.0);
  }
  for (int i = 0; i < action_dim * hidden_dim + action_dim; ++i) {
    theta[k++] = b2 * (2.0 * stream.uniform() - 1.0);
  }
  return mlp(state_dim, hidden_dim, action_dim, theta);
}

Eigen::VectorXd Policy::forward(const Eigen::VectorXd& s) const {
  if (s.size() != state_dim_) throw std::invalid_argument("policy forward: state dim mismatch");
  switch (family_) {
    case PolicyFamily::LinearGain:
      return Eigen::VectorXd::Constant(1, theta_[0] * s[0]);
    case PolicyFamily::Constant:
      return theta_;
    case PolicyFamily::Mlp: {
      const int H = hidden_dim_, dS = state_dim_, dA = action_dim_;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1(
          theta_.data(), H, dS);
      Eigen::Map<const Eigen::VectorXd> bias1(theta_.data() + H * dS, H);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w2(
          theta_.data() + H * dS + H, dA, H);
      Eigen::Map<const Eigen::VectorXd> bias2(theta_.data() + H * dS + H + dA * H, dA);
      const Eigen::VectorXd h = (w1 * s + bias1).cwiseMax(0.0);
      return w2 * h + bias2;
    }
  }
  throw std::logic_error("policy forward: unknown family");
}

PolicyJacobians Policy::jacobians(const Eigen::VectorXd& s) const {
  if (s.size() != state_dim_) throw std::invalid_argument("policy jacobians: state dim mismatch");
  PolicyJacobians out;
  switch (family_) {
    case PolicyFamily::LinearGain:
      out.d_theta = Eigen::MatrixXd::Constant(1, 1, s[0]);
      out.d_state = Eigen::MatrixXd::Constant(1, 1, theta_[0]);
      return out;
    case PolicyFamily::Constant:
      out.d_theta = Eigen::MatrixXd::Identity(action_dim_, action_dim_);
      out.d_state = Eigen::MatrixXd::Zero(action_dim_, state_dim_);
      return out;
    case PolicyFamily::Mlp: {
      const int H = hidden_dim_, dS = state_dim_, dA = action_dim_;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1(
          theta_.data(), H, dS);
      Eigen::Map<const Eigen::VectorXd> bias1(theta_.data() + H * dS, H);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w2(
          theta_.data() + H * dS + H, dA, H);
      const Eigen::VectorXd pre = w1 * s + bias1;
      // ReLU subderivative at the kink fixed to 0.
      Eigen::VectorXd active(H);
      for (int i = 0; i < H; ++i) active[i] = pre[i] > 0.0 ? 1.0 : 0.0;
      const Eigen::VectorXd h = pre.cwiseMax(0.0);

      out.d_state = w2 * active.asDiagonal() * w1;
      out.d_theta = Eigen::MatrixXd::Zero(dA, param_dim());
      // d a_k / d W1(i,j) = W2(k,i) * active_i * s_j ; d a_k / d b1(i) = W2(k,i) * active_i
      for (int i = 0; i < H; ++i) {
        if (active[i] == 0.0) continue;
        for (int k = 0; k < dA; ++k) {
          const double w2ki = w2(k, i);
          for (int j = 0; j < dS; ++j) out.d_theta(k, i * dS + j) = w2ki * s[j];
          out.d_theta(k, H * dS + i) = w2ki;
        }
      }
      // d a_k / d W2(k,i) = h_i ; d a_k / d b2(k) = 1
      const int w2_offset = H * dS + H;
      for (int k = 0; k < dA; ++k) {
        for (int i = 0; i < H; ++i) out.d_theta(k, w2_offset + k * H + i) = h[i];
        out.d_theta(k, w2_offset + dA * H + k) = 1.0;
      }
      return out;
    }
  }
  throw std::logic_error("policy jacobians: unknown family");
}

Policy Policy::perturbed(const Eigen::VectorXd& delta) const {
  if (delta.size() != theta_.size()) throw std::invalid_argument("perturb: delta length mismatch");
  return Policy(family_, state_dim_, hidden_dim_, action_dim_, theta_ + delta);
}

Policy Policy::with_theta(const Eigen::VectorXd& theta) const {
  if (theta.size() != theta_.size()) throw std::invalid_argument("with_theta: length mismatch");
  return Policy(family_, state_dim_, hidden_dim_, action_dim_, theta);
}

void Policy::save(std::ostream& out) const {
  out << family_name(family_);
  if (family_ == PolicyFamily::Mlp) {
    out << ' ' << state_dim_ << ' ' << hidden_dim_ << ' ' << action_dim_;
  } else if (family_ == PolicyFamily::Constant) {
    out << ' ' << state_dim_ << ' ' << action_dim_;
  }
  out << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", theta_[i]);
    out << buf << '\n';
  }
}

void Policy::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  save(out);
}

Policy Policy::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("checkpoint: missing header");
  std::istringstream hs(header);
  std::string family;
  hs >> family;
  auto read_theta = [&in](int n) {
    Eigen::VectorXd theta(n);
    for (int i = 0; i < n; ++i) {
      if (!(in >> theta[i])) throw std::invalid_argument("checkpoint: truncated theta");
    }
    return theta;
  };
  if (family == "linear_gain") {
    return Policy::linear_gain(read_theta(1)[0]);
  }
  if (family == "constant") {
    int state_dim = 0, action_dim = 0;
    if (!(hs >> state_dim >> action_dim)) throw std::invalid_argument("checkpoint: bad layout");
    return Policy::constant(read_theta(action_dim), state_dim);
  }
  if (family == "mlp") {
    int state_dim = 0, hidden_dim = 0, action_dim = 0;
    if (!(hs >> state_dim >> hidden_dim >> action_dim)) {
      throw std::invalid_argument("checkpoint: bad layout");
    }
    const int n = hidden_dim * state_dim + hidden_dim + action_dim * hidden_dim + action_dim;
    return Policy::mlp(state_dim, hidden_dim, action_dim, read_theta(n));
  }
  throw std::invalid_argument("checkpoint: unknown family '" + family + "'");
}

Policy Policy::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return load(in);
}

std::string family_name(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::LinearGain:
      return "linear_gain";
    case PolicyFamily::Constant:
      return "constant";
    case PolicyFamily::Mlp:
      return "mlp";
  }
  return "unknown";
}

}  // namespace pglab
