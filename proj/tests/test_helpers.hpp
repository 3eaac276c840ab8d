#pragma once

#include <Eigen/Dense>

#include "pglab/dynamics.hpp"
#include "pglab/estimators.hpp"
#include "pglab/policy.hpp"

namespace pglab::testing {

// Central finite difference of J_hat over every theta coordinate with a
// shared noise realization.
inline Eigen::VectorXd shared_noise_fd(const DynamicalSystem& system, const Policy& policy,
                                       const NoiseSequence& noise, double lambda) {
  Eigen::VectorXd out(policy.param_dim());
  for (int k = 0; k < policy.param_dim(); ++k) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(policy.param_dim());
    delta[k] = lambda;
    out[k] = (rollout(system, policy.perturbed(delta), noise).j_hat -
              rollout(system, policy.perturbed(-delta), noise).j_hat) /
             (2.0 * lambda);
  }
  return out;
}

// A finite-difference bracket that straddles a ReLU kink is not a valid
// derivative oracle; such points reveal themselves by inconsistency
// between two step sizes. Returns false when the oracle is unusable.
inline bool fd_oracle_valid(const DynamicalSystem& system, const Policy& policy,
                            const NoiseSequence& noise, double lambda,
                            Eigen::VectorXd* fd_out) {
  const Eigen::VectorXd fd1 = shared_noise_fd(system, policy, noise, lambda);
  const Eigen::VectorXd fd2 = shared_noise_fd(system, policy, noise, 2.0 * lambda);
  if (fd_out != nullptr) *fd_out = fd1;
  const double scale = std::max(fd1.norm(), fd2.norm());
  return scale == 0.0 || (fd1 - fd2).norm() <= 1e-6 * scale;
}

}  // namespace pglab::testing
