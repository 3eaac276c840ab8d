#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pglab/analysis.hpp"
#include "pglab/estimators.hpp"
#include "pglab/parallel.hpp"
#include "pglab/verify.hpp"

namespace py = pybind11;
using namespace pglab;

namespace {

TestbedKind parse_kind(const std::string& kind) {
  if (kind == "mb") return TestbedKind::MB;
  if (kind == "pg") return TestbedKind::PG;
  if (kind == "fd") return TestbedKind::FD;
  throw std::invalid_argument("unknown testbed kind '" + kind + "' (expected mb, pg or fd)");
}

BaselineMode parse_baseline(const std::string& mode) {
  if (mode == "none") return BaselineMode::None;
  if (mode == "exact") return BaselineMode::ExactAnalytic;
  if (mode == "mc") return BaselineMode::McRollouts;
  throw std::invalid_argument("unknown baseline '" + mode + "' (expected none, exact or mc)");
}

py::dict estimate_to_dict(const GradientEstimate& est) {
  py::dict out;
  out["grad"] = est.grad;
  out["n_rollouts"] = est.n_rollouts;
  out["baseline_rollouts"] = est.baseline_rollouts;
  out["estimator"] = estimator_name(est.config.kind);
  out["seed"] = est.seed;
  return out;
}

}  // namespace

PYBIND11_MODULE(_pglab, m) {
  m.doc() = "Policy-gradient estimation laboratory: systems, policies and the "
            "model-based, policy-gradient-theorem and finite-difference estimators.";

  py::class_<DynamicalSystem>(m, "DynamicalSystem")
      .def_readonly("name", &DynamicalSystem::name)
      .def_readonly("state_dim", &DynamicalSystem::state_dim)
      .def_readonly("action_dim", &DynamicalSystem::action_dim)
      .def_readonly("horizon", &DynamicalSystem::horizon)
      .def_readonly("initial_state", &DynamicalSystem::initial_state)
      .def_readonly("sigma_zeta", &DynamicalSystem::sigma_zeta)
      .def("reward", [](const DynamicalSystem& sys, int t, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& a) { return sys.reward(t, s, a); })
      .def("transition", [](const DynamicalSystem& sys, int t, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& a) { return sys.transition(t, s, a); });

  py::class_<Policy>(m, "Policy")
      .def_static("linear_gain", &Policy::linear_gain, py::arg("gain"))
      .def_static("constant", &Policy::constant, py::arg("action"), py::arg("state_dim"))
      .def_static("mlp", &Policy::mlp, py::arg("state_dim"), py::arg("hidden_dim"),
                  py::arg("action_dim"), py::arg("theta"))
      .def_static("mlp_random", &Policy::mlp_random, py::arg("state_dim"), py::arg("hidden_dim"),
                  py::arg("action_dim"), py::arg("seed"))
      .def_property_readonly("theta", &Policy::theta)
      .def_property_readonly("param_dim", &Policy::param_dim)
      .def("forward", &Policy::forward, py::arg("state"))
      .def("jacobians",
           [](const Policy& policy, const Eigen::VectorXd& s) {
             const PolicyJacobians j = policy.jacobians(s);
             return py::make_tuple(j.d_theta, j.d_state);
           },
           py::arg("state"), "Returns (d_theta, d_state).")
      .def("perturbed", &Policy::perturbed, py::arg("delta"))
      .def("with_theta", &Policy::with_theta, py::arg("theta"))
      .def("save", &Policy::save_file, py::arg("path"))
      .def_static("load", &Policy::load_file, py::arg("path"));

  py::class_<NoiseSequence>(m, "NoiseSequence")
      .def_readonly("zetas", &NoiseSequence::zetas)
      .def_readonly("xis", &NoiseSequence::xis)
      .def_readonly("seed", &NoiseSequence::seed);

  py::class_<Rollout>(m, "Rollout")
      .def_readonly("states", &Rollout::states)
      .def_readonly("actions", &Rollout::actions)
      .def_readonly("zetas", &Rollout::zetas)
      .def_readonly("xis", &Rollout::xis)
      .def_readonly("rewards", &Rollout::rewards)
      .def_readonly("j_hat", &Rollout::j_hat);

  m.def("pendulum_system", &pendulum_system, py::arg("sigma_zeta"));
  m.def(
      "linear_testbed",
      [](const std::string& kind, double beta, double sigma, int T) {
        return linear_testbed(parse_kind(kind), beta, sigma, T);
      },
      py::arg("kind"), py::arg("beta"), py::arg("sigma"), py::arg("T"));
  m.def("fd_phi", &fd_phi, py::arg("x"));

  m.def("sample_noise", &sample_noise, py::arg("system"), py::arg("seed"),
        py::arg("sigma_xi") = 0.0);
  m.def("rollout", &rollout, py::arg("system"), py::arg("policy"), py::arg("noise"));
  m.def("step", &step, py::arg("system"), py::arg("t"), py::arg("state"), py::arg("action"),
        py::arg("zeta"));

  m.def("mb_single", &mb_single, py::arg("system"), py::arg("policy"), py::arg("noise"));
  m.def(
      "estimate_mb",
      [](const DynamicalSystem& sys, const Policy& policy, int n, std::uint64_t seed) {
        return estimate_to_dict(estimate_mb(sys, policy, n, seed));
      },
      py::arg("system"), py::arg("policy"), py::arg("n"), py::arg("seed"));
  m.def(
      "estimate_pg",
      [](const DynamicalSystem& sys, const Policy& policy, int n, double sigma_xi,
         const std::string& baseline, int baseline_samples, std::uint64_t seed) {
        PgConfig config;
        config.sigma_xi = sigma_xi;
        config.baseline = parse_baseline(baseline);
        config.baseline_samples = baseline_samples;
        return estimate_to_dict(estimate_pg(sys, policy, n, config, seed));
      },
      py::arg("system"), py::arg("policy"), py::arg("n"), py::arg("sigma_xi") = 0.0,
      py::arg("baseline") = "mc", py::arg("baseline_samples") = 16, py::arg("seed") = 0);
  m.def(
      "estimate_fd",
      [](const DynamicalSystem& sys, const Policy& policy, int n, double lambda,
         const std::string& mode, bool crn, std::uint64_t seed) {
        FdConfig config;
        config.lambda = lambda;
        config.mode = mode == "sphere" ? FdMode::Sphere : FdMode::Basis;
        config.crn = crn;
        return estimate_to_dict(estimate_fd(sys, policy, n, config, seed));
      },
      py::arg("system"), py::arg("policy"), py::arg("n"), py::arg("lambda_") = 1e-3,
      py::arg("mode") = "basis", py::arg("crn") = false, py::arg("seed") = 0);

  m.def(
      "ground_truth_gradient",
      [](const DynamicalSystem& sys, const Policy& policy, const std::string& method,
         std::int64_t n, std::uint64_t seed) {
        GroundTruthMethod m;
        if (method == "analytic") {
          m.kind = GroundTruthMethod::Kind::Analytic;
        } else if (method == "mb_big_n") {
          m.kind = GroundTruthMethod::Kind::MbBigN;
          m.n = n;
        } else {
          throw std::invalid_argument("unknown ground-truth method '" + method + "'");
        }
        const GroundTruth truth = ground_truth_gradient(sys, policy, m, seed);
        return py::make_tuple(truth.grad, truth.standard_error);
      },
      py::arg("system"), py::arg("policy"), py::arg("method") = "analytic",
      py::arg("n") = 1000000, py::arg("seed") = 0,
      "Returns (grad, standard_error).");
  m.def(
      "analytic_gradient_linear",
      [](const std::string& kind, double beta, int T, double theta, double noise_or_xi) {
        return analytic_gradient_linear(parse_kind(kind), beta, T, theta, noise_or_xi);
      },
      py::arg("kind"), py::arg("beta"), py::arg("T"), py::arg("theta"), py::arg("noise_or_xi"));

  m.def(
      "theoretical_bounds",
      [](int T, int d_s, int d_a, int d_theta, double sigma_zeta, double epsilon, double delta) {
        const BoundsReport r =
            theoretical_bounds(LipschitzProfile{}, T, d_s, d_a, d_theta, sigma_zeta, epsilon, delta);
        py::dict out;
        out["sqrt_n_mb"] = r.sqrt_n_mb;
        out["sqrt_n_pg"] = r.sqrt_n_pg;
        out["sqrt_n_fd"] = r.sqrt_n_fd;
        out["lambda_fd"] = r.lambda_fd;
        out["l_v0"] = r.l_v0;
        out["l_grad_v0"] = r.l_grad_v0;
        out["vacuous"] = r.vacuous;
        return out;
      },
      py::arg("T"), py::arg("d_s"), py::arg("d_a"), py::arg("d_theta"), py::arg("sigma_zeta"),
      py::arg("epsilon"), py::arg("delta"),
      "Proof-constant bound evaluations with a unit Lipschitz profile.");

  m.def("set_worker_count", &set_worker_count, py::arg("n"));
  m.attr("__version__") = "0.1.0";
}
