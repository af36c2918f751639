#include "basislab/kernel_regression.hpp"

#include <cmath>
#include <string>

#include "basislab/errors.hpp"

namespace basislab {

KRProblem make_kr_problem(const Eigen::VectorXd& theta_star) {
  if (theta_star.size() == 0 || !theta_star.allFinite()) {
    throw InputError("kr problem: theta_star must be non-empty and finite");
  }
  std::size_t k = 0;
  while (k < static_cast<std::size_t>(theta_star.size()) && theta_star(k) != 0.0) {
    ++k;
  }
  for (Eigen::Index i = static_cast<Eigen::Index>(k); i < theta_star.size(); ++i) {
    if (theta_star(i) != 0.0) {
      throw InputError("kr problem: signals must form a nonzero prefix");
    }
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (std::abs(theta_star(i)) < std::abs(theta_star(i + 1))) {
      throw InputError("kr problem: signal magnitudes must be non-increasing");
    }
  }
  return KRProblem{theta_star, k};
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InputError("kernel regression: eta must lie in (0, 1)");
  }
}

}  // namespace

Eigen::VectorXd kr_gd_step(const Eigen::VectorXd& theta, double eta, const KRProblem& problem) {
  check_eta(eta);
  if (theta.size() != problem.dimension()) {
    throw InputError("kr_gd_step: theta dimension mismatch");
  }
  return theta - eta * (theta - problem.theta_star);
}

double kr_closed_form(Eigen::Index i, std::size_t t, const Eigen::VectorXd& theta0, double eta,
                      const KRProblem& problem) {
  check_eta(eta);
  if (i < 0 || i >= problem.dimension() || theta0.size() != problem.dimension()) {
    throw InputError("kr_closed_form: index or theta0 dimension out of range");
  }
  const double decay = std::pow(1.0 - eta, static_cast<double>(t));
  if (i < static_cast<Eigen::Index>(problem.k)) {
    return problem.theta_star(i) - decay * (problem.theta_star(i) - theta0(i));
  }
  return decay * theta0(i);
}

CoefficientTrajectory run_kr(const KRProblem& problem, double alpha, double eta,
                             std::size_t iterations, std::size_t record_every,
                             const KRObserver& observe) {
  if (!(alpha > 0.0)) {
    throw InputError("run_kr: alpha must be > 0");
  }
  check_eta(eta);
  if (record_every == 0) {
    throw InputError("run_kr: record_every must be >= 1");
  }
  const Eigen::Index d = problem.dimension();
  const Eigen::Index k = static_cast<Eigen::Index>(problem.k);

  CoefficientTrajectory traj;
  for (Eigen::Index i = 0; i < k; ++i) {
    traj.labels.push_back("theta_" + std::to_string(i + 1));
  }
  traj.labels.push_back("residual_max");

  Eigen::VectorXd theta = Eigen::VectorXd::Constant(d, alpha);
  auto record = [&](std::size_t t) {
    Eigen::VectorXd row(k + 1);
    row.head(k) = theta.head(k);
    row(k) = k < d ? theta.tail(d - k).cwiseAbs().maxCoeff() : 0.0;
    const double err = (theta - problem.theta_star).norm();
    traj.append(t, row, 0.5 * err * err, err);
  };

  for (std::size_t t = 0;; ++t) {
    if (theta.cwiseAbs().maxCoeff() > kDivergenceLimit) {
      throw DivergenceError("run_kr: iterate exceeded divergence limit at step " +
                            std::to_string(t));
    }
    if (observe) {
      observe(t, theta);
    }
    if (t % record_every == 0 || t == iterations) {
      record(t);
    }
    if (t == iterations) {
      break;
    }
    theta = kr_gd_step(theta, eta, problem);
  }
  return traj;
}

std::size_t kr_iteration_bound(double alpha, double eta, std::size_t k, double theta1_abs) {
  if (!(alpha > 0.0 && eta > 0.0 && k > 0 && theta1_abs > 0.0)) {
    throw InputError("kr_iteration_bound: inputs must be strictly positive");
  }
  const double scale = static_cast<double>(k) * theta1_abs;
  if (alpha >= scale) {
    throw InputError("kr_iteration_bound: requires alpha < k * |theta_1*|");
  }
  return static_cast<std::size_t>(std::ceil(std::log(scale / alpha) / eta));
}

Eigen::MatrixXd kr_coefficient_gradients(Eigen::Index d) {
  if (d <= 0) {
    throw InputError("kr_coefficient_gradients: d must be positive");
  }
  return Eigen::MatrixXd::Identity(d, d);
}

}  // namespace basislab
