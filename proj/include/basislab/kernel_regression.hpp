#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "basislab/trajectory.hpp"

namespace basislab {

/// Regression onto d orthonormal kernel functions. The dynamics depend only
/// on the coefficient vector, so the kernels themselves are never formed:
/// theta_star holds the true coefficients, with the k signals as a nonzero
/// prefix of non-increasing magnitude.
struct KRProblem {
  Eigen::VectorXd theta_star;
  std::size_t k = 0;

  Eigen::Index dimension() const { return theta_star.size(); }
};

KRProblem make_kr_problem(const Eigen::VectorXd& theta_star);

// theta - eta * (theta - theta_star), valid for 0 < eta < 1.
Eigen::VectorXd kr_gd_step(const Eigen::VectorXd& theta, double eta, const KRProblem& problem);

// Coefficient i after t steps from theta0: signals relax geometrically
// toward theta_star[i], residuals decay geometrically to zero.
double kr_closed_form(Eigen::Index i, std::size_t t, const Eigen::VectorXd& theta0, double eta,
                      const KRProblem& problem);

using KRObserver = std::function<void(std::size_t, const Eigen::VectorXd&)>;

// Simulates from theta0 = alpha * 1. Tracked columns: the k signals plus the
// largest residual magnitude. Loss is 0.5 * ||theta - theta*||^2, error is
// ||theta - theta*||. The observer, when set, sees every iterate.
CoefficientTrajectory run_kr(const KRProblem& problem, double alpha, double eta,
                             std::size_t iterations, std::size_t record_every = 1,
                             const KRObserver& observe = {});

// Iterations for the error to drop to the alpha scale:
// ceil((1/eta) * log(k * |theta_1*| / alpha)). Requires alpha < k * theta1_abs.
std::size_t kr_iteration_bound(double alpha, double eta, std::size_t k, double theta1_abs);

// Coefficients are linear in the parameters; the gradient rows are the fixed
// coordinate directions.
Eigen::MatrixXd kr_coefficient_gradients(Eigen::Index d);

}  // namespace basislab
