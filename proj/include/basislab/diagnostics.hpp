#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace basislab {

/// Additive split of the expected loss given the coefficients. `total` is
/// stored as the literal sum optimization + approximation + noise, in that
/// order, so it matches a recomputation of the same expression bit for bit.
struct LossDecomposition {
  double optimization_error;
  double approximation_error;
  double noise;
  double total;
};

LossDecomposition decomposed_loss(const Eigen::VectorXd& beta, const Eigen::VectorXd& beta_star,
                                  double approximation_error, double noise_variance);

struct IndependenceScore {
  double score = 0.0;             // max |cos| over eligible gradient-row pairs
  std::size_t skipped_pairs = 0;  // pairs with a row norm below the floor
};

// Rows of `gradient_rows` are the flattened coefficient gradients. Rows with
// norm below `norm_floor` are skipped rather than rejected: residual
// coefficients legitimately have vanishing gradients near a small init.
IndependenceScore gradient_independence_score(const Eigen::MatrixXd& gradient_rows,
                                              double norm_floor = 1e-12);

/// Power-law fit g = C * beta^gamma, ordinary least squares in log-log space.
struct DominanceFit {
  double C;
  double gamma_exponent;
  double r_squared;
  std::size_t sample_count;
};

// Samples are (|beta|, gradient norm) pairs, all strictly positive.
DominanceFit dominance_fit(const std::vector<std::pair<double, double>>& samples);

struct InitCheck {
  bool signals_ok;  // beta0[i] >= C1 * alpha on the signal set
  bool energy_ok;   // ||beta0|| <= C2 * alpha
};

InitCheck init_condition_check(const Eigen::VectorXd& beta0,
                               const std::vector<Eigen::Index>& signal_set, double alpha,
                               double C1, double C2);

/// Inputs for the step-size / iteration budget of GD under gradient
/// dominance with exponent gamma_exponent in [1/2, 1]. All implied
/// constants are taken as 1.
struct ConvergenceBoundInputs {
  double C;
  double gamma_exponent;
  double alpha;
  double beta_k_star;
  std::size_t basis_size_d;
  double L_f;
  double L_g;
  double L_H;
  double C1;
  double C2;
};

struct ConvergenceBounds {
  double eta_max;
  std::size_t iterations;
};

// Maximal admissible step size. The logarithm is clamped at 1 to keep the
// (advisory) bound finite when C1 * alpha approaches d * beta_k_star.
double dominance_step_size(const ConvergenceBoundInputs& in);

// Iteration budget at a given step size eta.
std::size_t dominance_iterations(const ConvergenceBoundInputs& in, double eta);

// Both bounds together, with the iteration count evaluated at eta_max.
ConvergenceBounds dominance_convergence_bounds(const ConvergenceBoundInputs& in);

/// Coefficient evaluators for a parameterized model: beta(theta) and the
/// Jacobian whose row i is the gradient of coefficient i.
struct CoefficientSystem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> beta;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> beta_jacobian;
};

// Takes one exact GD step on the half-sum-of-squares coefficient loss and
// returns max_i |beta_i(theta+) - first-order prediction|. The residual is
// quadratic in eta for twice-differentiable coefficients, and zero when they
// are linear in theta.
double coefficient_step_residual(const Eigen::VectorXd& theta, double eta,
                                 const CoefficientSystem& system,
                                 const Eigen::VectorXd& beta_star);

}  // namespace basislab
