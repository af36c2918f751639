#include "basislab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "basislab/errors.hpp"

namespace basislab {

LossDecomposition decomposed_loss(const Eigen::VectorXd& beta, const Eigen::VectorXd& beta_star,
                                  double approximation_error, double noise_variance) {
  if (beta.size() != beta_star.size()) {
    throw InputError("decomposed_loss: beta and beta_star lengths differ");
  }
  if (!beta.allFinite() || !beta_star.allFinite() || !std::isfinite(approximation_error) ||
      !std::isfinite(noise_variance)) {
    throw InputError("decomposed_loss: non-finite input");
  }
  if (approximation_error < 0.0 || noise_variance < 0.0) {
    throw InputError("decomposed_loss: approximation error and noise variance must be >= 0");
  }
  LossDecomposition out;
  out.optimization_error = 0.5 * (beta - beta_star).squaredNorm();
  out.approximation_error = approximation_error;
  out.noise = noise_variance / 2.0;
  out.total = out.optimization_error + out.approximation_error + out.noise;
  return out;
}

IndependenceScore gradient_independence_score(const Eigen::MatrixXd& gradient_rows,
                                              double norm_floor) {
  if (gradient_rows.rows() < 2) {
    throw InputError("gradient_independence_score: needs at least two gradient rows");
  }
  if (!(norm_floor > 0.0)) {
    throw InputError("gradient_independence_score: norm_floor must be > 0");
  }
  const Eigen::VectorXd norms = gradient_rows.rowwise().norm();
  IndependenceScore out;
  for (Eigen::Index i = 0; i < gradient_rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gradient_rows.rows(); ++j) {
      if (norms(i) < norm_floor || norms(j) < norm_floor) {
        ++out.skipped_pairs;
        continue;
      }
      const double cosine =
          std::abs(gradient_rows.row(i).dot(gradient_rows.row(j))) / (norms(i) * norms(j));
      out.score = std::max(out.score, std::min(cosine, 1.0));
    }
  }
  return out;
}

DominanceFit dominance_fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) {
    throw InputError("dominance_fit: needs at least two samples");
  }
  const std::size_t n = samples.size();
  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(samples[i].first > 0.0) || !(samples[i].second > 0.0)) {
      throw InputError("dominance_fit: samples must be strictly positive");
    }
    x(i) = std::log(samples[i].first);
    y(i) = std::log(samples[i].second);
  }
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const Eigen::VectorXd dy = y.array() - my;
  const double sxx = dx.squaredNorm();
  if (sxx <= 0.0) {
    throw InputError("dominance_fit: all |beta| samples identical, fit is degenerate");
  }
  const double slope = dx.dot(dy) / sxx;
  const double intercept = my - slope * mx;
  const Eigen::VectorXd resid = y - (intercept + slope * x.array()).matrix();
  const double ss_res = resid.squaredNorm();
  const double ss_tot = dy.squaredNorm();
  double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  r2 = std::clamp(r2, 0.0, 1.0);
  return DominanceFit{std::exp(intercept), slope, r2, n};
}

InitCheck init_condition_check(const Eigen::VectorXd& beta0,
                               const std::vector<Eigen::Index>& signal_set, double alpha,
                               double C1, double C2) {
  if (signal_set.empty()) {
    throw InputError("init_condition_check: signal set is empty");
  }
  for (const Eigen::Index i : signal_set) {
    if (i < 0 || i >= beta0.size()) {
      throw InputError("init_condition_check: signal index out of range");
    }
  }
  InitCheck out;
  out.signals_ok = true;
  for (const Eigen::Index i : signal_set) {
    if (beta0(i) < C1 * alpha) {
      out.signals_ok = false;
      break;
    }
  }
  out.energy_ok = beta0.norm() <= C2 * alpha;
  return out;
}

namespace {

void check_bound_inputs(const ConvergenceBoundInputs& in) {
  const bool positive = in.C > 0.0 && in.alpha > 0.0 && in.beta_k_star > 0.0 &&
                        in.basis_size_d > 0 && in.L_f > 0.0 && in.L_g > 0.0 && in.L_H > 0.0 &&
                        in.C1 > 0.0 && in.C2 > 0.0;
  if (!positive) {
    throw InputError("convergence bounds: all inputs must be strictly positive");
  }
  if (in.gamma_exponent < 0.5 || in.gamma_exponent > 1.0) {
    throw InputError("convergence bounds: gamma_exponent must lie in [1/2, 1]");
  }
}

}  // namespace

double dominance_step_size(const ConvergenceBoundInputs& in) {
  check_bound_inputs(in);
  const double log_arg =
      static_cast<double>(in.basis_size_d) * in.beta_k_star / (in.C1 * in.alpha);
  const double log_term = std::max(std::log(log_arg), 1.0);
  const double numerator = std::pow(in.alpha * in.beta_k_star, 2.0 * in.gamma_exponent);
  const double denominator = std::sqrt(static_cast<double>(in.basis_size_d)) * in.C * in.C *
                             in.L_H * in.L_g * in.L_g * in.L_f * in.L_f * log_term;
  return numerator / denominator;
}

std::size_t dominance_iterations(const ConvergenceBoundInputs& in, double eta) {
  check_bound_inputs(in);
  if (!(eta > 0.0)) {
    throw InputError("convergence bounds: eta must be > 0");
  }
  const double rate = in.C * in.C * eta * in.beta_k_star;
  double t;
  if (in.gamma_exponent == 0.5) {
    t = std::max(std::log(in.beta_k_star / (in.C1 * in.alpha)), 0.0) / rate;
  } else {
    t = 1.0 / (rate * std::pow(in.alpha, 2.0 * in.gamma_exponent - 1.0));
  }
  return static_cast<std::size_t>(std::ceil(t));
}

ConvergenceBounds dominance_convergence_bounds(const ConvergenceBoundInputs& in) {
  const double eta_max = dominance_step_size(in);
  return ConvergenceBounds{eta_max, dominance_iterations(in, eta_max)};
}

double coefficient_step_residual(const Eigen::VectorXd& theta, double eta,
                                 const CoefficientSystem& system,
                                 const Eigen::VectorXd& beta_star) {
  if (!system.beta || !system.beta_jacobian) {
    throw InputError("coefficient_step_residual: evaluators not set");
  }
  const Eigen::VectorXd beta_t = system.beta(theta);
  const Eigen::MatrixXd jac = system.beta_jacobian(theta);
  if (beta_t.size() != beta_star.size()) {
    throw InputError("coefficient_step_residual: beta_star length mismatch");
  }
  if (jac.rows() != beta_t.size() || jac.cols() != theta.size()) {
    throw InputError("coefficient_step_residual: jacobian shape mismatch");
  }
  const Eigen::VectorXd loss_grad = jac.transpose() * (beta_t - beta_star);
  const Eigen::VectorXd theta_next = theta - eta * loss_grad;
  const Eigen::VectorXd beta_next = system.beta(theta_next);
  const Eigen::VectorXd predicted = beta_t - eta * (jac * loss_grad);
  return (beta_next - predicted).cwiseAbs().maxCoeff();
}

}  // namespace basislab
