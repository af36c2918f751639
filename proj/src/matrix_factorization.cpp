#include "basislab/matrix_factorization.hpp"

#include <cmath>
#include <string>

#include "basislab/errors.hpp"
#include "basislab/random.hpp"

namespace basislab {

namespace {

void check_sigma_head(const Eigen::VectorXd& sigma_head) {
  if (sigma_head.size() == 0) {
    throw InputError("smf problem: sigma must contain at least one nonzero value");
  }
  for (Eigen::Index i = 0; i < sigma_head.size(); ++i) {
    if (!(sigma_head(i) > 0.0)) {
      throw InputError("smf problem: nonzero sigma entries must be positive");
    }
    if (i > 0 && sigma_head(i) > sigma_head(i - 1)) {
      throw InputError("smf problem: sigma must be non-increasing");
    }
  }
}

}  // namespace

SMFProblem make_smf_problem(const Eigen::MatrixXd& Z, Eigen::Index r_over,
                            const Eigen::VectorXd& sigma_head) {
  check_sigma_head(sigma_head);
  const Eigen::Index d = Z.rows();
  if (Z.cols() != d || d == 0) {
    throw InputError("smf problem: Z must be square");
  }
  const double ortho = (Z.transpose() * Z - Eigen::MatrixXd::Identity(d, d))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-12) {
    throw InputError("smf problem: Z is not orthonormal");
  }
  const Eigen::Index r = sigma_head.size();
  if (r > d) {
    throw InputError("smf problem: rank exceeds dimension");
  }
  if (r_over < r) {
    throw InputError("smf problem: r_over must be >= the true rank");
  }
  SMFProblem problem;
  problem.d = d;
  problem.r = r;
  problem.r_over = r_over;
  problem.Z = Z;
  problem.sigma = Eigen::VectorXd::Zero(d);
  problem.sigma.head(r) = sigma_head;
  problem.eigengap = sigma_head(r - 1);  // sigma_r - sigma_{r+1} with sigma_{r+1} = 0
  for (Eigen::Index i = 0; i + 1 < r; ++i) {
    problem.eigengap = std::min(problem.eigengap, sigma_head(i) - sigma_head(i + 1));
  }
  if (!(problem.eigengap > 0.0)) {
    throw InputError("smf problem: eigengap must be strictly positive");
  }
  problem.kappa = sigma_head(0) / sigma_head(r - 1);
  return problem;
}

SMFProblem make_smf_problem(Eigen::Index d, Eigen::Index r_over,
                            const Eigen::VectorXd& sigma_head, std::uint64_t seed) {
  Rng rng(seed);
  return make_smf_problem(random_orthonormal(d, rng), r_over, sigma_head);
}

SMFState smf_init_gaussian(const SMFProblem& problem, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) {
    throw InputError("smf_init_gaussian: alpha must be > 0");
  }
  Rng rng(seed);
  return SMFState{alpha * gaussian_matrix(problem.d, problem.r_over, rng), 0};
}

SMFInitCheck smf_init_check(const SMFState& state, const SMFProblem& problem, double alpha) {
  const BetaMatrix beta = smf_coefficients(state, problem);
  const double a2 = alpha * alpha;
  const double signal_floor = static_cast<double>(problem.r_over) * a2 / 4.0;
  const double residual_cap =
      4.0 * std::log(static_cast<double>(problem.d)) * static_cast<double>(problem.r_over) * a2;
  SMFInitCheck out{true, true};
  for (Eigen::Index i = 0; i < problem.r; ++i) {
    if (beta.B(i, i) < signal_floor) {
      out.signal_ok = false;
      break;
    }
  }
  for (Eigen::Index i = 0; i < problem.d && out.residual_ok; ++i) {
    for (Eigen::Index j = 0; j < problem.d; ++j) {
      const bool residual_entry = i != j || (i >= problem.r && j >= problem.r);
      if (residual_entry && std::abs(beta.B(i, j)) > residual_cap) {
        out.residual_ok = false;
        break;
      }
    }
  }
  return out;
}

SMFState smf_gd_step(const SMFState& state, const SMFProblem& problem, double eta) {
  if (!(eta > 0.0)) {
    throw InputError("smf_gd_step: eta must be > 0");
  }
  if (state.U.rows() != problem.d || state.U.cols() != problem.r_over) {
    throw InputError("smf_gd_step: factor dimensions do not match the problem");
  }
  const Eigen::MatrixXd gram = state.U * state.U.transpose();
  SMFState next;
  next.U = state.U - eta * (gram - problem.target()) * state.U;
  next.iteration = state.iteration + 1;
  if (next.U.cwiseAbs().maxCoeff() > kDivergenceLimit) {
    throw DivergenceError("smf_gd_step: iterate exceeded divergence limit at step " +
                          std::to_string(next.iteration));
  }
  return next;
}

BetaMatrix smf_coefficients(const SMFState& state, const SMFProblem& problem) {
  if (state.U.rows() != problem.d) {
    throw InputError("smf_coefficients: factor dimension mismatch");
  }
  const Eigen::MatrixXd w = problem.Z.transpose() * state.U;  // d x r_over
  return BetaMatrix{w * w.transpose()};
}

BetaMatrix smf_coefficient_step(const BetaMatrix& beta, const SMFProblem& problem, double eta) {
  if (!(eta > 0.0)) {
    throw InputError("smf_coefficient_step: eta must be > 0");
  }
  const Eigen::MatrixXd& b = beta.B;
  if (b.rows() != problem.d || b.cols() != problem.d) {
    throw InputError("smf_coefficient_step: coefficient matrix dimension mismatch");
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("smf_coefficient_step: coefficient matrix must be symmetric");
  }
  Eigen::MatrixXd resid = b;
  resid.diagonal() -= problem.sigma;  // B - S
  const Eigen::MatrixXd rb = resid * b;
  BetaMatrix next;
  next.B = b - eta * (rb + rb.transpose()) + eta * eta * rb * resid;
  return next;
}

double smf_reconstruction_error(const SMFState& state, const SMFProblem& problem) {
  return (state.U * state.U.transpose() - problem.target()).norm();
}

double smf_coupling_ratio(const BetaMatrix& beta) {
  if (beta.B.rows() < 2 || beta.B.cols() < 2) {
    throw InputError("smf_coupling_ratio: needs at least a 2x2 coefficient matrix");
  }
  if (!(beta.B(1, 1) > 0.0)) {
    throw InputError("smf_coupling_ratio: B_22 must be positive");
  }
  return beta.B(0, 1) * beta.B(0, 1) / beta.B(1, 1);
}

Eigen::MatrixXd smf_coefficient_gradient(const SMFState& state, const SMFProblem& problem,
                                         Eigen::Index i, Eigen::Index j) {
  if (i < 0 || j < 0 || i >= problem.d || j >= problem.d) {
    throw InputError("smf_coefficient_gradient: index out of range");
  }
  const Eigen::VectorXd zi = problem.Z.col(i);
  const Eigen::VectorXd zj = problem.Z.col(j);
  return zi * (zj.transpose() * state.U) + zj * (zi.transpose() * state.U);
}

double smf_loss(const BetaMatrix& beta, const SMFProblem& problem) {
  Eigen::MatrixXd resid = beta.B;
  resid.diagonal() -= problem.sigma;
  return 0.25 * resid.squaredNorm();
}

CoefficientTrajectory run_smf(const SMFProblem& problem, double alpha, double eta,
                              std::size_t iterations, std::uint64_t seed,
                              std::size_t record_every, const SMFObserver& observe) {
  if (record_every == 0) {
    throw InputError("run_smf: record_every must be >= 1");
  }
  SMFState state = smf_init_gaussian(problem, alpha, seed);

  CoefficientTrajectory traj;
  for (Eigen::Index i = 0; i < problem.r; ++i) {
    const std::string index = std::to_string(i + 1);
    traj.labels.push_back("beta_" + index + index);
  }
  traj.labels.push_back("offdiag_max");
  traj.labels.push_back("residual_max");

  const Eigen::Index r = problem.r;
  const Eigen::Index d = problem.d;
  for (std::size_t t = 0;; ++t) {
    const BetaMatrix beta = smf_coefficients(state, problem);
    if (observe) {
      observe(t, state, beta);
    }
    if (t % record_every == 0 || t == iterations) {
      Eigen::VectorXd row(r + 2);
      row.head(r) = beta.B.diagonal().head(r);
      double offdiag = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          if (i != j) {
            offdiag = std::max(offdiag, std::abs(beta.B(i, j)));
          }
        }
      }
      row(r) = offdiag;
      row(r + 1) = r < d ? beta.B.bottomRightCorner(d - r, d - r).cwiseAbs().maxCoeff() : 0.0;
      traj.append(t, row, smf_loss(beta, problem), smf_reconstruction_error(state, problem));
    }
    if (t == iterations) {
      break;
    }
    state = smf_gd_step(state, problem, eta);
  }
  return traj;
}

MonteCarloEstimate mc_expected_loss_smf(const SMFState& state, const SMFProblem& problem,
                                        std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) {
    throw InputError("mc_expected_loss_smf: needs at least two samples");
  }
  const Eigen::MatrixXd resid = state.U * state.U.transpose() - problem.target();
  Rng rng(seed);
  const Eigen::Index d = problem.d;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double inner = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        inner += resid(i, j) * rng.gaussian();
      }
    }
    const double value = 0.25 * inner * inner;
    sum += value;
    sum_sq += value * value;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return MonteCarloEstimate{mean, std::sqrt(variance / n)};
}

}  // namespace basislab
