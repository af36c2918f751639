#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "basislab/trajectory.hpp"

namespace basislab {

/// Symmetric factorization target M* = Z diag(sigma) Z^T learned through an
/// overparameterized factor U in R^{d x r_over}.
struct SMFProblem {
  Eigen::Index d = 0;
  Eigen::Index r = 0;       // true rank, the number of nonzero sigma entries
  Eigen::Index r_over = 0;  // factor columns, r_over >= r
  Eigen::MatrixXd Z;        // d x d orthonormal eigenvectors
  Eigen::VectorXd sigma;    // length d, non-increasing, zero beyond r
  double eigengap = 0.0;    // min_{i <= r} (sigma_i - sigma_{i+1})
  double kappa = 0.0;       // sigma_1 / sigma_r

  Eigen::MatrixXd target() const { return Z * sigma.asDiagonal() * Z.transpose(); }
};

// Random orthonormal Z derived from the seed.
SMFProblem make_smf_problem(Eigen::Index d, Eigen::Index r_over,
                            const Eigen::VectorXd& sigma_head, std::uint64_t seed);
// Explicit eigenvectors.
SMFProblem make_smf_problem(const Eigen::MatrixXd& Z, Eigen::Index r_over,
                            const Eigen::VectorXd& sigma_head);

struct SMFState {
  Eigen::MatrixXd U;  // d x r_over
  std::size_t iteration = 0;
};

/// Coefficient matrix B = Z^T U U^T Z, with B_ij = <z_i z_j^T, U U^T>.
struct BetaMatrix {
  Eigen::MatrixXd B;
};

// Entries iid gaussian with standard deviation alpha, drawn row by row.
SMFState smf_init_gaussian(const SMFProblem& problem, double alpha, std::uint64_t seed);

struct SMFInitCheck {
  bool signal_ok;    // B_ii >= r_over * alpha^2 / 4 on the signal block
  bool residual_ok;  // |B_ij| <= 4 log(d) r_over alpha^2 elsewhere
};

SMFInitCheck smf_init_check(const SMFState& state, const SMFProblem& problem, double alpha);

// U+ = U - eta (U U^T - M*) U.
SMFState smf_gd_step(const SMFState& state, const SMFProblem& problem, double eta);

BetaMatrix smf_coefficients(const SMFState& state, const SMFProblem& problem);

// Exact one-step image of the coefficient matrix under the factor update:
// B+ = B - eta ((B-S) B + B (B-S)) + eta^2 (B-S) B (B-S) with S = diag(sigma).
// Commutes with smf_coefficients(smf_gd_step(.)).
BetaMatrix smf_coefficient_step(const BetaMatrix& beta, const SMFProblem& problem, double eta);

// ||U U^T - M*||_F; equals the coefficient-space distance by Parseval.
double smf_reconstruction_error(const SMFState& state, const SMFProblem& problem);

// B_12^2 / B_22, the cross-coupling diagnostic for the second signal.
double smf_coupling_ratio(const BetaMatrix& beta);

// Gradient of the (i, j) coefficient with respect to U: (z_i z_j^T + z_j z_i^T) U.
Eigen::MatrixXd smf_coefficient_gradient(const SMFState& state, const SMFProblem& problem,
                                         Eigen::Index i, Eigen::Index j);

// 1/4 ||B - diag(sigma)||_F^2, the quarter convention that matches the
// factor-update gradient.
double smf_loss(const BetaMatrix& beta, const SMFProblem& problem);

using SMFObserver = std::function<void(std::size_t, const SMFState&, const BetaMatrix&)>;

// Tracked columns: B_ii for the r signals, max off-diagonal |B_ij|, and the
// largest |B_ij| over the residual block i, j > r. The observer, when set,
// sees every iterate.
CoefficientTrajectory run_smf(const SMFProblem& problem, double alpha, double eta,
                              std::size_t iterations, std::uint64_t seed,
                              std::size_t record_every = 1, const SMFObserver& observe = {});

struct MonteCarloEstimate {
  double estimate;
  double std_error;
};

// Sample mean of (1/4) <U U^T - M*, X>^2 over iid standard-normal-entry X.
MonteCarloEstimate mc_expected_loss_smf(const SMFState& state, const SMFProblem& problem,
                                        std::size_t n_samples, std::uint64_t seed);

}  // namespace basislab
