#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "basislab/trajectory.hpp"

namespace basislab {

/// Order-l symmetric tensor target sum_i sigma_i z_i^{(x)l} learned through
/// the factor columns u_1..u_{r_over}. All production-path computations go
/// through the Gram identity <a^{(x)l}, b^{(x)l}> = <a, b>^l; dense tensors
/// are never materialized here.
struct OSTDProblem {
  Eigen::Index d = 0;
  Eigen::Index r = 0;
  Eigen::Index r_over = 0;
  int order_l = 0;        // tensor order, >= 3
  Eigen::MatrixXd Z;      // d x d orthonormal
  Eigen::VectorXd sigma;  // length d, non-increasing, zero beyond r
  double kappa = 0.0;
};

OSTDProblem make_ostd_problem(Eigen::Index d, Eigen::Index r_over, int order_l,
                              const Eigen::VectorXd& sigma_head, std::uint64_t seed);
OSTDProblem make_ostd_problem(const Eigen::MatrixXd& Z, Eigen::Index r_over, int order_l,
                              const Eigen::VectorXd& sigma_head);

struct OSTDState {
  Eigen::MatrixXd U;  // d x r_over, columns u_i
  std::size_t iteration = 0;
};

/// V_ij = <u_i, z_j> together with the largest off-diagonal magnitude.
struct VMatrix {
  Eigen::MatrixXd V;  // r_over x d
  double offdiag_max = 0.0;
};

// 0.5 * || sum u_i^{(x)l} - sum sigma_i z_i^{(x)l} ||_F^2 via the Gram identity.
double ostd_loss(const OSTDState& state, const OSTDProblem& problem);

// Column i: l (sum_j <u_i,u_j>^{l-1} u_j - sum_j sigma_j <u_i,z_j>^{l-1} z_j).
Eigen::MatrixXd ostd_gradient(const OSTDState& state, const OSTDProblem& problem);

OSTDState ostd_gd_step(const OSTDState& state, const OSTDProblem& problem, double eta);

VMatrix v_matrix(const OSTDState& state, const OSTDProblem& problem);

/// Ordered index tuple of length l with the per-index occurrence counts.
struct MultiIndex {
  std::vector<int> entries;  // length l, values in [0, d)
  std::vector<int> counts;   // length d
};

MultiIndex make_multi_index(std::vector<int> entries, Eigen::Index d);

// beta_Lambda = sum_i prod_k V_ik^{counts_k}.
double beta_lambda(const VMatrix& v, const MultiIndex& lambda);

// Literal one-step coefficient recurrence for V, evaluated by enumerating
// all d^l multi-indices. Independent oracle for v_matrix(ostd_gd_step(.)).
// Refuses instances with d^l > 10^6.
VMatrix v_step_reference(const VMatrix& v, const OSTDProblem& problem, double eta);

// u_i(0) = alpha^{1/l} (sqrt(1-gamma^2) z_i + gamma w_i) with w_i a seeded
// random unit vector orthogonal to z_i, so the norm is alpha^{1/l} and
// sin(u_i(0), z_i) = gamma exactly. Requires r_over <= d.
OSTDState ostd_aligned_init(const OSTDProblem& problem, double alpha, double gamma_align,
                            std::uint64_t seed);

/// Envelopes for the coefficients in terms of the off-diagonal level V:
/// diagonal coefficients stay within r_over * V^l of v_jj^l, mixed ones
/// below 2 r sigma_1^{(l-1)/l} V. Only evaluated when the preconditions on
/// V and the diagonal residuals hold; `applicable` reports that gate.
struct EnvelopeCheck {
  bool applicable = false;
  bool diag_ok = false;
  bool offdiag_ok = false;
};

EnvelopeCheck beta_envelope_check(const VMatrix& v, const OSTDProblem& problem);

/// One-step growth monitors for the V entries: a signal lower bound, a
/// diagonal-residual upper bound, and the off-diagonal growth cap
/// V+ <= V + 3 eta l sigma_1 V^{l-1}. Preconditions (unit constants):
/// V <= sigma_1^{1/l} d^{-1/(l-1)}, v_ii <= sigma_1^{1/l}, eta <= 1/(l sigma_1).
/// A failed precondition reports `applicable = false` and never counts as a
/// failed bound.
struct StepMonitor {
  bool applicable = false;
  bool signal_ok = false;
  bool diag_residual_ok = false;
  bool offdiag_ok = false;
};

StepMonitor ostd_step_monitor(const VMatrix& current, const VMatrix& next,
                              const OSTDProblem& problem, double eta);

// ||T_U - T*||_F^2 via the Gram identity; equals 2 * ostd_loss.
double ostd_tensor_error(const OSTDState& state, const OSTDProblem& problem);

// Gradient of the i-th diagonal coefficient with respect to U; column j is
// l V_ji^{l-1} z_i.
Eigen::MatrixXd ostd_signal_gradient(const VMatrix& v, const OSTDProblem& problem,
                                     Eigen::Index i);
double ostd_signal_gradient_norm(const VMatrix& v, const OSTDProblem& problem, Eigen::Index i);

using OSTDObserver = std::function<void(std::size_t, const OSTDState&, const VMatrix&)>;

// Tracked columns: the r diagonal coefficients sum_j V_ji^l, the off-diagonal
// level V(t), and the largest diagonal residual |v_jj|, j > r. Error column
// is the squared tensor distance. The observer, when set, sees every iterate.
CoefficientTrajectory run_ostd(const OSTDProblem& problem, double alpha, double gamma_align,
                               double eta, std::size_t iterations, std::uint64_t seed,
                               std::size_t record_every = 1, const OSTDObserver& observe = {});

}  // namespace basislab
