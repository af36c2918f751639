#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace basislab {

/// Last linear layer W (k x m) together with the feature map evaluated on N
/// inputs, Psi (m x N).
struct FeatureSnapshot {
  Eigen::MatrixXd W;
  Eigen::MatrixXd Psi;
  std::size_t epoch = 0;
};

struct BasisTriplet {
  double s;           // singular value of the normalized last layer
  Eigen::VectorXd u;  // length k
  Eigen::VectorXd v;  // length rho
};

/// Orthonormal basis extracted from a final-epoch snapshot via two SVDs.
///
/// The empirical expectation convention is E[g] = (1/N) sum_n g(x_n); the
/// sqrt(N) factor recorded in `normalization` is folded into the normalized
/// last layer so that E[<phi_i, phi_j>] equals the Kronecker delta exactly.
struct AckBasis {
  Eigen::MatrixXd V_right;  // N x rho, retained right singular vectors of Psi
  std::vector<BasisTriplet> triplets;
  std::size_t n_samples = 0;
  double normalization = 0.0;
  Eigen::Index feature_dim = 0;
};

// SVD of Psi, retain singular values above rank_tol * largest, normalize
// W U Sigma by 1/sqrt(N), SVD again. Left vectors are oriented so their
// largest-magnitude entry is positive, which makes rebuilds bitwise
// reproducible. The singular values s_i are the basis coefficients of the
// defining snapshot itself.
AckBasis build_ack_basis(const FeatureSnapshot& final_snapshot, double rank_tol = 1e-12);

struct SnapshotProjection {
  Eigen::VectorXd coefficients;  // beta_i = <W_t~, u_i v_i^T>
  double outside_span;           // ||F_t - P_V F_t||_F, the discarded remainder
};

SnapshotProjection project_snapshot(const FeatureSnapshot& snapshot, const AckBasis& basis);

// Synthetic stand-in for a training run: a fixed random feature matrix, a
// random target layer W*, and GD on 0.5/N ||(W - W*) Psi||_F^2 from a small
// random W_0. Returns epochs + 1 snapshots.
std::vector<FeatureSnapshot> synth_linear_trajectory(Eigen::Index k, Eigen::Index m,
                                                     Eigen::Index n, std::size_t epochs,
                                                     double eta, std::uint64_t seed);

std::vector<FeatureSnapshot> synth_linear_trajectory(const Eigen::MatrixXd& w0,
                                                     const Eigen::MatrixXd& w_star,
                                                     const Eigen::MatrixXd& psi,
                                                     std::size_t epochs, double eta);

}  // namespace basislab
