#include "basislab/ack_projection.hpp"

#include <cmath>

#include "basislab/errors.hpp"
#include "basislab/random.hpp"

namespace basislab {

namespace {

void check_snapshot(const FeatureSnapshot& snap) {
  if (snap.W.rows() < 1 || snap.W.cols() < 1 || snap.Psi.rows() < 1 || snap.Psi.cols() < 1) {
    throw InputError("feature snapshot: W and Psi must be non-empty");
  }
  if (snap.W.cols() != snap.Psi.rows()) {
    throw InputError("feature snapshot: W columns must match Psi rows");
  }
  if (!snap.W.allFinite() || !snap.Psi.allFinite()) {
    throw InputError("feature snapshot: entries must be finite");
  }
}

// Flip a singular pair so the largest-magnitude entry of `primary` is
// positive; the first maximal entry breaks ties.
void orient_pair(Eigen::Ref<Eigen::VectorXd> primary, Eigen::Ref<Eigen::VectorXd> partner) {
  Eigen::Index at = 0;
  primary.cwiseAbs().maxCoeff(&at);
  if (primary(at) < 0.0) {
    primary = -primary;
    partner = -partner;
  }
}

}  // namespace

AckBasis build_ack_basis(const FeatureSnapshot& final_snapshot, double rank_tol) {
  check_snapshot(final_snapshot);
  if (!(rank_tol >= 0.0)) {
    throw InputError("build_ack_basis: rank_tol must be >= 0");
  }
  const Eigen::Index n = final_snapshot.Psi.cols();

  Eigen::JacobiSVD<Eigen::MatrixXd> feature_svd(final_snapshot.Psi,
                                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& spectrum = feature_svd.singularValues();
  if (spectrum.size() == 0 || !(spectrum(0) > 0.0)) {
    throw InputError("build_ack_basis: feature matrix is zero, basis is empty");
  }
  Eigen::Index rho = 0;
  while (rho < spectrum.size() && spectrum(rho) > rank_tol * spectrum(0)) {
    ++rho;
  }

  Eigen::MatrixXd u_psi = feature_svd.matrixU().leftCols(rho);
  Eigen::MatrixXd v_right = feature_svd.matrixV().leftCols(rho);
  for (Eigen::Index j = 0; j < rho; ++j) {
    orient_pair(v_right.col(j), u_psi.col(j));
  }

  const double normalization = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd w_normalized =
      (final_snapshot.W * u_psi * spectrum.head(rho).asDiagonal()) / normalization;

  Eigen::JacobiSVD<Eigen::MatrixXd> layer_svd(w_normalized,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u_layer = layer_svd.matrixU();
  Eigen::MatrixXd v_layer = layer_svd.matrixV();

  AckBasis basis;
  basis.V_right = std::move(v_right);
  basis.n_samples = static_cast<std::size_t>(n);
  basis.normalization = normalization;
  basis.feature_dim = final_snapshot.Psi.rows();
  basis.triplets.reserve(static_cast<std::size_t>(layer_svd.singularValues().size()));
  for (Eigen::Index i = 0; i < layer_svd.singularValues().size(); ++i) {
    orient_pair(u_layer.col(i), v_layer.col(i));
    basis.triplets.push_back(
        BasisTriplet{layer_svd.singularValues()(i), u_layer.col(i), v_layer.col(i)});
  }
  return basis;
}

SnapshotProjection project_snapshot(const FeatureSnapshot& snapshot, const AckBasis& basis) {
  check_snapshot(snapshot);
  if (basis.triplets.empty()) {
    throw InputError("project_snapshot: basis is empty");
  }
  const Eigen::Index k = basis.triplets.front().u.size();
  if (snapshot.W.rows() != k) {
    throw InputError("project_snapshot: class count differs from the basis");
  }
  if (snapshot.Psi.cols() != static_cast<Eigen::Index>(basis.n_samples)) {
    throw InputError("project_snapshot: sample count differs from the basis");
  }
  if (snapshot.Psi.rows() != basis.feature_dim) {
    throw InputError("project_snapshot: feature dimension differs from the basis");
  }
  const Eigen::MatrixXd predictions = snapshot.W * snapshot.Psi;  // k x N
  const Eigen::MatrixXd w_normalized =
      (predictions * basis.V_right) / basis.normalization;  // k x rho

  SnapshotProjection out;
  out.coefficients.resize(static_cast<Eigen::Index>(basis.triplets.size()));
  for (std::size_t i = 0; i < basis.triplets.size(); ++i) {
    const BasisTriplet& triplet = basis.triplets[i];
    out.coefficients(static_cast<Eigen::Index>(i)) =
        triplet.u.dot(w_normalized * triplet.v);
  }
  out.outside_span = (predictions - predictions * basis.V_right * basis.V_right.transpose()).norm();
  return out;
}

std::vector<FeatureSnapshot> synth_linear_trajectory(const Eigen::MatrixXd& w0,
                                                     const Eigen::MatrixXd& w_star,
                                                     const Eigen::MatrixXd& psi,
                                                     std::size_t epochs, double eta) {
  if (w0.rows() != w_star.rows() || w0.cols() != w_star.cols() || w0.cols() != psi.rows()) {
    throw InputError("synth_linear_trajectory: dimension mismatch");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InputError("synth_linear_trajectory: eta must lie in (0, 1)");
  }
  const double n = static_cast<double>(psi.cols());
  const Eigen::MatrixXd covariance = psi * psi.transpose() / n;
  std::vector<FeatureSnapshot> snapshots;
  snapshots.reserve(epochs + 1);
  Eigen::MatrixXd w = w0;
  for (std::size_t epoch = 0;; ++epoch) {
    snapshots.push_back(FeatureSnapshot{w, psi, epoch});
    if (epoch == epochs) {
      break;
    }
    w -= eta * (w - w_star) * covariance;
  }
  return snapshots;
}

std::vector<FeatureSnapshot> synth_linear_trajectory(Eigen::Index k, Eigen::Index m,
                                                     Eigen::Index n, std::size_t epochs,
                                                     double eta, std::uint64_t seed) {
  if (k < 1 || m < 1 || n < 1) {
    throw InputError("synth_linear_trajectory: dimensions must be >= 1");
  }
  Rng rng(seed);
  const Eigen::MatrixXd psi = gaussian_matrix(m, n, rng);
  const Eigen::MatrixXd w_star = gaussian_matrix(k, m, rng);
  const Eigen::MatrixXd w0 = 0.05 * gaussian_matrix(k, m, rng);
  return synth_linear_trajectory(w0, w_star, psi, epochs, eta);
}

}  // namespace basislab
