#include "basislab/random.hpp"

#include <cmath>
#include <numbers>

namespace basislab {

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi_v<double> * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.gaussian();
    }
  }
  return m;
}

Eigen::VectorXd gaussian_vector(Eigen::Index size, Rng& rng) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = rng.gaussian();
  }
  return v;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index d, Rng& rng) {
  const Eigen::MatrixXd a = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (diag(j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

}  // namespace basislab
