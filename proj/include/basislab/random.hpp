#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace basislab {

/// Seedable source of uniforms and gaussians.
///
/// mt19937_64 has a fully specified output sequence and the Box-Muller
/// transform below avoids the implementation-defined
/// std::normal_distribution, so a seed pins the exact stream of draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one spare value is cached.
  double gaussian();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Entries drawn row by row.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

Eigen::VectorXd gaussian_vector(Eigen::Index size, Rng& rng);

// Q factor of a gaussian matrix, column signs fixed so the result is a
// deterministic function of the draw.
Eigen::MatrixXd random_orthonormal(Eigen::Index d, Rng& rng);

}  // namespace basislab
