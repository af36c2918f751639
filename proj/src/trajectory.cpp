#include "basislab/trajectory.hpp"

#include <cmath>

#include "basislab/errors.hpp"

namespace basislab {

void CoefficientTrajectory::append(std::size_t step, const Eigen::VectorXd& coeffs,
                                   double loss_value, double error_value) {
  if (coeffs.size() != static_cast<Eigen::Index>(labels.size())) {
    throw InputError("trajectory: coefficient count does not match label count");
  }
  if (!steps.empty() && step <= steps.back()) {
    throw InputError("trajectory: steps must be strictly increasing");
  }
  if (!std::isfinite(loss_value) || loss_value < 0.0) {
    throw InputError("trajectory: loss must be finite and >= 0");
  }
  if (!std::isfinite(error_value) || error_value < 0.0) {
    throw InputError("trajectory: error must be finite and >= 0");
  }
  steps.push_back(step);
  coefficients.push_back(coeffs);
  loss.push_back(loss_value);
  error.push_back(error_value);
}

void CoefficientTrajectory::validate() const {
  const std::size_t n = steps.size();
  if (coefficients.size() != n || loss.size() != n || error.size() != n) {
    throw InputError("trajectory: column lengths differ");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (coefficients[t].size() != static_cast<Eigen::Index>(labels.size())) {
      throw InputError("trajectory: coefficient count does not match label count");
    }
    if (t > 0 && steps[t] <= steps[t - 1]) {
      throw InputError("trajectory: steps must be strictly increasing");
    }
    if (!std::isfinite(loss[t]) || loss[t] < 0.0 || !std::isfinite(error[t]) || error[t] < 0.0) {
      throw InputError("trajectory: loss/error must be finite and >= 0");
    }
  }
}

std::vector<std::optional<std::size_t>> crossing_times(const CoefficientTrajectory& traj,
                                                       const Eigen::VectorXd& targets,
                                                       double fraction) {
  traj.validate();
  if (targets.size() != static_cast<Eigen::Index>(traj.labels.size())) {
    throw InputError("crossing_times: target count does not match coefficient count");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw InputError("crossing_times: fraction must lie in (0, 1]");
  }
  std::vector<std::optional<std::size_t>> out(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (targets(i) == 0.0) {
      continue;  // no meaningful threshold
    }
    const double threshold = fraction * targets(i);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      if (traj.coefficients[t](i) >= threshold) {
        out[i] = traj.steps[t];
        break;
      }
    }
  }
  return out;
}

}  // namespace basislab
