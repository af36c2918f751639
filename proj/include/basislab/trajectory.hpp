#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace basislab {

/// Per-iteration record of basis coefficients plus loss/error columns.
/// Invariants: steps strictly increasing, every coefficient vector matches
/// the label count, loss and error finite and non-negative.
struct CoefficientTrajectory {
  std::vector<std::string> labels;
  std::vector<std::size_t> steps;
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<double> loss;
  std::vector<double> error;

  std::size_t size() const { return steps.size(); }

  void append(std::size_t step, const Eigen::VectorXd& coeffs, double loss_value,
              double error_value);
  void validate() const;
};

/// First recorded step at which coefficient i reaches fraction * targets[i].
/// Indices whose target is exactly zero are reported absent.
std::vector<std::optional<std::size_t>> crossing_times(const CoefficientTrajectory& traj,
                                                       const Eigen::VectorXd& targets,
                                                       double fraction);

}  // namespace basislab
