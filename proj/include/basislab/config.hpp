#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace basislab {

enum class ExperimentKind { kKernelRegression, kMatrixFactorization, kTensorDecomposition, kLogistic, kAckSynthetic };

std::string kind_name(ExperimentKind kind);

/// One experiment, fully determined by this struct plus nothing else.
/// `sigma` carries the nonzero true coefficients (signal values) for
/// kr/smf/ostd and the single attractor for the logistic kind.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kKernelRegression;
  Eigen::Index d = 0;
  Eigen::Index r_over = 0;
  int order_l = 0;
  Eigen::VectorXd sigma;
  double alpha = 0.0;
  double gamma_align = 0.0;
  double eta = 0.0;
  std::size_t max_iters = 0;
  std::uint64_t seed = 0;
  std::vector<double> thresholds{0.5, 0.99};
  std::size_t record_every = 1;
  std::string output_path;
  // ack-synthetic dimensions
  Eigen::Index classes = 0;
  Eigen::Index features = 0;
  Eigen::Index samples = 0;
};

// Strict JSON schema: unknown keys are rejected, kind-specific required keys
// enforced, errors name the offending key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace basislab
