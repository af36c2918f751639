#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "basislab/config.hpp"
#include "basislab/diagnostics.hpp"
#include "basislab/trajectory.hpp"

namespace basislab {

struct RunSummary {
  double final_loss = 0.0;
  double final_error = 0.0;
  std::vector<double> thresholds;
  // crossing_times[threshold][signal], in iteration numbers
  std::vector<std::vector<std::optional<std::size_t>>> crossing_times;
  double independence_score_max = 0.0;
  std::vector<DominanceFit> dominance_per_signal;
  std::size_t monitor_steps_checked = 0;
  std::size_t monitor_steps_passed = 0;
  double coupling_ratio_max = 0.0;
  double wall_time_seconds = 0.0;
};

struct ExperimentResult {
  CoefficientTrajectory trajectory;
  RunSummary summary;
};

// Dispatches on cfg.kind, runs the experiment, writes the trajectory CSV to
// cfg.output_path when set, and assembles the summary. Deterministic given
// (config, seed).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace basislab
