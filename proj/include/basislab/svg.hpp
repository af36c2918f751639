#pragma once

#include <filesystem>

#include "basislab/trajectory.hpp"

namespace basislab {

struct SvgOptions {
  bool log_y = false;  // log10 axis; non-positive values are clipped
  int width = 960;
  int height = 540;
};

// Standalone SVG line plot, one polyline per tracked coefficient. Purely
// presentational.
void emit_svg(const CoefficientTrajectory& traj, const std::filesystem::path& path,
              const SvgOptions& options = {});

}  // namespace basislab
