#pragma once

#include <filesystem>

#include "basislab/trajectory.hpp"

namespace basislab {

// Header `iter,<label_1>,...,<label_n>,loss,error`, one row per recorded
// step, doubles printed with 17 significant digits so the round trip is
// exact. Writes go to a temporary sibling first, then rename into place.
void emit_csv(const CoefficientTrajectory& traj, const std::filesystem::path& path);

CoefficientTrajectory read_csv(const std::filesystem::path& path);

}  // namespace basislab
