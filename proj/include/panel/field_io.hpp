#pragma once

#include <filesystem>
#include <string>

#include "panel/grid.hpp"
#include "panel/history.hpp"

namespace panel {

/// Writes `base.bin` (little-endian float64, row-major with x fastest) and
/// `base.json` (grid, dtype, ordering, BC tag, time).
void write_field(const std::filesystem::path& base, const PlateField& f, double t = 0.0);

/// Reads a field written by write_field. Throws ConfigError on a malformed header
/// or a size mismatch.
PlateField read_field(const std::filesystem::path& base);

/// Everything needed to continue a run bit for bit.
struct Checkpoint {
  explicit Checkpoint(const Grid& g) : state(PlateState::zero(g)) {}
  PlateState state;
  HistoryBuffer history;
  double diss_cum = 0.0;
  double balance_cum = 0.0;  ///< running sum of per-step balance residuals
  long step = 0;
};

/// `base.json` header plus `base.bin` holding (u, v) of every history snapshot.
void write_checkpoint(const std::filesystem::path& base, const PlateState& state,
                      const HistoryBuffer& history, double diss_cum, double balance_cum,
                      long step);
Checkpoint read_checkpoint(const std::filesystem::path& base);

}  // namespace panel
