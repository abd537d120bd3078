#pragma once

#include <limits>
#include <vector>

#include "gridpop/raster.hpp"

namespace gridpop {

/// Per-tile values aligned to TileGrid ids; NaN marks "no value".
using TileValues = std::vector<double>;

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();
inline bool has_value(double v) { return !std::isnan(v); }

/// Mean of the non-nodata raster cells whose centers fall inside each tile.
TileValues resample_average(const Raster& raster, const TileGrid& grid);

/// Value of the raster cell containing each tile center; nodata propagates.
TileValues resample_nearest(const Raster& raster, const TileGrid& grid);

/// 1 if any contributing cell is 1, else 0; nodata cells count as 0.
/// Raster must be strictly finer than the grid and hold only {0, 1, nodata}.
TileValues resample_any(const Raster& raster, const TileGrid& grid);

}  // namespace gridpop
