#include "gridpop/resample.hpp"

#include <algorithm>

namespace gridpop {

namespace {

void require_overlap(const Raster& raster, const TileGrid& grid) {
  const bool x_ok = raster.min_x() < grid.max_x() && grid.min_x() < raster.max_x();
  const bool y_ok = raster.min_y() < grid.max_y() && grid.min_y() < raster.max_y();
  if (!x_ok || !y_ok) throw invalid_argument("raster and grid do not overlap spatially");
}

}  // namespace

TileValues resample_average(const Raster& raster, const TileGrid& grid) {
  raster.validate();
  grid.validate();
  require_overlap(raster, grid);
  std::vector<double> sum(grid.tile_count(), 0.0);
  std::vector<int> count(grid.tile_count(), 0);
  for (int row = 0; row < raster.height; ++row) {
    const double cy = raster.cell_center_y(row);
    for (int col = 0; col < raster.width; ++col) {
      const double v = raster.at(row, col);
      if (raster.is_nodata(v)) continue;
      const auto id = grid.tile_at(raster.cell_center_x(col), cy);
      if (!id) continue;
      sum[*id] += v;
      ++count[*id];
    }
  }
  TileValues out(grid.tile_count(), kNoValue);
  for (int i = 0; i < grid.tile_count(); ++i)
    if (count[i] > 0) out[i] = sum[i] / count[i];
  return out;
}

TileValues resample_nearest(const Raster& raster, const TileGrid& grid) {
  raster.validate();
  grid.validate();
  require_overlap(raster, grid);
  TileValues out(grid.tile_count(), kNoValue);
  for (int i = 0; i < grid.tile_count(); ++i) {
    const auto cell = raster.cell_at(grid.center_x(i), grid.center_y(i));
    if (!cell) continue;
    const double v = raster.at(cell->first, cell->second);
    if (!raster.is_nodata(v)) out[i] = v;
  }
  return out;
}

TileValues resample_any(const Raster& raster, const TileGrid& grid) {
  raster.validate();
  grid.validate();
  require_overlap(raster, grid);
  if (!(raster.cell_size < grid.tile_size))
    throw invalid_argument("resample_any requires raster cells finer than the tile size");
  for (double v : raster.values)
    if (!raster.is_nodata(v) && v != 0.0 && v != 1.0)
      throw invalid_argument("resample_any input must contain only {0, 1, nodata} values");

  std::vector<int> count(grid.tile_count(), 0);
  std::vector<char> any(grid.tile_count(), 0);
  for (int row = 0; row < raster.height; ++row) {
    const double cy = raster.cell_center_y(row);
    for (int col = 0; col < raster.width; ++col) {
      const auto id = grid.tile_at(raster.cell_center_x(col), cy);
      if (!id) continue;
      const double v = raster.at(row, col);
      if (raster.is_nodata(v)) continue;  // counts as 0 only alongside real cells
      ++count[*id];
      if (v == 1.0) any[*id] = 1;
    }
  }
  TileValues out(grid.tile_count(), kNoValue);
  for (int i = 0; i < grid.tile_count(); ++i)
    if (count[i] > 0) out[i] = any[i] ? 1.0 : 0.0;
  return out;
}

}  // namespace gridpop
