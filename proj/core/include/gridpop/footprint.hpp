#pragma once

#include <vector>

#include "gridpop/geo_io.hpp"
#include "gridpop/raster.hpp"

namespace gridpop {

/// Building dots for one ROI plus the ROI's average building area.
struct DotAnnotationSet {
  std::vector<PointRecord> points;
  double mean_building_area = 0.0;  // m^2, > 0
};

struct RasterizeDotsResult {
  Raster mask;      // binary, fine resolution
  int skipped = 0;  // dots outside the extent
};

/// Union of discs of radius sqrt(mean_building_area / pi) around each dot;
/// a fine cell is set iff its center lies within the radius of some dot.
/// Dots outside the grid extent are skipped and counted.
RasterizeDotsResult rasterize_dots(const DotAnnotationSet& dots, double cell_size,
                                   const TileGrid& extent);

/// cell = 1 iff probability >= t; nodata becomes 0.
Raster threshold_mask(const Raster& probabilities, double t);

/// Erases 8-connected components whose area falls outside
/// [min_area, max_area] (inclusive bounds).
Raster filter_components(const Raster& mask, double min_area, double max_area);

/// Set-cell area per tile: count of set cell centers in the tile times
/// cell_size^2. Tiles receiving no set cell get 0.
std::vector<double> area_per_tile(const Raster& mask, const TileGrid& grid);

}  // namespace gridpop
