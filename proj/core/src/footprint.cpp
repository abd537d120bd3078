#include "gridpop/footprint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gridpop {

RasterizeDotsResult rasterize_dots(const DotAnnotationSet& dots, double cell_size,
                                   const TileGrid& extent) {
  extent.validate();
  if (!(dots.mean_building_area > 0.0))
    throw invalid_argument("mean_building_area must be > 0");
  if (!(cell_size > 0.0) || cell_size > 1.0)
    throw invalid_argument("dot rasterization requires cell_size in (0, 1] m");

  RasterizeDotsResult result;
  Raster& mask = result.mask;
  mask.cell_size = cell_size;
  mask.origin_x = extent.min_x();
  mask.origin_y = extent.max_y();
  mask.width = static_cast<int>(std::llround((extent.max_x() - extent.min_x()) / cell_size));
  mask.height = static_cast<int>(std::llround((extent.max_y() - extent.min_y()) / cell_size));
  mask.band_name = "footprint";
  mask.values.assign(static_cast<size_t>(mask.width) * mask.height, 0.0);

  const double r = std::sqrt(dots.mean_building_area / std::numbers::pi);
  const double r2 = r * r;
  for (const auto& dot : dots.points) {
    if (!extent.tile_at(dot.x, dot.y)) {
      ++result.skipped;
      continue;
    }
    const int c0 = std::max(0, static_cast<int>(std::floor((dot.x - r - mask.origin_x) / cell_size)));
    const int c1 = std::min(mask.width - 1,
                            static_cast<int>(std::floor((dot.x + r - mask.origin_x) / cell_size)));
    const int r0 = std::max(0, static_cast<int>(std::floor((mask.origin_y - dot.y - r) / cell_size)));
    const int r1 = std::min(mask.height - 1,
                            static_cast<int>(std::floor((mask.origin_y - dot.y + r) / cell_size)));
    for (int row = r0; row <= r1; ++row) {
      const double dy = mask.cell_center_y(row) - dot.y;
      for (int col = c0; col <= c1; ++col) {
        const double dx = mask.cell_center_x(col) - dot.x;
        if (dx * dx + dy * dy <= r2) mask.at(row, col) = 1.0;
      }
    }
  }
  return result;
}

Raster threshold_mask(const Raster& probabilities, double t) {
  probabilities.validate();
  if (!(t > 0.0 && t < 1.0)) throw invalid_argument("threshold must be in (0, 1)");
  Raster mask = probabilities;
  for (auto& v : mask.values) {
    if (mask.is_nodata(v)) {
      v = 0.0;
    } else {
      if (v < 0.0 || v > 1.0)
        throw invalid_argument("probability out of [0, 1]: " + std::to_string(v));
      v = v >= t ? 1.0 : 0.0;
    }
  }
  return mask;
}

Raster filter_components(const Raster& mask, double min_area, double max_area) {
  mask.validate();
  if (!(min_area < max_area)) throw invalid_argument("min_area must be < max_area");
  Raster out = mask;
  const int w = mask.width, h = mask.height;
  const double px_area = mask.cell_size * mask.cell_size;
  std::vector<char> visited(static_cast<size_t>(w) * h, 0);
  std::vector<int> stack, component;

  auto set_at = [&](int idx) {
    const double v = mask.values[idx];
    return !mask.is_nodata(v) && v == 1.0;
  };

  for (int start = 0; start < w * h; ++start) {
    if (visited[start] || !set_at(start)) continue;
    component.clear();
    stack.assign(1, start);
    visited[start] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      component.push_back(idx);
      const int row = idx / w, col = idx % w;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = row + dr, nc = col + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const int nidx = nr * w + nc;
          if (!visited[nidx] && set_at(nidx)) {
            visited[nidx] = 1;
            stack.push_back(nidx);
          }
        }
      }
    }
    const double area = component.size() * px_area;
    if (area < min_area || area > max_area)
      for (int idx : component) out.values[idx] = 0.0;
  }
  return out;
}

std::vector<double> area_per_tile(const Raster& mask, const TileGrid& grid) {
  mask.validate();
  grid.validate();
  std::vector<double> out(grid.tile_count(), 0.0);
  const double px_area = mask.cell_size * mask.cell_size;
  for (int row = 0; row < mask.height; ++row) {
    const double cy = mask.cell_center_y(row);
    for (int col = 0; col < mask.width; ++col) {
      const double v = mask.at(row, col);
      if (mask.is_nodata(v) || v != 1.0) continue;
      const auto id = grid.tile_at(mask.cell_center_x(col), cy);
      if (id) out[*id] += px_area;
    }
  }
  return out;
}

}  // namespace gridpop
