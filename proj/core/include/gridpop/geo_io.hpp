#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridpop/raster.hpp"

namespace gridpop {

/// A point feature with arbitrary named attributes (kept as text; use
/// numeric_attr for columns that must parse as numbers).
struct PointRecord {
  double x = 0.0;
  double y = 0.0;
  std::map<std::string, std::string> attrs;

  std::optional<double> numeric_attr(const std::string& name) const;
};

struct Polyline {
  std::vector<std::pair<double, double>> vertices;  // >= 2
  std::string tag;  // road class; parsed but unused by the model
};

struct PolylineSet {
  std::vector<Polyline> lines;
};

/// CSV with a header row; `x` and `y` columns are mandatory, everything
/// else becomes an attribute.
std::vector<PointRecord> parse_points_csv(const std::string& path);

/// Minimal GeoJSON subset: FeatureCollection of LineString /
/// MultiLineString features, coordinates in meters of the shared frame.
PolylineSet parse_lines_geojson(const std::string& path);

/// Boolean road raster on the tile grid: a tile is 1 iff some segment
/// touches its closed box (supercover; diagonal lines cannot skip tiles).
std::vector<uint8_t> rasterize_lines(const PolylineSet& lines, const TileGrid& grid);

}  // namespace gridpop
