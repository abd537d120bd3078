#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridpop/raster.hpp"
#include "gridpop/resample.hpp"

namespace gridpop {

/// Globally unique tile handle: ids are only unique within one ROI grid.
struct TileRef {
  std::string roi;
  int id = 0;
  auto operator<=>(const TileRef&) const = default;
};

/// Per-tile named numeric columns. Rows are tiles, all columns aligned.
struct FeatureTable {
  std::vector<TileRef> tiles;
  std::vector<std::string> col_names;
  std::vector<std::vector<double>> cols;
  std::vector<bool> contextable;       // per column; distance to road is not
  std::vector<std::string> provenance; // per column source note

  size_t n_rows() const { return tiles.size(); }
  size_t n_cols() const { return cols.size(); }
  int col_index(const std::string& name) const;  // -1 if absent
  void add_column(std::string name, std::vector<double> values, bool ctx, std::string note);
  void validate() const;
};

/// Raw land-cover code -> retained class name or "ignored".
struct LandCoverScheme {
  std::map<int, std::string> mapping;
  std::vector<std::string> retained;  // exactly 5, fixed column order

  void validate() const;
};

/// (nir - red) / (nir + red), 0 where the denominator is 0.
std::vector<double> ndvi(const std::vector<double>& nir, const std::vector<double>& red);
/// (green - nir) / (green + nir), 0 where the denominator is 0.
std::vector<double> ndwi(const std::vector<double>& green, const std::vector<double>& nir);

/// One binary column per retained class. Codes mapped "ignored" are an
/// error listing the offending tile ids.
std::vector<std::pair<std::string, std::vector<double>>> onehot_landcover(
    const std::vector<double>& codes, const LandCoverScheme& scheme);

/// Exact Euclidean distance (meters, between tile centers) from every tile
/// to the nearest road tile. Two-pass squared-distance transform.
std::vector<double> distance_to_road(const std::vector<uint8_t>& road_tiles, const TileGrid& grid);

/// Appends `<c>_ctx8` and `<c>_ctx24` columns for every contextable column:
/// mean over the 3x3 / 5x5 neighborhood minus the center. Neighbors outside
/// the grid or missing from the table are skipped; a tile with no available
/// neighbor keeps its own value.
FeatureTable context_features(const FeatureTable& table, const TileGrid& grid,
                              bool ring8 = true, bool ring24 = true);

/// Everything assemble_features can consume; absent optionals mean the
/// source is disabled for this run.
struct FeatureInputs {
  std::optional<TileValues> building_area;
  std::vector<std::pair<std::string, TileValues>> landsat_bands;  // 10 when enabled
  std::string nir_band, red_band, green_band;                     // roles for the indices
  std::optional<TileValues> hrsl;
  std::optional<TileValues> landcover_codes;
  std::optional<LandCoverScheme> landcover_scheme;
  std::optional<TileValues> ntl;
  std::optional<std::vector<uint8_t>> road_tiles;
};

struct AssembleResult {
  FeatureTable table;
  int dropped_tiles = 0;  // rows removed for incomplete data
};

/// Fixed column order: building_area, landsat bands + ndvi + ndwi, hrsl,
/// land-cover one-hot, ntl, dist_road, then the ctx8 block, then ctx24.
AssembleResult assemble_features(const TileGrid& grid, const FeatureInputs& inputs);

void write_feature_csv(const FeatureTable& table, const std::string& path);
FeatureTable read_feature_csv(const std::string& path);

}  // namespace gridpop
