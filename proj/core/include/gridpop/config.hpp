#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridpop/features.hpp"
#include "gridpop/raster.hpp"
#include "gridpop/regression.hpp"

namespace gridpop {

struct RasterSource {
  std::string name;
  std::string path;
  std::string resample;  // "average" | "nearest" | "any"
};

struct FootprintConfig {
  std::string mode;  // "dots" | "probability" | "mask"
  std::string path;
  std::map<std::string, double> mean_building_area;  // per ROI, dots mode
  double cell_size = 0.5;                            // dots mode
  double threshold = 0.5;                            // probability mode
  std::optional<double> min_area, max_area;          // component filter, m^2
};

struct SurveyConfig {
  std::string households;
  std::string surveyed_tiles;
  std::string exclusions;  // optional, may be empty
};

/// One JSON file describes a whole run; every command takes the same file.
struct RunConfig {
  std::string frame;
  std::string output_dir;
  unsigned seed = 17;
  std::vector<TileGrid> grids;  // one per ROI

  std::vector<RasterSource> landsat_bands;
  std::string nir_band, red_band, green_band;
  std::optional<RasterSource> hrsl;
  std::optional<RasterSource> landcover;
  std::optional<LandCoverScheme> landcover_scheme;
  std::optional<RasterSource> ntl;
  std::optional<std::string> roads_path;
  std::optional<FootprintConfig> footprint;

  SurveyConfig survey;
  ModelHyperparams hyper;

  std::string raw_json;  // original file text, echoed into outputs

  const TileGrid* grid_for(const std::string& roi) const;
};

RunConfig load_config(const std::string& path);

/// Structural checks: referenced files exist, frames are consistent, grids
/// are well formed. Returns human-readable problem descriptions.
std::vector<std::string> validate_config(const RunConfig& config);

}  // namespace gridpop
