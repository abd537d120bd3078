#pragma once

#include <string>
#include <vector>

#include "gridpop/features.hpp"
#include "gridpop/geo_io.hpp"
#include "gridpop/raster.hpp"

namespace gridpop {

struct SurveyRow {
  TileRef tile;
  long observed = 0;  // persons
  std::string psu;
  bool excluded = false;
};

struct SurveyTable {
  std::vector<SurveyRow> rows;

  std::vector<SurveyRow> active() const;  // non-excluded rows
};

/// A tile known to be fully surveyed; such tiles become 0-count rows even
/// when no household falls in them.
struct SurveyedTile {
  int tile_id = 0;
  std::string roi;
  std::string psu;
};

/// Sum of the `persons` attribute per tile. Rows are the surveyed-tile list
/// plus any tile that actually contains households. Households outside the
/// grid are an error listing the offending points.
SurveyTable grid_population(const std::vector<PointRecord>& households, const TileGrid& grid,
                            const std::vector<SurveyedTile>& surveyed);

/// Flags the listed tiles as excluded; every id must exist in the table.
/// A ref with an empty roi matches the id in any ROI.
SurveyTable apply_exclusions(SurveyTable table, const std::vector<TileRef>& exclusion_ids);

/// Surveyed-tiles CSV: tile_id,roi[,psu]
std::vector<SurveyedTile> parse_surveyed_tiles_csv(const std::string& path);

/// Exclusions CSV: tile_id,reason[,roi]; when roi is omitted the id applies
/// to whichever ROI contains it.
std::vector<std::pair<TileRef, std::string>> parse_exclusions_csv(const std::string& path);

}  // namespace gridpop
