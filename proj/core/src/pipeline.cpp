#include "gridpop/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "gridpop/footprint.hpp"
#include "gridpop/geo_io.hpp"
#include "gridpop/resample.hpp"
#include "gridpop/survey.hpp"

namespace gridpop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

TileValues resample_by_mode(const Raster& raster, const TileGrid& grid,
                            const std::string& mode) {
  if (mode == "average") return resample_average(raster, grid);
  if (mode == "nearest") return resample_nearest(raster, grid);
  if (mode == "any") return resample_any(raster, grid);
  throw invalid_argument("unknown resample mode '" + mode + "'");
}

Raster footprint_mask_for(const RunConfig& cfg, const TileGrid& grid) {
  const FootprintConfig& fp = *cfg.footprint;
  Raster mask;
  if (fp.mode == "dots") {
    DotAnnotationSet dots;
    dots.points = parse_points_csv(fp.path);
    dots.mean_building_area = fp.mean_building_area.at(grid.roi_label);
    const auto result = rasterize_dots(dots, fp.cell_size, grid);
    if (result.skipped > 0)
      std::cerr << "note: " << result.skipped << " dots outside ROI '" << grid.roi_label
                << "' skipped\n";
    mask = result.mask;
  } else if (fp.mode == "probability") {
    mask = threshold_mask(read_ascii_grid(fp.path), fp.threshold);
  } else {
    mask = read_ascii_grid(fp.path);
  }
  if (fp.min_area && fp.max_area) mask = filter_components(mask, *fp.min_area, *fp.max_area);
  return mask;
}

void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.output_dir); }

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

}  // namespace

AssembleResult build_roi_features(const RunConfig& cfg, const TileGrid& grid) {
  FeatureInputs inputs;

  if (cfg.footprint) {
    const Raster mask = footprint_mask_for(cfg, grid);
    inputs.building_area = area_per_tile(mask, grid);
  }
  if (!cfg.landsat_bands.empty()) {
    for (const auto& band : cfg.landsat_bands) {
      Raster r = read_ascii_grid(band.path);
      inputs.landsat_bands.emplace_back(band.name, resample_by_mode(r, grid, band.resample));
    }
    inputs.nir_band = cfg.nir_band;
    inputs.red_band = cfg.red_band;
    inputs.green_band = cfg.green_band;
  }
  if (cfg.hrsl)
    inputs.hrsl = resample_by_mode(read_ascii_grid(cfg.hrsl->path), grid, cfg.hrsl->resample);
  if (cfg.landcover) {
    inputs.landcover_codes =
        resample_by_mode(read_ascii_grid(cfg.landcover->path), grid, cfg.landcover->resample);
    inputs.landcover_scheme = cfg.landcover_scheme;
  }
  if (cfg.ntl)
    inputs.ntl = resample_by_mode(read_ascii_grid(cfg.ntl->path), grid, cfg.ntl->resample);
  if (cfg.roads_path)
    inputs.road_tiles = rasterize_lines(parse_lines_geojson(*cfg.roads_path), grid);

  return assemble_features(grid, inputs);
}

int run_validate(const RunConfig& cfg) {
  const auto problems = validate_config(cfg);
  if (problems.empty()) {
    std::cout << "configuration ok: " << cfg.grids.size() << " ROI grid(s), frame '" << cfg.frame
              << "'\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
  return 2;
}

int run_features(const RunConfig& cfg) {
  if (run_validate(cfg) != 0) return 2;
  ensure_out_dir(cfg);

  FeatureTable combined;
  int dropped = 0;
  for (const auto& grid : cfg.grids) {
    AssembleResult result = build_roi_features(cfg, grid);
    dropped += result.dropped_tiles;
    if (combined.cols.empty()) {
      combined = std::move(result.table);
    } else {
      if (combined.col_names != result.table.col_names)
        throw invalid_argument("feature columns differ between ROIs");
      combined.tiles.insert(combined.tiles.end(), result.table.tiles.begin(),
                            result.table.tiles.end());
      for (size_t c = 0; c < combined.cols.size(); ++c)
        combined.cols[c].insert(combined.cols[c].end(), result.table.cols[c].begin(),
                                result.table.cols[c].end());
    }
  }
  write_feature_csv(combined, out_path(cfg, "features.csv"));

  json manifest;
  manifest["columns"] = combined.col_names;
  manifest["column_count"] = combined.col_names.size();
  manifest["rows"] = combined.tiles.size();
  manifest["dropped_tiles"] = dropped;
  manifest["config"] = json::parse(cfg.raw_json);
  std::ofstream mf(out_path(cfg, "manifest.json"));
  mf << manifest.dump(2) << "\n";

  std::cout << "features: " << combined.tiles.size() << " tiles x " << combined.col_names.size()
            << " columns (" << dropped << " incomplete tiles dropped)\n";
  return 0;
}

namespace {

SurveyTable load_survey(const RunConfig& cfg) {
  const auto households = parse_points_csv(cfg.survey.households);
  const auto surveyed = parse_surveyed_tiles_csv(cfg.survey.surveyed_tiles);

  SurveyTable combined;
  std::vector<char> assigned(households.size(), 0);
  for (const auto& grid : cfg.grids) {
    std::vector<PointRecord> in_roi;
    for (size_t i = 0; i < households.size(); ++i)
      if (!assigned[i] && grid.tile_at(households[i].x, households[i].y)) {
        in_roi.push_back(households[i]);
        assigned[i] = 1;
      }
    std::vector<SurveyedTile> roi_tiles;
    for (const auto& st : surveyed)
      if (st.roi == grid.roi_label) roi_tiles.push_back(st);
    SurveyTable part = grid_population(in_roi, grid, roi_tiles);
    combined.rows.insert(combined.rows.end(), part.rows.begin(), part.rows.end());
  }
  for (size_t i = 0; i < households.size(); ++i)
    if (!assigned[i])
      throw invalid_argument("household outside every ROI grid: (" +
                             std::to_string(households[i].x) + ", " +
                             std::to_string(households[i].y) + ")");

  if (!cfg.survey.exclusions.empty()) {
    std::vector<TileRef> refs;
    for (auto& [ref, reason] : parse_exclusions_csv(cfg.survey.exclusions)) refs.push_back(ref);
    combined = apply_exclusions(std::move(combined), refs);
  }
  return combined;
}

}  // namespace

int run_train(const RunConfig& cfg) {
  if (run_validate(cfg) != 0) return 2;
  const std::string features_path = out_path(cfg, "features.csv");
  if (!fs::exists(features_path)) {
    std::cerr << "config error: missing " << features_path << " (run `gridpop features` first)\n";
    return 2;
  }
  ensure_out_dir(cfg);

  const FeatureTable features = read_feature_csv(features_path);
  const SurveyTable survey = load_survey(cfg);

  std::vector<std::pair<TileRef, std::pair<double, double>>> tiles;
  for (const auto& row : survey.active()) {
    const TileGrid* grid = cfg.grid_for(row.tile.roi);
    if (!grid) throw invalid_argument("survey ROI '" + row.tile.roi + "' has no grid");
    tiles.emplace_back(row.tile,
                       std::make_pair(grid->center_x(row.tile.id), grid->center_y(row.tile.id)));
  }
  const FoldAssignment folds = spatial_kfold(tiles, 4);
  const CvResult cv = nested_cv_train(features, survey, folds, cfg.hyper, cfg.seed);

  for (const auto& model : cv.fold_models) {
    std::ofstream out(out_path(cfg, "model_fold" + std::to_string(model.fold) + ".json"));
    out << model.to_json() << "\n";
  }
  write_pooled_csv(cv.pooled, out_path(cfg, "pooled.csv"));
  std::cout << "train: " << cv.fold_models.size() << " fold models, " << cv.pooled.size()
            << " pooled predictions\n";
  return 0;
}

int run_evaluate(const RunConfig& cfg) {
  const std::string pooled_path = out_path(cfg, "pooled.csv");
  if (!fs::exists(pooled_path)) {
    std::cerr << "config error: missing " << pooled_path << " (run `gridpop train` first)\n";
    return 2;
  }
  ensure_out_dir(cfg);

  const auto pooled = read_pooled_csv(pooled_path);
  const MetricsReport report = pooled_report(pooled);

  json j = json::parse(report_to_json(report));
  j["config"] = json::parse(cfg.raw_json);
  std::ofstream rf(out_path(cfg, "report.json"));
  rf << j.dump(2) << "\n";

  {
    std::ofstream pv(out_path(cfg, "predicted_vs_observed.csv"));
    pv << "tile_id,roi,observed,predicted\n";
    char buf[40];
    for (const auto& r : pooled) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.predicted);
      pv << r.tile.id << ',' << r.tile.roi << ',' << static_cast<long>(r.observed) << ',' << buf
         << "\n";
    }
  }
  write_scatter_svg(pooled, out_path(cfg, "scatter.svg"));

  std::cout << "model:      R2=" << report.model.r2 << " MeAPE=" << report.model.meape_pct
            << "% aMeAPE=" << report.model.ameape << " MeAE=" << report.model.meae
            << " AggPE=" << report.model.aggpe_pct.at("overall") << "%\n";
  std::cout << "null model: R2=" << report.null_model.r2
            << " MeAPE=" << report.null_model.meape_pct << "% aMeAPE=" << report.null_model.ameape
            << " MeAE=" << report.null_model.meae
            << " AggPE=" << report.null_model.aggpe_pct.at("overall") << "%\n";
  return 0;
}

int run_predict(const RunConfig& cfg, const std::string& model_path, const std::string& roi) {
  if (run_validate(cfg) != 0) return 2;
  if (!fs::exists(model_path)) {
    std::cerr << "config error: missing model file: " << model_path << "\n";
    return 2;
  }
  const TileGrid* grid = cfg.grid_for(roi);
  if (!grid) {
    std::cerr << "config error: unknown ROI '" << roi << "'\n";
    return 2;
  }
  ensure_out_dir(cfg);

  std::ifstream mf(model_path);
  std::string text((std::istreambuf_iterator<char>(mf)), std::istreambuf_iterator<char>());
  const FittedModel model = FittedModel::from_json(text);

  const AssembleResult features = build_roi_features(cfg, *grid);

  Raster out;
  out.width = grid->n_cols;
  out.height = grid->n_rows;
  out.origin_x = grid->origin_x;
  out.origin_y = grid->origin_y;
  out.cell_size = grid->tile_size;
  out.nodata = -9999.0;
  out.band_name = "predicted_count";
  out.values.assign(static_cast<size_t>(grid->tile_count()), -9999.0);

  for (size_t i = 0; i < features.table.tiles.size(); ++i) {
    std::map<std::string, double> row;
    for (size_t c = 0; c < features.table.cols.size(); ++c)
      row[features.table.col_names[c]] = features.table.cols[c][i];
    out.values[features.table.tiles[i].id] = model.predict_count(row);
  }
  const std::string path = out_path(cfg, "predicted_" + roi + ".asc");
  write_ascii_grid(out, path);
  write_band_sidecar(path, {"predicted_count", cfg.frame, "continuous"});
  std::cout << "predict: wrote " << path << "\n";
  return 0;
}

}  // namespace gridpop
