#include "gridpop/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gridpop {

namespace fs = std::filesystem;
using nlohmann::json;

const TileGrid* RunConfig::grid_for(const std::string& roi) const {
  for (const auto& g : grids)
    if (g.roi_label == roi) return &g;
  return nullptr;
}

namespace {

RasterSource parse_source(const json& j, const std::string& name,
                          const std::string& default_resample) {
  RasterSource s;
  s.name = name;
  s.path = j.at("path").get<std::string>();
  s.resample = j.value("resample", default_resample);
  if (s.resample != "average" && s.resample != "nearest" && s.resample != "any")
    throw io_error("config: unknown resample mode '" + s.resample + "' for " + name);
  return s;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw io_error(path + ": malformed JSON: " + e.what());
  }

  RunConfig cfg;
  cfg.raw_json = buffer.str();
  try {
    cfg.frame = j.at("frame").get<std::string>();
    cfg.output_dir = j.value("output_dir", "out");
    cfg.seed = j.value("seed", 17u);

    for (const auto& g : j.at("grids")) {
      TileGrid grid;
      grid.roi_label = g.at("roi").get<std::string>();
      grid.origin_x = g.at("origin_x").get<double>();
      grid.origin_y = g.at("origin_y").get<double>();
      grid.tile_size = g.value("tile_size", 100.0);
      grid.n_cols = g.at("n_cols").get<int>();
      grid.n_rows = g.at("n_rows").get<int>();
      cfg.grids.push_back(std::move(grid));
    }

    const json sources = j.value("sources", json::object());
    if (sources.contains("landsat")) {
      const auto& ls = sources["landsat"];
      for (const auto& b : ls.at("bands"))
        cfg.landsat_bands.push_back(
            parse_source(b, b.at("name").get<std::string>(), "average"));
      const auto& roles = ls.at("roles");
      cfg.nir_band = roles.at("nir").get<std::string>();
      cfg.red_band = roles.at("red").get<std::string>();
      cfg.green_band = roles.at("green").get<std::string>();
    }
    if (sources.contains("hrsl")) cfg.hrsl = parse_source(sources["hrsl"], "hrsl", "any");
    if (sources.contains("landcover")) {
      cfg.landcover = parse_source(sources["landcover"], "landcover", "nearest");
      const auto& sch = sources["landcover"].at("scheme");
      LandCoverScheme scheme;
      scheme.retained = sch.at("retained").get<std::vector<std::string>>();
      for (const auto& [code, cls] : sch.at("mapping").items())
        scheme.mapping[std::stoi(code)] = cls.get<std::string>();
      cfg.landcover_scheme = std::move(scheme);
    }
    if (sources.contains("ntl")) cfg.ntl = parse_source(sources["ntl"], "ntl", "nearest");
    if (sources.contains("roads")) cfg.roads_path = sources["roads"].at("path").get<std::string>();

    if (j.contains("footprint") && !j["footprint"].is_null()) {
      const auto& fp = j["footprint"];
      FootprintConfig f;
      f.mode = fp.at("mode").get<std::string>();
      if (f.mode != "dots" && f.mode != "probability" && f.mode != "mask")
        throw io_error("config: unknown footprint mode '" + f.mode + "'");
      f.path = fp.at("path").get<std::string>();
      if (f.mode == "dots") {
        f.cell_size = fp.value("cell_size", 0.5);
        for (const auto& [roi, area] : fp.at("mean_building_area").items())
          f.mean_building_area[roi] = area.get<double>();
      }
      if (f.mode == "probability") f.threshold = fp.at("threshold").get<double>();
      if (fp.contains("min_area")) f.min_area = fp["min_area"].get<double>();
      if (fp.contains("max_area")) f.max_area = fp["max_area"].get<double>();
      cfg.footprint = std::move(f);
    }

    if (j.contains("survey")) {
      const auto& sv = j["survey"];
      cfg.survey.households = sv.value("households", "");
      cfg.survey.surveyed_tiles = sv.value("surveyed_tiles", "");
      cfg.survey.exclusions = sv.value("exclusions", "");
    }

    if (j.contains("hyper")) {
      const auto& h = j["hyper"];
      if (h.contains("delta")) cfg.hyper.delta_grid = h["delta"].get<std::vector<double>>();
      if (h.contains("lambda_frac"))
        cfg.hyper.lambda_frac_grid = h["lambda_frac"].get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw io_error(path + ": config schema error: " + e.what());
  }
  return cfg;
}

namespace {

void check_raster_source(const RunConfig& cfg, const RasterSource& src,
                         std::vector<std::string>& problems) {
  if (!fs::exists(src.path)) {
    problems.push_back("missing raster file for " + src.name + ": " + src.path);
    return;
  }
  try {
    const BandInfo info = read_band_sidecar(src.path);
    if (info.frame != cfg.frame)
      problems.push_back("frame mismatch for " + src.name + ": config frame '" + cfg.frame +
                         "', sidecar frame '" + info.frame + "'");
  } catch (const std::exception& e) {
    problems.push_back(std::string("band sidecar problem for ") + src.name + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.frame.empty()) problems.push_back("frame label is empty");
  if (cfg.grids.empty()) problems.push_back("no ROI grids defined");
  std::set<std::string> rois;
  for (const auto& g : cfg.grids) {
    try {
      g.validate();
    } catch (const std::exception& e) {
      problems.push_back("grid '" + g.roi_label + "': " + e.what());
    }
    if (!rois.insert(g.roi_label).second)
      problems.push_back("duplicate ROI label '" + g.roi_label + "'");
  }

  for (const auto& b : cfg.landsat_bands) check_raster_source(cfg, b, problems);
  if (!cfg.landsat_bands.empty()) {
    auto has_band = [&](const std::string& name) {
      for (const auto& b : cfg.landsat_bands)
        if (b.name == name) return true;
      return false;
    };
    for (const auto& [role, name] : std::initializer_list<std::pair<const char*, std::string>>{
             {"nir", cfg.nir_band}, {"red", cfg.red_band}, {"green", cfg.green_band}})
      if (!has_band(name))
        problems.push_back(std::string("band role ") + role + " names unknown band '" + name +
                           "'");
  }
  if (cfg.hrsl) check_raster_source(cfg, *cfg.hrsl, problems);
  if (cfg.landcover) {
    check_raster_source(cfg, *cfg.landcover, problems);
    try {
      cfg.landcover_scheme->validate();
    } catch (const std::exception& e) {
      problems.push_back(std::string("land-cover scheme: ") + e.what());
    }
  }
  if (cfg.ntl) check_raster_source(cfg, *cfg.ntl, problems);
  if (cfg.roads_path && !fs::exists(*cfg.roads_path))
    problems.push_back("missing roads file: " + *cfg.roads_path);

  if (cfg.footprint) {
    if (!fs::exists(cfg.footprint->path))
      problems.push_back("missing footprint input: " + cfg.footprint->path);
    if (cfg.footprint->mode == "dots") {
      for (const auto& g : cfg.grids)
        if (!cfg.footprint->mean_building_area.count(g.roi_label))
          problems.push_back("footprint: no mean_building_area for ROI '" + g.roi_label + "'");
      for (const auto& [roi, area] : cfg.footprint->mean_building_area)
        if (!(area > 0.0))
          problems.push_back("footprint: mean_building_area for '" + roi + "' must be > 0");
    }
    if (cfg.footprint->min_area && cfg.footprint->max_area &&
        !(*cfg.footprint->min_area < *cfg.footprint->max_area))
      problems.push_back("footprint: min_area must be < max_area");
  }

  for (const auto& [what, path] :
       std::initializer_list<std::pair<const char*, std::string>>{
           {"households", cfg.survey.households},
           {"surveyed_tiles", cfg.survey.surveyed_tiles},
           {"exclusions", cfg.survey.exclusions}})
    if (!path.empty() && !fs::exists(path))
      problems.push_back(std::string("missing survey file (") + what + "): " + path);

  try {
    cfg.hyper.validate();
  } catch (const std::exception& e) {
    problems.push_back(std::string("hyperparameter grids: ") + e.what());
  }
  return problems;
}

}  // namespace gridpop
