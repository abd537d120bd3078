#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gridpop/pipeline.hpp"
#include "testutil.hpp"
#include "world.hpp"

using namespace gridpop;
namespace fs = std::filesystem;

TEST_CASE("load_config: happy path with defaults") {
  testutil::TempDir dir("cfg");
  const worldgen::World world = worldgen::make_world(dir.path(), 101, true);
  const RunConfig cfg = load_config(world.config_full);
  CHECK(cfg.frame == "utm-test");
  CHECK(cfg.seed == 17);
  CHECK(cfg.grids.size() == 2);
  CHECK(cfg.landsat_bands.size() == 10);
  CHECK(cfg.nir_band == "b4");
  REQUIRE(cfg.footprint.has_value());
  CHECK(cfg.footprint->mode == "dots");
  CHECK(cfg.landcover->resample == "nearest");
  CHECK(cfg.ntl->resample == "nearest");
  CHECK(cfg.landsat_bands[0].resample == "average");
  CHECK(cfg.hrsl->resample == "any");
  CHECK(cfg.grid_for("B") != nullptr);
  CHECK(cfg.grid_for("Z") == nullptr);
}

TEST_CASE("load_config: malformed JSON and missing file") {
  testutil::TempDir dir("cfgbad");
  testutil::write_text(dir.file("bad.json"), "{not json");
  CHECK_THROWS_AS(load_config(dir.file("bad.json")), io_error);
  CHECK_THROWS_AS(load_config(dir.file("absent.json")), io_error);
}

TEST_CASE("load_config: schema errors are reported as io_error") {
  testutil::TempDir dir("cfgschema");
  testutil::write_text(dir.file("no_frame.json"), "{\"grids\": []}");
  CHECK_THROWS_AS(load_config(dir.file("no_frame.json")), io_error);
  testutil::write_text(dir.file("bad_resample.json"),
                       R"({"frame":"f","grids":[],"sources":{"hrsl":{"path":"p","resample":"cubic"}}})");
  CHECK_THROWS_AS(load_config(dir.file("bad_resample.json")), io_error);
}

TEST_CASE("validate_config: reports missing files and frame mismatches") {
  testutil::TempDir dir("val");
  const worldgen::World world = worldgen::make_world(dir.path(), 102, true);
  RunConfig cfg = load_config(world.config_full);
  CHECK(validate_config(cfg).empty());

  SUBCASE("missing raster") {
    cfg.landsat_bands[0].path = dir.file("nope.asc");
    const auto problems = validate_config(cfg);
    REQUIRE(!problems.empty());
    CHECK(problems[0].find("missing raster") != std::string::npos);
  }
  SUBCASE("frame mismatch against the sidecar") {
    cfg.frame = "other-frame";
    const auto problems = validate_config(cfg);
    bool found = false;
    for (const auto& p : problems) found = found || p.find("frame mismatch") != std::string::npos;
    CHECK(found);
  }
  SUBCASE("bad band role") {
    cfg.nir_band = "b99";
    const auto problems = validate_config(cfg);
    REQUIRE(!problems.empty());
    CHECK(problems[0].find("b99") != std::string::npos);
  }
  SUBCASE("missing mean building area for an ROI") {
    cfg.footprint->mean_building_area.erase("B");
    const auto problems = validate_config(cfg);
    REQUIRE(!problems.empty());
    CHECK(problems[0].find("mean_building_area") != std::string::npos);
  }
  SUBCASE("missing survey file") {
    cfg.survey.households = dir.file("nope.csv");
    CHECK(!validate_config(cfg).empty());
  }
}

TEST_CASE("run_validate exit codes") {
  testutil::TempDir dir("rv");
  const worldgen::World world = worldgen::make_world(dir.path(), 103, true);
  RunConfig cfg = load_config(world.config_full);
  CHECK(run_validate(cfg) == 0);
  cfg.survey.households = dir.file("nope.csv");
  CHECK(run_validate(cfg) == 2);
}

TEST_CASE("end to end through the library: features, train, evaluate, predict") {
  testutil::TempDir dir("e2e");
  const worldgen::World world = worldgen::make_world(dir.path(), 7, /*reduced_hyper=*/true);
  const RunConfig cfg = load_config(world.config_full);

  CHECK(run_train(cfg) == 2);  // features.csv does not exist yet
  REQUIRE(run_features(cfg) == 0);

  const FeatureTable features = read_feature_csv(cfg.output_dir + "/features.csv");
  CHECK(features.col_names.size() == 61);
  CHECK(features.tiles.size() == 200);

  nlohmann::json manifest;
  std::ifstream(cfg.output_dir + "/manifest.json") >> manifest;
  CHECK(manifest["column_count"] == 61);
  CHECK(manifest["config"]["frame"] == "utm-test");

  REQUIRE(run_train(cfg) == 0);
  for (int f = 0; f < 4; ++f)
    CHECK(fs::exists(cfg.output_dir + "/model_fold" + std::to_string(f) + ".json"));
  const auto pooled = read_pooled_csv(cfg.output_dir + "/pooled.csv");
  CHECK(pooled.size() == 200);

  REQUIRE(run_evaluate(cfg) == 0);
  nlohmann::json report;
  std::ifstream(cfg.output_dir + "/report.json") >> report;
  CHECK(report["model"]["R2"].get<double>() > 0.8);
  CHECK(report["model"].contains("MeAPE"));
  CHECK(report["null_model"].contains("AggPE"));
  CHECK(fs::exists(cfg.output_dir + "/scatter.svg"));
  CHECK(fs::exists(cfg.output_dir + "/predicted_vs_observed.csv"));

  REQUIRE(run_predict(cfg, cfg.output_dir + "/model_fold0.json", "A") == 0);
  const Raster pred = read_ascii_grid(cfg.output_dir + "/predicted_A.asc");
  CHECK(pred.width == 10);
  CHECK(pred.height == 10);
  double total = 0.0;
  for (double v : pred.values) {
    CHECK(v >= 0.0);
    total += v;
  }
  long observed_total = 0;
  for (long p : world.pop_a) observed_total += p;
  CHECK(total > 0.5 * observed_total);
  CHECK(total < 2.0 * observed_total);
}

TEST_CASE("run_predict: unknown ROI and missing model are configuration errors") {
  testutil::TempDir dir("predbad");
  const worldgen::World world = worldgen::make_world(dir.path(), 11, true);
  const RunConfig cfg = load_config(world.config_bfi);
  CHECK(run_predict(cfg, dir.file("absent.json"), "A") == 2);
  testutil::write_text(dir.file("m.json"), "{}");
  CHECK(run_predict(cfg, dir.file("m.json"), "Q") == 2);
}

TEST_CASE("footprint-only run yields the three-column table") {
  testutil::TempDir dir("bfi");
  const worldgen::World world = worldgen::make_world(dir.path(), 13, true);
  const RunConfig cfg = load_config(world.config_bfi);
  REQUIRE(run_features(cfg) == 0);
  const FeatureTable features = read_feature_csv(cfg.output_dir + "/features.csv");
  REQUIRE(features.col_names.size() == 3);
  CHECK(features.col_names[0] == "building_area");
  CHECK(features.col_names[1] == "building_area_ctx8");
  CHECK(features.col_names[2] == "building_area_ctx24");
}
