#include <doctest.h>

#include <algorithm>
#include <random>

#include "gridpop/survey.hpp"
#include "testutil.hpp"

using namespace gridpop;

namespace {

TileGrid make_grid(int cols, int rows, const std::string& roi = "T") {
  TileGrid g;
  g.origin_x = 0;
  g.origin_y = rows * 100.0;
  g.tile_size = 100;
  g.n_cols = cols;
  g.n_rows = rows;
  g.roi_label = roi;
  return g;
}

PointRecord household(double x, double y, const std::string& persons) {
  PointRecord p;
  p.x = x;
  p.y = y;
  p.attrs["persons"] = persons;
  return p;
}

long observed(const SurveyTable& t, int tile_id) {
  for (const auto& r : t.rows)
    if (r.tile.id == tile_id) return r.observed;
  FAIL("tile not found");
  return -1;
}

}  // namespace

TEST_CASE("grid_population: sums persons per tile") {
  const TileGrid g = make_grid(2, 1);
  const SurveyTable t =
      grid_population({household(50, 50, "3"), household(60, 60, "4")}, g, {});
  REQUIRE(t.rows.size() == 1);
  CHECK(observed(t, 0) == 7);
}

TEST_CASE("grid_population: surveyed tile with no households is a zero row") {
  const TileGrid g = make_grid(2, 1);
  const SurveyTable t = grid_population({household(150, 50, "2")}, g, {{0, "T", "psu1"}});
  REQUIRE(t.rows.size() == 2);
  CHECK(observed(t, 0) == 0);
  CHECK(observed(t, 1) == 2);
}

TEST_CASE("grid_population: unsurveyed empty tiles are not rows") {
  const TileGrid g = make_grid(3, 1);
  const SurveyTable t = grid_population({household(50, 50, "1")}, g, {});
  CHECK(t.rows.size() == 1);
}

TEST_CASE("grid_population: point on a shared edge lands in exactly one tile") {
  const TileGrid g = make_grid(2, 1);
  const SurveyTable t = grid_population({household(100, 50, "5")}, g, {});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].tile.id == 1);  // half-open x interval
  CHECK(t.rows[0].observed == 5);
}

TEST_CASE("grid_population: household outside the grid lists the point") {
  const TileGrid g = make_grid(1, 1);
  CHECK_THROWS_WITH_AS(grid_population({household(500, 500, "2")}, g, {}),
                       doctest::Contains("500"), invalid_argument);
}

TEST_CASE("grid_population: fractional or negative persons rejected") {
  const TileGrid g = make_grid(1, 1);
  CHECK_THROWS_AS(grid_population({household(50, 50, "2.5")}, g, {}), invalid_argument);
  CHECK_THROWS_AS(grid_population({household(50, 50, "-1")}, g, {}), invalid_argument);
}

TEST_CASE("grid_population: total persons conserved and order independent") {
  std::mt19937 rng(13);
  const TileGrid g = make_grid(5, 5);
  std::uniform_real_distribution<> coord(0.0, 500.0);
  std::uniform_int_distribution<> persons(0, 9);
  std::vector<PointRecord> hh;
  long total = 0;
  for (int i = 0; i < 80; ++i) {
    const int p = persons(rng);
    total += p;
    hh.push_back(household(std::min(coord(rng), 499.9), std::min(coord(rng), 499.9),
                           std::to_string(p)));
  }
  const SurveyTable a = grid_population(hh, g, {});
  long sum = 0;
  for (const auto& r : a.rows) sum += r.observed;
  CHECK(sum == total);

  std::shuffle(hh.begin(), hh.end(), rng);
  const SurveyTable b = grid_population(hh, g, {});
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].tile.id == b.rows[i].tile.id);
    CHECK(a.rows[i].observed == b.rows[i].observed);
  }
}

TEST_CASE("apply_exclusions: flags rows, active() hides them") {
  const TileGrid g = make_grid(2, 5);
  std::vector<SurveyedTile> surveyed;
  for (int i = 0; i < 10; ++i) surveyed.push_back({i, "T", ""});
  SurveyTable t = grid_population({}, g, surveyed);
  t = apply_exclusions(std::move(t), {{"T", 3}});
  CHECK(t.rows.size() == 10);
  CHECK(t.active().size() == 9);
}

TEST_CASE("apply_exclusions: empty list leaves the table unchanged") {
  const TileGrid g = make_grid(1, 2);
  SurveyTable t = grid_population({}, g, {{0, "T", ""}, {1, "T", ""}});
  t = apply_exclusions(std::move(t), {});
  CHECK(t.active().size() == 2);
}

TEST_CASE("apply_exclusions: unknown id errors naming it") {
  const TileGrid g = make_grid(1, 1);
  SurveyTable t = grid_population({}, g, {{0, "T", ""}});
  CHECK_THROWS_WITH_AS(apply_exclusions(std::move(t), {{"T", 99}}), doctest::Contains("99"),
                       invalid_argument);
}

TEST_CASE("surveyed tiles and exclusions CSV parsers") {
  testutil::TempDir dir("survey");
  testutil::write_text(dir.file("tiles.csv"), "tile_id,roi,psu\n3,BOA,p1\n4,MGD,p2\n");
  const auto tiles = parse_surveyed_tiles_csv(dir.file("tiles.csv"));
  REQUIRE(tiles.size() == 2);
  CHECK(tiles[0].tile_id == 3);
  CHECK(tiles[1].roi == "MGD");

  testutil::write_text(dir.file("excl.csv"), "tile_id,reason,roi\n7,partial psu,BOA\n9,stale\n");
  const auto excl = parse_exclusions_csv(dir.file("excl.csv"));
  REQUIRE(excl.size() == 2);
  CHECK(excl[0].first.id == 7);
  CHECK(excl[0].first.roi == "BOA");
  CHECK(excl[0].second == "partial psu");
  CHECK(excl[1].first.roi.empty());
}
