#include <doctest.h>

#include <numbers>
#include <random>

#include "gridpop/footprint.hpp"

using namespace gridpop;

namespace {

TileGrid make_grid(int cols, int rows) {
  TileGrid g;
  g.origin_x = 0;
  g.origin_y = rows * 100.0;
  g.tile_size = 100;
  g.n_cols = cols;
  g.n_rows = rows;
  g.roi_label = "T";
  return g;
}

PointRecord pt(double x, double y) {
  PointRecord p;
  p.x = x;
  p.y = y;
  return p;
}

double mask_area(const Raster& mask) {
  double a = 0.0;
  for (double v : mask.values)
    if (v == 1.0) a += mask.cell_size * mask.cell_size;
  return a;
}

}  // namespace

TEST_CASE("rasterize_dots: radius follows the mean building area") {
  // 28.274... m^2 -> r = 3.0 m; at 0.5 m cells the pixel-count area must be
  // within 10% of pi * 9.
  const TileGrid g = make_grid(1, 1);
  DotAnnotationSet dots;
  dots.points = {pt(50, 50)};
  dots.mean_building_area = std::numbers::pi * 9.0;
  const auto result = rasterize_dots(dots, 0.5, g);
  CHECK(result.skipped == 0);
  CHECK(mask_area(result.mask) == doctest::Approx(std::numbers::pi * 9.0).epsilon(0.10));
}

TEST_CASE("rasterize_dots: zero dots gives an all-zero mask") {
  const TileGrid g = make_grid(2, 2);
  DotAnnotationSet dots;
  dots.mean_building_area = 28.0;
  const auto result = rasterize_dots(dots, 0.5, g);
  CHECK(mask_area(result.mask) == 0.0);
}

TEST_CASE("rasterize_dots: dot outside the extent is skipped and counted") {
  const TileGrid g = make_grid(1, 1);
  DotAnnotationSet dots;
  dots.points = {pt(50, 50), pt(500, 500)};
  dots.mean_building_area = 28.0;
  CHECK(rasterize_dots(dots, 0.5, g).skipped == 1);
}

TEST_CASE("rasterize_dots: area converges to the mean building area") {
  const TileGrid g = make_grid(1, 1);
  DotAnnotationSet dots;
  dots.points = {pt(50.2, 49.7)};
  dots.mean_building_area = 28.274333882308138;
  // Cell-center counting error is not monotone step to step, but shrinks
  // with resolution: relative error stays within O(cell_size / radius).
  for (double cs : {1.0, 0.5, 0.25, 0.125}) {
    const double err =
        std::abs(mask_area(rasterize_dots(dots, cs, g).mask) - dots.mean_building_area);
    CHECK(err / dots.mean_building_area < cs);  // radius is 3 m
  }
}

TEST_CASE("threshold_mask: >= convention, nodata to zero, range checked") {
  Raster prob;
  prob.width = 4;
  prob.height = 1;
  prob.cell_size = 0.5;
  prob.origin_y = 0.5;
  prob.values = {0.4, 0.6, 0.5, -9999.0};
  const Raster mask = threshold_mask(prob, 0.5);
  CHECK(mask.values == std::vector<double>{0, 1, 1, 0});

  prob.values[0] = 1.5;
  CHECK_THROWS_AS(threshold_mask(prob, 0.5), invalid_argument);
}

TEST_CASE("threshold_mask: all-zero probabilities give an empty mask") {
  Raster prob;
  prob.width = 2;
  prob.height = 2;
  prob.cell_size = 1.0;
  prob.origin_y = 2.0;
  prob.values = {0, 0, 0, 0};
  const Raster mask = threshold_mask(prob, 0.25);
  CHECK(mask_area(mask) == 0.0);
}

namespace {

Raster mask_from(int w, int h, double cs, std::vector<double> v) {
  Raster m;
  m.width = w;
  m.height = h;
  m.cell_size = cs;
  m.origin_x = 0;
  m.origin_y = h * cs;
  m.values = std::move(v);
  return m;
}

}  // namespace

TEST_CASE("filter_components: tiny component erased, bounds inclusive") {
  // 4 px at 0.25 m^2 each = 1 m^2, below min_area 10 -> erased.
  Raster small = mask_from(2, 2, 0.5, {1, 1, 1, 1});
  CHECK(mask_area(filter_components(small, 10.0, 1000.0)) == 0.0);

  // Component of exactly min_area kept.
  Raster exact = mask_from(2, 2, 0.5, {1, 1, 1, 1});
  CHECK(mask_area(filter_components(exact, 1.0, 1000.0)) == 1.0);
}

TEST_CASE("filter_components: diagonal pixels are one 8-connected component") {
  Raster m = mask_from(3, 3, 1.0, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  // One component of 3 m^2; erasing requires the whole diagonal to go.
  CHECK(mask_area(filter_components(m, 4.0, 100.0)) == 0.0);
  CHECK(mask_area(filter_components(m, 3.0, 100.0)) == 3.0);
}

TEST_CASE("filter_components: empty mask and idempotence") {
  Raster empty = mask_from(2, 2, 1.0, {0, 0, 0, 0});
  CHECK(mask_area(filter_components(empty, 1.0, 2.0)) == 0.0);

  Raster mixed = mask_from(4, 1, 1.0, {1, 0, 1, 1});
  const Raster once = filter_components(mixed, 2.0, 10.0);
  const Raster twice = filter_components(once, 2.0, 10.0);
  CHECK(once.values == twice.values);
}

TEST_CASE("area_per_tile: hand counts") {
  const TileGrid g = make_grid(1, 1);
  Raster m = mask_from(200, 200, 0.5, std::vector<double>(200 * 200, 0.0));
  for (int i = 0; i < 40; ++i) m.values[i] = 1.0;
  CHECK(area_per_tile(m, g)[0] == doctest::Approx(10.0));

  // Full tile of set 0.5 m cells -> 10 000 m^2.
  std::fill(m.values.begin(), m.values.end(), 1.0);
  CHECK(area_per_tile(m, g)[0] == doctest::Approx(10000.0));
}

TEST_CASE("area_per_tile: empty mask gives zeros, totals conserved") {
  const TileGrid g = make_grid(2, 2);
  Raster m = mask_from(400, 400, 0.5, std::vector<double>(400 * 400, 0.0));
  for (auto v : area_per_tile(m, g)) CHECK(v == 0.0);

  std::mt19937 rng(4);
  std::bernoulli_distribution coin(0.2);
  double set_cells = 0;
  for (auto& v : m.values) {
    v = coin(rng) ? 1.0 : 0.0;
    set_cells += v;
  }
  double total = 0.0;
  for (double v : area_per_tile(m, g)) total += v;
  CHECK(total == doctest::Approx(set_cells * 0.25).epsilon(1e-12));
}
