#include <random>

#include <benchmark/benchmark.h>

#include "gridpop/features.hpp"
#include "gridpop/regression.hpp"

namespace {

void BM_DistanceTransform(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  gridpop::TileGrid grid;
  grid.n_cols = side;
  grid.n_rows = side;
  grid.tile_size = 100.0;
  grid.origin_y = side * 100.0;
  grid.roi_label = "B";
  std::mt19937 rng(7);
  std::bernoulli_distribution road(0.02);
  std::vector<uint8_t> mask(static_cast<size_t>(side) * side);
  for (auto& v : mask) v = road(rng);
  mask[0] = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(gridpop::distance_to_road(mask, grid));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_DistanceTransform)->Arg(50)->Arg(200)->Arg(500);

void BM_HuberL1Fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), p = 61;
  std::mt19937 rng(11);
  std::normal_distribution<> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = gauss(rng);
    y[i] = X(i, 0) - 0.5 * X(i, 5) + 0.3 * gauss(rng);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(gridpop::fit_huber_l1(X, y, 1.35, 0.01));
}
BENCHMARK(BM_HuberL1Fit)->Arg(150)->Arg(600);

void BM_ContextFeatures(benchmark::State& state) {
  const int side = 100;
  gridpop::TileGrid grid;
  grid.n_cols = side;
  grid.n_rows = side;
  grid.tile_size = 100.0;
  grid.origin_y = side * 100.0;
  grid.roi_label = "B";
  gridpop::FeatureTable table;
  std::mt19937 rng(3);
  std::normal_distribution<> gauss(0.0, 1.0);
  std::vector<double> col(static_cast<size_t>(side) * side);
  for (int t = 0; t < side * side; ++t) table.tiles.push_back({"B", t});
  for (auto& v : col) v = gauss(rng);
  for (int c = 0; c < 20; ++c)
    table.add_column("f" + std::to_string(c), col, true, "bench");
  for (auto _ : state)
    benchmark::DoNotOptimize(gridpop::context_features(table, grid));
}
BENCHMARK(BM_ContextFeatures);

}  // namespace

BENCHMARK_MAIN();
