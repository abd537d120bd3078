#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gridpop/raster.hpp"
#include "gridpop/regression.hpp"

namespace testutil {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gridpop_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline gridpop::Raster random_raster(std::mt19937& rng, int width, int height, double cell_size,
                                     double nodata_fraction = 0.1) {
  gridpop::Raster r;
  r.width = width;
  r.height = height;
  r.cell_size = cell_size;
  r.origin_x = std::uniform_real_distribution<>(-1000.0, 1000.0)(rng);
  r.origin_y = std::uniform_real_distribution<>(-1000.0, 1000.0)(rng);
  r.nodata = -9999.0;
  std::uniform_real_distribution<> value(-50.0, 50.0);
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (int i = 0; i < width * height; ++i)
    r.values.push_back(u(rng) < nodata_fraction ? r.nodata : value(rng));
  return r;
}

/// O(tiles * road tiles) reference for the distance transform.
inline std::vector<double> brute_force_distance(const std::vector<uint8_t>& road,
                                                const gridpop::TileGrid& grid) {
  std::vector<std::pair<int, int>> roads;
  for (int r = 0; r < grid.n_rows; ++r)
    for (int c = 0; c < grid.n_cols; ++c)
      if (road[grid.tile_id(r, c)]) roads.emplace_back(r, c);
  std::vector<double> out(grid.tile_count());
  for (int r = 0; r < grid.n_rows; ++r) {
    for (int c = 0; c < grid.n_cols; ++c) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [rr, rc] : roads) {
        const double d2 = double(r - rr) * (r - rr) + double(c - rc) * (c - rc);
        best = std::min(best, d2);
      }
      out[grid.tile_id(r, c)] = std::sqrt(best) * grid.tile_size;
    }
  }
  return out;
}

/// Full Huber+l1 objective, the quantity the solver minimizes.
inline double huber_l1_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 double intercept, const Eigen::VectorXd& beta, double delta,
                                 double lambda) {
  const Eigen::VectorXd r = y - Eigen::VectorXd::Constant(y.size(), intercept) - X * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += gridpop::huber_value(r[i], delta);
  return s / y.size() + lambda * beta.cwiseAbs().sum();
}

/// Coarse-to-fine dense grid search over two coefficients (no intercept);
/// final refinement at 1e-3 steps. Valid for the convex objective.
inline double grid_search_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double delta, double lambda) {
  double best = std::numeric_limits<double>::infinity();
  double b1 = 0.0, b2 = 0.0;
  Eigen::VectorXd beta(2);
  auto sweep = [&](double lo1, double hi1, double lo2, double hi2, double step) {
    for (double a = lo1; a <= hi1 + step / 2; a += step) {
      for (double b = lo2; b <= hi2 + step / 2; b += step) {
        beta << a, b;
        const double obj = huber_l1_objective(X, y, 0.0, beta, delta, lambda);
        if (obj < best) {
          best = obj;
          b1 = a;
          b2 = b;
        }
      }
    }
  };
  sweep(-5.0, 5.0, -5.0, 5.0, 0.01);
  sweep(b1 - 0.02, b1 + 0.02, b2 - 0.02, b2 + 0.02, 1e-3);
  return best;
}

}  // namespace testutil
