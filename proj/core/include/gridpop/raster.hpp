#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridpop {

/// Input or file-format problem; message carries path/line context.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or inconsistent data passed between stages.
class invalid_argument : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-band planar raster. origin_x/origin_y are the outer corner of
/// cell (0,0), i.e. the top-left corner; rows run top to bottom.
struct Raster {
  int width = 0;
  int height = 0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 0.0;
  double nodata = -9999.0;
  std::vector<double> values;  // row-major, top row first
  std::string band_name;

  double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }
  double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }

  bool is_nodata(double v) const { return v == nodata || std::isnan(v); }

  double cell_center_x(int col) const { return origin_x + (col + 0.5) * cell_size; }
  double cell_center_y(int row) const { return origin_y - (row + 0.5) * cell_size; }

  // Cell containing (x, y): col = floor((x-ox)/cs), row = floor((oy-y)/cs),
  // so each cell covers [left, right) x (bottom, top].
  std::optional<std::pair<int, int>> cell_at(double x, double y) const;

  double min_x() const { return origin_x; }
  double max_x() const { return origin_x + width * cell_size; }
  double max_y() const { return origin_y; }
  double min_y() const { return origin_y - height * cell_size; }

  /// Throws invalid_argument on any structural invariant violation.
  void validate() const;
};

/// The 100 m analysis grid for one region of interest. Same orientation
/// convention as Raster: origin is the top-left outer corner, tile ids are
/// row-major, tile (row, col) covers
/// [ox + col*ts, ox + (col+1)*ts) x (oy - (row+1)*ts, oy - row*ts].
struct TileGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double tile_size = 100.0;
  int n_cols = 0;
  int n_rows = 0;
  std::string roi_label;

  int tile_count() const { return n_cols * n_rows; }
  int tile_id(int row, int col) const { return row * n_cols + col; }
  std::pair<int, int> row_col(int id) const { return {id / n_cols, id % n_cols}; }

  std::optional<int> tile_at(double x, double y) const;

  double center_x(int id) const { return origin_x + (id % n_cols + 0.5) * tile_size; }
  double center_y(int id) const { return origin_y - (id / n_cols + 0.5) * tile_size; }

  double min_x() const { return origin_x; }
  double max_x() const { return origin_x + n_cols * tile_size; }
  double max_y() const { return origin_y; }
  double min_y() const { return origin_y - n_rows * tile_size; }

  void validate() const;
};

/// Sidecar metadata stored next to each .asc file as <name>.band.json.
struct BandInfo {
  std::string band_name;
  std::string frame;
  std::string kind;  // "continuous" | "categorical" | "binary"
};

Raster read_ascii_grid(const std::string& path);
void write_ascii_grid(const Raster& raster, const std::string& path);

BandInfo read_band_sidecar(const std::string& raster_path);
void write_band_sidecar(const std::string& raster_path, const BandInfo& info);

}  // namespace gridpop
