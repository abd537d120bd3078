#include "gridpop/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridpop {

std::optional<std::pair<int, int>> Raster::cell_at(double x, double y) const {
  const int col = static_cast<int>(std::floor((x - origin_x) / cell_size));
  const int row = static_cast<int>(std::floor((origin_y - y) / cell_size));
  if (col < 0 || col >= width || row < 0 || row >= height) return std::nullopt;
  return std::make_pair(row, col);
}

void Raster::validate() const {
  if (width < 1 || height < 1) throw invalid_argument("raster dimensions must be >= 1");
  if (!(cell_size > 0.0)) throw invalid_argument("raster cell_size must be > 0");
  if (values.size() != static_cast<size_t>(width) * height)
    throw invalid_argument("raster value count does not match width*height");
  for (double v : values)
    if (!is_nodata(v) && !std::isfinite(v))
      throw invalid_argument("raster contains non-finite data value");
}

std::optional<int> TileGrid::tile_at(double x, double y) const {
  const int col = static_cast<int>(std::floor((x - origin_x) / tile_size));
  const int row = static_cast<int>(std::floor((origin_y - y) / tile_size));
  if (col < 0 || col >= n_cols || row < 0 || row >= n_rows) return std::nullopt;
  return tile_id(row, col);
}

void TileGrid::validate() const {
  if (!(tile_size > 0.0)) throw invalid_argument("tile_size must be > 0");
  if (n_cols < 1 || n_rows < 1) throw invalid_argument("grid dimensions must be >= 1");
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& tok, const std::string& path, int line_no) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw io_error(path + ":" + std::to_string(line_no) + ": non-numeric token '" + tok + "'");
  return v;
}

}  // namespace

Raster read_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open raster file: " + path);

  // Header: six key/value lines, case-insensitive keys, fixed order not required.
  int ncols = -1, nrows = -1;
  double xll = 0, yll = 0, cellsize = 0, nodata = -9999.0;
  bool have_xll = false, have_yll = false, have_cs = false;
  int line_no = 0;
  std::string line;
  int header_seen = 0;
  while (header_seen < 6 && std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key, val;
    if (!(ls >> key >> val))
      throw io_error(path + ":" + std::to_string(line_no) + ": malformed header line");
    const std::string k = lower(key);
    const double v = parse_number(val, path, line_no);
    if (k == "ncols")
      ncols = static_cast<int>(v);
    else if (k == "nrows")
      nrows = static_cast<int>(v);
    else if (k == "xllcorner")
      xll = v, have_xll = true;
    else if (k == "yllcorner")
      yll = v, have_yll = true;
    else if (k == "cellsize")
      cellsize = v, have_cs = true;
    else if (k == "nodata_value")
      nodata = v;
    else
      throw io_error(path + ":" + std::to_string(line_no) + ": unknown header key '" + key + "'");
    ++header_seen;
  }
  if (ncols < 1 || nrows < 1 || !have_xll || !have_yll || !have_cs)
    throw io_error(path + ": incomplete ASCII grid header");
  if (!(cellsize > 0.0)) throw io_error(path + ": cellsize must be > 0");

  Raster r;
  r.width = ncols;
  r.height = nrows;
  r.origin_x = xll;
  r.origin_y = yll + nrows * cellsize;
  r.cell_size = cellsize;
  r.nodata = nodata;
  r.values.reserve(static_cast<size_t>(ncols) * nrows);

  for (int row = 0; row < nrows; ++row) {
    if (!std::getline(in, line))
      throw io_error(path + ": unexpected end of file at data row " + std::to_string(row));
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    int count = 0;
    while (ls >> tok) {
      if (count >= ncols)
        throw io_error(path + ":" + std::to_string(line_no) + ": data row " + std::to_string(row) +
                       " has more than " + std::to_string(ncols) + " values");
      r.values.push_back(parse_number(tok, path, line_no));
      ++count;
    }
    if (count != ncols)
      throw io_error(path + ":" + std::to_string(line_no) + ": data row " + std::to_string(row) +
                     " has " + std::to_string(count) + " values, expected " + std::to_string(ncols));
  }
  r.validate();
  return r;
}

void write_ascii_grid(const Raster& raster, const std::string& path) {
  raster.validate();
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  char buf[40];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "ncols " << raster.width << "\n";
  out << "nrows " << raster.height << "\n";
  out << "xllcorner " << fmt(raster.origin_x) << "\n";
  out << "yllcorner " << fmt(raster.origin_y - raster.height * raster.cell_size) << "\n";
  out << "cellsize " << fmt(raster.cell_size) << "\n";
  out << "NODATA_value " << fmt(raster.nodata) << "\n";
  for (int row = 0; row < raster.height; ++row) {
    for (int col = 0; col < raster.width; ++col) {
      if (col) out << ' ';
      out << fmt(raster.at(row, col));
    }
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

static std::string sidecar_path(const std::string& raster_path) {
  const auto dot = raster_path.rfind('.');
  const std::string stem = dot == std::string::npos ? raster_path : raster_path.substr(0, dot);
  return stem + ".band.json";
}

BandInfo read_band_sidecar(const std::string& raster_path) {
  const std::string p = sidecar_path(raster_path);
  std::ifstream in(p);
  if (!in) throw io_error("cannot open band sidecar: " + p);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(p + ": " + e.what());
  }
  BandInfo info;
  info.band_name = j.at("band_name").get<std::string>();
  info.frame = j.at("frame").get<std::string>();
  info.kind = j.at("kind").get<std::string>();
  if (info.kind != "continuous" && info.kind != "categorical" && info.kind != "binary")
    throw io_error(p + ": unknown kind '" + info.kind + "'");
  return info;
}

void write_band_sidecar(const std::string& raster_path, const BandInfo& info) {
  const std::string p = sidecar_path(raster_path);
  std::ofstream out(p);
  if (!out) throw io_error("cannot open for writing: " + p);
  nlohmann::json j{{"band_name", info.band_name}, {"frame", info.frame}, {"kind", info.kind}};
  out << j.dump(2) << "\n";
}

}  // namespace gridpop
