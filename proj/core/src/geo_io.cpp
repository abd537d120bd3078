#include "gridpop/geo_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace gridpop {

std::optional<double> PointRecord::numeric_attr(const std::string& name) const {
  const auto it = attrs.find(name);
  if (it == attrs.end()) return std::nullopt;
  const std::string& s = it->second;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

namespace {

// RFC-4180-style field split: quoted fields, doubled quotes, no embedded
// newlines (records are line-based in this artifact).
std::vector<std::string> split_csv(const std::string& line, const std::string& path, int line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw io_error(path + ":" + std::to_string(line_no) + ": unterminated quote");
  out.push_back(field);
  return out;
}

double parse_coord(const std::string& s, const std::string& path, int row) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw io_error(path + ": row " + std::to_string(row) + ": non-numeric coordinate '" + s + "'");
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<PointRecord> parse_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open points CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file, header row required");
  const auto header = split_csv(strip_cr(line), path, 1);
  int xi = -1, yi = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x") xi = static_cast<int>(i);
    if (header[i] == "y") yi = static_cast<int>(i);
  }
  if (xi < 0 || yi < 0) throw io_error(path + ": header must contain 'x' and 'y' columns");

  std::vector<PointRecord> out;
  int row = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv(line, path, line_no);
    if (fields.size() != header.size())
      throw io_error(path + ": row " + std::to_string(row) + ": expected " +
                     std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    PointRecord rec;
    rec.x = parse_coord(fields[xi], path, row);
    rec.y = parse_coord(fields[yi], path, row);
    for (size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == xi || static_cast<int>(i) == yi) continue;
      rec.attrs[header[i]] = fields[i];
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

Polyline line_from_coords(const nlohmann::json& coords, const std::string& tag,
                          const std::string& path) {
  Polyline line;
  line.tag = tag;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2)
      throw io_error(path + ": LineString coordinate is not an [x, y] pair");
    const double x = pt[0].get<double>();
    const double y = pt[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y))
      throw io_error(path + ": non-finite coordinate in LineString");
    line.vertices.emplace_back(x, y);
  }
  if (line.vertices.size() < 2)
    throw io_error(path + ": LineString must have at least 2 vertices");
  return line;
}

}  // namespace

PolylineSet parse_lines_geojson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open GeoJSON: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": malformed JSON: " + e.what());
  }
  if (j.value("type", "") != "FeatureCollection")
    throw io_error(path + ": expected a FeatureCollection");

  PolylineSet set;
  for (const auto& feature : j.at("features")) {
    const auto& geom = feature.at("geometry");
    const std::string type = geom.value("type", "");
    std::string tag;
    if (feature.contains("properties") && feature["properties"].is_object()) {
      const auto& props = feature["properties"];
      if (props.contains("highway") && props["highway"].is_string())
        tag = props["highway"].get<std::string>();
    }
    if (type == "LineString") {
      set.lines.push_back(line_from_coords(geom.at("coordinates"), tag, path));
    } else if (type == "MultiLineString") {
      for (const auto& part : geom.at("coordinates"))
        set.lines.push_back(line_from_coords(part, tag, path));
    } else {
      throw io_error(path + ": unsupported geometry type '" + type + "'");
    }
  }
  return set;
}

namespace {

// Closed-box segment test via slab clipping; touching a box edge counts.
bool segment_hits_box(double x1, double y1, double x2, double y2, double bx0, double bx1,
                      double by0, double by1) {
  double t0 = 0.0, t1 = 1.0;
  const double d[2] = {x2 - x1, y2 - y1};
  const double p[2] = {x1, y1};
  const double lo[2] = {bx0, by0};
  const double hi[2] = {bx1, by1};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (p[axis] < lo[axis] || p[axis] > hi[axis]) return false;
    } else {
      double ta = (lo[axis] - p[axis]) / d[axis];
      double tb = (hi[axis] - p[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<uint8_t> rasterize_lines(const PolylineSet& lines, const TileGrid& grid) {
  grid.validate();
  std::vector<uint8_t> out(grid.tile_count(), 0);
  const double ts = grid.tile_size;
  for (const auto& line : lines.lines) {
    if (line.vertices.size() < 2)
      throw invalid_argument("polyline with fewer than 2 vertices");
    for (size_t s = 0; s + 1 < line.vertices.size(); ++s) {
      const auto [x1, y1] = line.vertices[s];
      const auto [x2, y2] = line.vertices[s + 1];
      // Candidate tiles: the segment bbox clipped to the grid.
      int c0 = static_cast<int>(std::floor((std::min(x1, x2) - grid.origin_x) / ts));
      int c1 = static_cast<int>(std::floor((std::max(x1, x2) - grid.origin_x) / ts));
      int r0 = static_cast<int>(std::floor((grid.origin_y - std::max(y1, y2)) / ts));
      int r1 = static_cast<int>(std::floor((grid.origin_y - std::min(y1, y2)) / ts));
      c0 = std::clamp(c0, 0, grid.n_cols - 1);
      c1 = std::clamp(c1, 0, grid.n_cols - 1);
      r0 = std::clamp(r0, 0, grid.n_rows - 1);
      r1 = std::clamp(r1, 0, grid.n_rows - 1);
      for (int row = r0; row <= r1; ++row) {
        const double by1 = grid.origin_y - row * ts;
        const double by0 = by1 - ts;
        for (int col = c0; col <= c1; ++col) {
          const double bx0 = grid.origin_x + col * ts;
          if (segment_hits_box(x1, y1, x2, y2, bx0, bx0 + ts, by0, by1))
            out[grid.tile_id(row, col)] = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace gridpop
