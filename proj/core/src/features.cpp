#include "gridpop/features.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gridpop {

int FeatureTable::col_index(const std::string& name) const {
  for (size_t i = 0; i < col_names.size(); ++i)
    if (col_names[i] == name) return static_cast<int>(i);
  return -1;
}

void FeatureTable::add_column(std::string name, std::vector<double> values, bool ctx,
                              std::string note) {
  if (values.size() != tiles.size())
    throw invalid_argument("column '" + name + "' length does not match tile count");
  if (col_index(name) >= 0) throw invalid_argument("duplicate column name '" + name + "'");
  col_names.push_back(std::move(name));
  cols.push_back(std::move(values));
  contextable.push_back(ctx);
  provenance.push_back(std::move(note));
}

void FeatureTable::validate() const {
  if (cols.size() != col_names.size() || cols.size() != contextable.size())
    throw invalid_argument("feature table metadata out of sync");
  for (size_t i = 0; i < cols.size(); ++i)
    if (cols[i].size() != tiles.size())
      throw invalid_argument("column '" + col_names[i] + "' length mismatch");
}

void LandCoverScheme::validate() const {
  if (retained.size() != 5)
    throw invalid_argument("land-cover scheme must retain exactly 5 classes, got " +
                           std::to_string(retained.size()));
  std::set<std::string> names(retained.begin(), retained.end());
  if (names.size() != retained.size())
    throw invalid_argument("duplicate retained land-cover class name");
  for (const auto& [code, cls] : mapping)
    if (cls != "ignored" && !names.count(cls))
      throw invalid_argument("land-cover mapping targets unknown class '" + cls + "'");
}

namespace {

std::vector<double> normalized_difference(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  if (a.size() != b.size()) throw invalid_argument("band length mismatch");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = a[i] + b[i];
    out[i] = denom == 0.0 ? 0.0 : (a[i] - b[i]) / denom;
  }
  return out;
}

}  // namespace

std::vector<double> ndvi(const std::vector<double>& nir, const std::vector<double>& red) {
  return normalized_difference(nir, red);
}

std::vector<double> ndwi(const std::vector<double>& green, const std::vector<double>& nir) {
  return normalized_difference(green, nir);
}

std::vector<std::pair<std::string, std::vector<double>>> onehot_landcover(
    const std::vector<double>& codes, const LandCoverScheme& scheme) {
  scheme.validate();
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const auto& cls : scheme.retained)
    out.emplace_back("lcc_" + cls, std::vector<double>(codes.size(), 0.0));

  std::vector<int> ignored_tiles;
  for (size_t i = 0; i < codes.size(); ++i) {
    if (!has_value(codes[i])) {
      for (auto& [name, col] : out) col[i] = kNoValue;
      continue;
    }
    const int code = static_cast<int>(codes[i]);
    const auto it = scheme.mapping.find(code);
    if (it == scheme.mapping.end())
      throw invalid_argument("unknown land-cover code " + std::to_string(code) + " at tile " +
                             std::to_string(i));
    if (it->second == "ignored") {
      ignored_tiles.push_back(static_cast<int>(i));
      continue;
    }
    for (size_t c = 0; c < scheme.retained.size(); ++c)
      if (scheme.retained[c] == it->second) out[c].second[i] = 1.0;
  }
  if (!ignored_tiles.empty()) {
    std::string msg = "ignored land-cover class present at tiles:";
    for (int id : ignored_tiles) msg += " " + std::to_string(id);
    throw invalid_argument(msg);
  }
  return out;
}

namespace {

constexpr double kFar = 1e18;

// 1-D squared distance transform (lower envelope of parabolas).
void dt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z, int n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> distance_to_road(const std::vector<uint8_t>& road_tiles,
                                     const TileGrid& grid) {
  grid.validate();
  if (road_tiles.size() != static_cast<size_t>(grid.tile_count()))
    throw invalid_argument("road mask length does not match grid");
  if (std::find(road_tiles.begin(), road_tiles.end(), uint8_t{1}) == road_tiles.end())
    throw invalid_argument("no road present");

  const int rows = grid.n_rows, cols = grid.n_cols;
  std::vector<double> d2(static_cast<size_t>(rows) * cols);

  // Vertical pass: squared distance to the nearest road in the same column.
  {
    std::vector<double> f(rows), d(rows);
    std::vector<int> v(rows + 1);
    std::vector<double> z(rows + 2);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r)
        f[r] = road_tiles[static_cast<size_t>(r) * cols + c] ? 0.0 : kFar;
      dt1d(f, d, v, z, rows);
      for (int r = 0; r < rows; ++r) d2[static_cast<size_t>(r) * cols + c] = d[r];
    }
  }
  // Horizontal pass over the vertical result.
  {
    std::vector<double> f(cols), d(cols);
    std::vector<int> v(cols + 1);
    std::vector<double> z(cols + 2);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) f[c] = d2[static_cast<size_t>(r) * cols + c];
      dt1d(f, d, v, z, cols);
      for (int c = 0; c < cols; ++c) d2[static_cast<size_t>(r) * cols + c] = d[c];
    }
  }

  std::vector<double> out(d2.size());
  for (size_t i = 0; i < d2.size(); ++i) out[i] = std::sqrt(d2[i]) * grid.tile_size;
  return out;
}

FeatureTable context_features(const FeatureTable& table, const TileGrid& grid, bool ring8,
                              bool ring24) {
  table.validate();
  grid.validate();
  std::unordered_map<int, int> row_of;  // tile id -> table row
  for (size_t i = 0; i < table.tiles.size(); ++i) {
    if (table.tiles[i].roi != grid.roi_label)
      throw invalid_argument("context_features: table row from a different ROI than the grid");
    row_of[table.tiles[i].id] = static_cast<int>(i);
  }

  FeatureTable out = table;
  struct Ring {
    int radius;
    const char* suffix;
  };
  std::vector<Ring> rings;
  if (ring8) rings.push_back({1, "_ctx8"});
  if (ring24) rings.push_back({2, "_ctx24"});

  for (const auto& ring : rings) {
    for (size_t c = 0; c < table.cols.size(); ++c) {
      if (!table.contextable[c]) continue;
      std::vector<double> ctx(table.n_rows());
      for (size_t i = 0; i < table.tiles.size(); ++i) {
        const auto [row, col] = grid.row_col(table.tiles[i].id);
        double sum = 0.0;
        int count = 0;
        for (int dr = -ring.radius; dr <= ring.radius; ++dr) {
          for (int dc = -ring.radius; dc <= ring.radius; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = row + dr, nc = col + dc;
            if (nr < 0 || nr >= grid.n_rows || nc < 0 || nc >= grid.n_cols) continue;
            const auto it = row_of.find(grid.tile_id(nr, nc));
            if (it == row_of.end()) continue;
            const double v = table.cols[c][it->second];
            if (!has_value(v)) continue;
            sum += v;
            ++count;
          }
        }
        ctx[i] = count > 0 ? sum / count : table.cols[c][i];
      }
      out.add_column(table.col_names[c] + ring.suffix, std::move(ctx), false,
                     "context mean of " + table.col_names[c]);
    }
  }
  return out;
}

AssembleResult assemble_features(const TileGrid& grid, const FeatureInputs& inputs) {
  grid.validate();
  const int n = grid.tile_count();
  auto check_len = [n](const TileValues& v, const char* what) {
    if (v.size() != static_cast<size_t>(n))
      throw invalid_argument(std::string(what) + " length does not match grid");
  };

  FeatureTable base;
  base.tiles.reserve(n);
  for (int i = 0; i < n; ++i) base.tiles.push_back({grid.roi_label, i});

  if (inputs.building_area) {
    check_len(*inputs.building_area, "building_area");
    base.add_column("building_area", *inputs.building_area, true, "footprint m2 per tile");
  }
  if (!inputs.landsat_bands.empty()) {
    for (const auto& [name, vals] : inputs.landsat_bands) {
      check_len(vals, name.c_str());
      base.add_column(name, vals, true, "landsat band");
    }
    auto band = [&](const std::string& name, const char* role) -> const std::vector<double>& {
      const int idx = base.col_index(name);
      if (idx < 0)
        throw invalid_argument(std::string("band role ") + role + " refers to unknown band '" +
                               name + "'");
      return base.cols[idx];
    };
    const auto& nir = band(inputs.nir_band, "nir");
    base.add_column("ndvi", ndvi(nir, band(inputs.red_band, "red")), true, "derived index");
    base.add_column("ndwi", ndwi(band(inputs.green_band, "green"), nir), true, "derived index");
  }
  if (inputs.hrsl) {
    check_len(*inputs.hrsl, "hrsl");
    base.add_column("hrsl", *inputs.hrsl, true, "settlement presence");
  }
  if (inputs.landcover_codes) {
    if (!inputs.landcover_scheme)
      throw invalid_argument("land-cover codes supplied without a scheme");
    check_len(*inputs.landcover_codes, "landcover");
    for (auto& [name, col] : onehot_landcover(*inputs.landcover_codes, *inputs.landcover_scheme))
      base.add_column(name, std::move(col), true, "land-cover one-hot");
  }
  if (inputs.ntl) {
    check_len(*inputs.ntl, "ntl");
    base.add_column("ntl", *inputs.ntl, true, "night-time lights radiance");
  }
  if (inputs.road_tiles) {
    if (inputs.road_tiles->size() != static_cast<size_t>(n))
      throw invalid_argument("road mask length does not match grid");
    base.add_column("dist_road", distance_to_road(*inputs.road_tiles, grid), false,
                    "euclidean distance to nearest road tile");
  }
  if (base.cols.empty()) throw invalid_argument("no feature sources enabled");

  // Drop tiles with incomplete data before computing context.
  std::vector<char> keep(n, 1);
  for (const auto& col : base.cols)
    for (int i = 0; i < n; ++i)
      if (!has_value(col[i])) keep[i] = 0;
  FeatureTable complete;
  complete.col_names = base.col_names;
  complete.contextable = base.contextable;
  complete.provenance = base.provenance;
  complete.cols.resize(base.cols.size());
  int dropped = 0;
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) {
      ++dropped;
      continue;
    }
    complete.tiles.push_back(base.tiles[i]);
    for (size_t c = 0; c < base.cols.size(); ++c) complete.cols[c].push_back(base.cols[c][i]);
  }
  if (complete.tiles.empty()) throw invalid_argument("all tiles dropped: no complete rows");

  AssembleResult result;
  result.table = context_features(complete, grid);
  result.dropped_tiles = dropped;
  return result;
}

void write_feature_csv(const FeatureTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "tile_id,roi";
  for (const auto& name : table.col_names) out << ',' << name;
  out << "\n";
  char buf[40];
  for (size_t i = 0; i < table.tiles.size(); ++i) {
    out << table.tiles[i].id << ',' << table.tiles[i].roi;
    for (const auto& col : table.cols) {
      std::snprintf(buf, sizeof(buf), "%.17g", col[i]);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

FeatureTable read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open feature CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty feature CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) header.push_back(tok);
  }
  if (header.size() < 3 || header[0] != "tile_id" || header[1] != "roi")
    throw io_error(path + ": feature CSV must start with tile_id,roi columns");

  FeatureTable table;
  for (size_t c = 2; c < header.size(); ++c) {
    table.col_names.push_back(header[c]);
    table.cols.emplace_back();
    table.contextable.push_back(false);
    table.provenance.push_back("read from " + path);
  }
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() != header.size())
      throw io_error(path + ": row " + std::to_string(row) + ": field count mismatch");
    TileRef ref;
    ref.roi = fields[1];
    ref.id = std::stoi(fields[0]);
    table.tiles.push_back(std::move(ref));
    for (size_t c = 2; c < fields.size(); ++c) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), v);
      if (ec != std::errc() || p != fields[c].data() + fields[c].size())
        throw io_error(path + ": row " + std::to_string(row) + ": non-numeric value '" +
                       fields[c] + "'");
      table.cols[c - 2].push_back(v);
    }
  }
  table.validate();
  return table;
}

}  // namespace gridpop
