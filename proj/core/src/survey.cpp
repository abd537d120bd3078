#include "gridpop/survey.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gridpop {

std::vector<SurveyRow> SurveyTable::active() const {
  std::vector<SurveyRow> out;
  for (const auto& row : rows)
    if (!row.excluded) out.push_back(row);
  return out;
}

SurveyTable grid_population(const std::vector<PointRecord>& households, const TileGrid& grid,
                            const std::vector<SurveyedTile>& surveyed) {
  grid.validate();
  std::map<int, SurveyRow> by_tile;
  for (const auto& st : surveyed) {
    if (st.tile_id < 0 || st.tile_id >= grid.tile_count())
      throw invalid_argument("surveyed tile id out of range: " + std::to_string(st.tile_id));
    SurveyRow row;
    row.tile = {grid.roi_label, st.tile_id};
    row.psu = st.psu;
    by_tile.emplace(st.tile_id, std::move(row));
  }

  std::string outside;
  int outside_count = 0;
  for (const auto& hh : households) {
    const auto persons = hh.numeric_attr("persons");
    if (!persons) throw invalid_argument("household record missing numeric 'persons' attribute");
    if (*persons < 0 || *persons != std::floor(*persons))
      throw invalid_argument("persons must be a non-negative integer, got " +
                             std::to_string(*persons));
    const auto id = grid.tile_at(hh.x, hh.y);
    if (!id) {
      ++outside_count;
      if (outside_count <= 10)
        outside += " (" + std::to_string(hh.x) + ", " + std::to_string(hh.y) + ")";
      continue;
    }
    auto [it, inserted] = by_tile.try_emplace(*id);
    if (inserted) it->second.tile = {grid.roi_label, *id};
    it->second.observed += static_cast<long>(*persons);
  }
  if (outside_count > 0)
    throw invalid_argument("households outside grid '" + grid.roi_label + "':" + outside +
                           (outside_count > 10 ? " ..." : "") + " (" +
                           std::to_string(outside_count) + " total)");

  SurveyTable table;
  for (auto& [id, row] : by_tile) table.rows.push_back(std::move(row));
  return table;
}

SurveyTable apply_exclusions(SurveyTable table, const std::vector<TileRef>& exclusion_ids) {
  for (const auto& ref : exclusion_ids) {
    bool found = false;
    for (auto& row : table.rows) {
      if (row.tile.id == ref.id && (ref.roi.empty() || row.tile.roi == ref.roi)) {
        row.excluded = true;
        found = true;
      }
    }
    if (!found)
      throw invalid_argument("exclusion id not present in survey table: " +
                             (ref.roi.empty() ? "" : ref.roi + ":") + std::to_string(ref.id));
  }
  return table;
}

namespace {

std::vector<std::vector<std::string>> read_simple_csv(const std::string& path,
                                                      size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open CSV: " + path);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (first) {  // header
      first = false;
      continue;
    }
    if (fields.size() < min_cols)
      throw io_error(path + ": row has " + std::to_string(fields.size()) +
                     " fields, expected at least " + std::to_string(min_cols));
    rows.push_back(std::move(fields));
  }
  return rows;
}

int parse_int(const std::string& s, const std::string& path) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw io_error(path + ": non-integer tile id '" + s + "'");
  return v;
}

}  // namespace

std::vector<SurveyedTile> parse_surveyed_tiles_csv(const std::string& path) {
  std::vector<SurveyedTile> out;
  for (const auto& fields : read_simple_csv(path, 2)) {
    SurveyedTile st;
    st.tile_id = parse_int(fields[0], path);
    st.roi = fields[1];
    if (fields.size() > 2) st.psu = fields[2];
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<std::pair<TileRef, std::string>> parse_exclusions_csv(const std::string& path) {
  std::vector<std::pair<TileRef, std::string>> out;
  for (const auto& fields : read_simple_csv(path, 2)) {
    TileRef ref;
    ref.id = parse_int(fields[0], path);
    if (fields.size() > 2) ref.roi = fields[2];
    out.emplace_back(std::move(ref), fields[1]);
  }
  return out;
}

}  // namespace gridpop
