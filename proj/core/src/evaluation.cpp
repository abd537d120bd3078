#include "gridpop/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

namespace gridpop {

namespace {

void check_lengths(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw invalid_argument("observed/predicted length mismatch");
  if (a.empty()) throw invalid_argument("empty metric input");
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double r2(const std::vector<double>& observed, const std::vector<double>& predicted) {
  check_lengths(observed, predicted);
  double mean = 0.0;
  for (double y : observed) mean += y;
  mean /= observed.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
  }
  if (ss_tot == 0.0) throw invalid_argument("R2 undefined: observed vector is constant");
  return 1.0 - ss_res / ss_tot;
}

double meae(const std::vector<double>& observed, const std::vector<double>& predicted) {
  check_lengths(observed, predicted);
  std::vector<double> abs_err(observed.size());
  for (size_t i = 0; i < observed.size(); ++i) abs_err[i] = std::abs(observed[i] - predicted[i]);
  return median_of(std::move(abs_err));
}

MeapeResult meape(const std::vector<double>& observed, const std::vector<double>& predicted) {
  check_lengths(observed, predicted);
  std::vector<double> rel;
  MeapeResult result;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (observed[i] > 0.0)
      rel.push_back(std::abs(observed[i] - predicted[i]) / observed[i]);
    else
      ++result.skipped;
  }
  if (rel.empty()) throw invalid_argument("MeAPE undefined: all observed counts are zero");
  result.percent = 100.0 * median_of(std::move(rel));
  return result;
}

double ameape(const std::vector<double>& observed, const std::vector<double>& predicted) {
  check_lengths(observed, predicted);
  std::vector<double> rel(observed.size());
  for (size_t i = 0; i < observed.size(); ++i)
    rel[i] = std::abs(observed[i] - predicted[i]) / (observed[i] + 10.0);
  return median_of(std::move(rel));
}

double aggpe(const std::vector<double>& observed, const std::vector<double>& predicted) {
  check_lengths(observed, predicted);
  double so = 0.0, sp = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    so += observed[i];
    sp += predicted[i];
  }
  if (!(so > 0.0)) throw invalid_argument("AggPE undefined: observed total is zero");
  return 100.0 * std::abs(so - sp) / so;
}

namespace {

MetricsRow metrics_row(const std::vector<PooledRow>& rows,
                       const std::vector<double>& predicted) {
  std::vector<double> observed(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) observed[i] = rows[i].observed;

  MetricsRow out;
  out.r2 = r2(observed, predicted);
  const auto mp = meape(observed, predicted);
  out.meape_pct = mp.percent;
  out.meape_skipped = mp.skipped;
  out.ameape = ameape(observed, predicted);
  out.meae = meae(observed, predicted);

  std::set<std::string> rois;
  for (const auto& r : rows) rois.insert(r.tile.roi);
  for (const auto& roi : rois) {
    std::vector<double> o, p;
    for (size_t i = 0; i < rows.size(); ++i)
      if (rows[i].tile.roi == roi) {
        o.push_back(rows[i].observed);
        p.push_back(predicted[i]);
      }
    out.aggpe_pct[roi] = aggpe(o, p);
  }
  out.aggpe_pct["overall"] = aggpe(observed, predicted);
  return out;
}

}  // namespace

MetricsReport pooled_report(const std::vector<PooledRow>& predictions) {
  if (predictions.empty()) throw invalid_argument("no pooled predictions");
  std::set<TileRef> seen;
  for (const auto& r : predictions)
    if (!seen.insert(r.tile).second)
      throw invalid_argument("duplicate tile in pooled predictions: " + r.tile.roi + ":" +
                             std::to_string(r.tile.id));

  // Per-fold training means for the null model row.
  std::map<int, std::pair<double, int>> fold_totals;
  double total = 0.0;
  for (const auto& r : predictions) {
    fold_totals[r.fold].first += r.observed;
    fold_totals[r.fold].second += 1;
    total += r.observed;
  }
  std::vector<double> model_pred(predictions.size()), null_pred(predictions.size());
  const int n = static_cast<int>(predictions.size());
  for (size_t i = 0; i < predictions.size(); ++i) {
    model_pred[i] = predictions[i].predicted;
    const auto& [fold_sum, fold_n] = fold_totals[predictions[i].fold];
    const int train_n = n - fold_n;
    if (train_n <= 0) throw invalid_argument("null model has an empty training set");
    null_pred[i] = (total - fold_sum) / train_n;
  }

  MetricsReport report;
  report.model = metrics_row(predictions, model_pred);
  report.null_model = metrics_row(predictions, null_pred);
  report.rows_used = n;
  return report;
}

namespace {

nlohmann::json row_to_json(const MetricsRow& row) {
  nlohmann::json j;
  j["R2"] = row.r2;
  j["MeAPE"] = row.meape_pct;
  j["aMeAPE"] = row.ameape;
  j["MeAE"] = row.meae;
  j["AggPE"] = row.aggpe_pct;
  j["meape_skipped_rows"] = row.meape_skipped;
  return j;
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["model"] = row_to_json(report.model);
  j["null_model"] = row_to_json(report.null_model);
  j["rows_used"] = report.rows_used;
  return j.dump(2);
}

void write_scatter_svg(const std::vector<PooledRow>& predictions, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);

  constexpr int kSize = 600;
  constexpr int kMargin = 50;
  double max_axis = 1.0;
  for (const auto& r : predictions)
    max_axis = std::max({max_axis, std::log10(1.0 + r.observed), std::log10(1.0 + r.predicted)});
  max_axis *= 1.05;
  const double scale = (kSize - 2 * kMargin) / max_axis;
  auto px = [&](double v) { return kMargin + std::log10(1.0 + v) * scale; };
  auto py = [&](double v) { return kSize - kMargin - std::log10(1.0 + v) * scale; };

  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n";
  out << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", kMargin,
                kSize - kMargin, kSize - kMargin, kSize - kMargin);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", kMargin,
                kSize - kMargin, kMargin, kMargin);
  out << buf;
  // Identity line.
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
                "stroke-dasharray=\"4\"/>\n",
                px(0.0), py(0.0), static_cast<double>(kSize - kMargin),
                static_cast<double>(kMargin));
  out << buf;
  out << "<text x=\"300\" y=\"590\" text-anchor=\"middle\" font-size=\"14\">log10(1 + observed "
         "count)</text>\n";
  out << "<text x=\"15\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 15 300)\">log10(1 + predicted count)</text>\n";
  for (const auto& r : predictions) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\" "
                  "fill-opacity=\"0.6\"/>\n",
                  px(r.observed), py(r.predicted));
    out << buf;
  }
  out << "</svg>\n";
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace gridpop
