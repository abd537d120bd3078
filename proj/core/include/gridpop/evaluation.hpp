#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridpop/regression.hpp"

namespace gridpop {

double r2(const std::vector<double>& observed, const std::vector<double>& predicted);
double meae(const std::vector<double>& observed, const std::vector<double>& predicted);

struct MeapeResult {
  double percent = 0.0;
  int skipped = 0;  // rows with observed == 0
};
MeapeResult meape(const std::vector<double>& observed, const std::vector<double>& predicted);

double ameape(const std::vector<double>& observed, const std::vector<double>& predicted);
double aggpe(const std::vector<double>& observed, const std::vector<double>& predicted);

struct MetricsRow {
  double r2 = 0.0;
  double meape_pct = 0.0;
  int meape_skipped = 0;
  double ameape = 0.0;
  double meae = 0.0;
  std::map<std::string, double> aggpe_pct;  // per ROI plus "overall"
};

struct MetricsReport {
  MetricsRow model;
  MetricsRow null_model;
  int rows_used = 0;
};

/// Pooled metrics over the fold predictions. The null-model row predicts,
/// for a tile in fold f, the mean observed count over the other folds.
/// Every tile must appear exactly once.
MetricsReport pooled_report(const std::vector<PooledRow>& predictions);

std::string report_to_json(const MetricsReport& report);

/// 600x600 scatter of predicted vs observed on log10(1+count) axes with the
/// identity line.
void write_scatter_svg(const std::vector<PooledRow>& predictions, const std::string& path);

}  // namespace gridpop
