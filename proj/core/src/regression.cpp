#include "gridpop/regression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gridpop {

void ModelHyperparams::validate() const {
  if (delta_grid.empty() || lambda_frac_grid.empty())
    throw invalid_argument("hyperparameter grids must be non-empty");
  for (double d : delta_grid)
    if (!(d > 0.0)) throw invalid_argument("delta candidates must be > 0");
  for (double f : lambda_frac_grid)
    if (f < 0.0) throw invalid_argument("lambda fractions must be >= 0");
}

double huber_value(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * a - 0.5 * delta * delta;
}

namespace {

double huber_psi(double r, double delta) {
  if (r > delta) return delta;
  if (r < -delta) return -delta;
  return r;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw invalid_argument("median of empty vector");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double huber_intercept(const Eigen::VectorXd& y, double delta) {
  if (y.size() == 0) throw invalid_argument("huber_intercept on empty vector");
  double lo = y.minCoeff(), hi = y.maxCoeff();
  if (lo == hi) return lo;
  // Derivative -sum psi(y - b) is nondecreasing in b; bisect for its root.
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    double h = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) h -= huber_psi(y[i] - mid, delta);
    if (h < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double delta) {
  if (X.rows() != y.size()) throw invalid_argument("X/y row mismatch");
  const double b = huber_intercept(y, delta);
  Eigen::VectorXd psi(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) psi[i] = huber_psi(y[i] - b, delta);
  const Eigen::VectorXd corr = X.transpose() * psi / static_cast<double>(y.size());
  return corr.size() == 0 ? 0.0 : corr.cwiseAbs().maxCoeff();
}

HuberFitResult fit_huber_l1(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double delta,
                            double lambda, bool fit_intercept) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n != y.size()) throw invalid_argument("X/y row mismatch");
  if (n == 0) throw invalid_argument("empty training set");
  if (!(delta > 0.0) || lambda < 0.0) throw invalid_argument("invalid delta/lambda");
  if (!X.allFinite() || !y.allFinite()) throw invalid_argument("non-finite training data");

  const double inv_n = 1.0 / static_cast<double>(n);
  auto smooth = [&](double b0, const Eigen::VectorXd& beta, Eigen::VectorXd& resid) {
    resid = y - Eigen::VectorXd::Constant(n, b0) - X * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += huber_value(resid[i], delta);
    return s * inv_n;
  };

  HuberFitResult result;
  result.beta = Eigen::VectorXd::Zero(p);
  result.intercept = fit_intercept ? huber_intercept(y, delta) : 0.0;

  Eigen::VectorXd resid(n), psi(n), grad(p), cand_beta(p), cand_resid(n);
  double g = smooth(result.intercept, result.beta, resid);
  double objective = g + lambda * result.beta.cwiseAbs().sum();
  result.objective_trace.push_back(objective);

  double step = 1.0;
  constexpr int kMaxIter = 10000;
  constexpr double kRelTol = 1e-9;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) psi[i] = huber_psi(resid[i], delta);
    grad.noalias() = -(X.transpose() * psi) * inv_n;
    const double grad_b0 = fit_intercept ? -psi.sum() * inv_n : 0.0;

    step = std::min(step * 1.25, 1e8);
    double cand_g = 0.0, cand_b0 = 0.0;
    while (true) {
      cand_b0 = result.intercept - step * grad_b0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double u = result.beta[j] - step * grad[j];
        const double thr = lambda * step;
        cand_beta[j] = u > thr ? u - thr : (u < -thr ? u + thr : 0.0);
      }
      cand_g = smooth(cand_b0, cand_beta, cand_resid);
      const Eigen::VectorXd diff = cand_beta - result.beta;
      const double db0 = cand_b0 - result.intercept;
      const double quad = grad.dot(diff) + grad_b0 * db0 +
                          (diff.squaredNorm() + db0 * db0) / (2.0 * step);
      if (cand_g <= g + quad + 1e-15) break;
      step *= 0.5;
      if (step < 1e-14) break;
    }
    const double cand_obj = cand_g + lambda * cand_beta.cwiseAbs().sum();
    if (!std::isfinite(cand_obj)) {
      std::string trace = "solver diverged; objective trace tail:";
      const size_t from = result.objective_trace.size() > 5 ? result.objective_trace.size() - 5 : 0;
      for (size_t i = from; i < result.objective_trace.size(); ++i)
        trace += " " + std::to_string(result.objective_trace[i]);
      throw invalid_argument(trace);
    }
    if (cand_obj > objective) break;  // step floor hit, already stationary
    result.beta.swap(cand_beta);
    result.intercept = cand_b0;
    resid.swap(cand_resid);
    g = cand_g;
    const double prev = objective;
    objective = cand_obj;
    result.objective_trace.push_back(objective);
    result.iterations = iter + 1;
    if (prev - objective <= kRelTol * std::max(1.0, std::abs(prev))) break;
  }
  return result;
}

double target_transform(double count) {
  if (count < 0.0) throw invalid_argument("negative population count");
  return std::log1p(count);
}

double inverse_transform(double log_value) { return std::max(0.0, std::expm1(log_value)); }

FoldAssignment spatial_kfold(
    const std::vector<std::pair<TileRef, std::pair<double, double>>>& tiles, int k) {
  if (k != 4) throw invalid_argument("spatial_kfold implements the 4-quadrant split; k must be 4");
  std::map<std::string, std::vector<size_t>> by_roi;
  for (size_t i = 0; i < tiles.size(); ++i) by_roi[tiles[i].first.roi].push_back(i);

  FoldAssignment out;
  out.k = k;
  for (auto& [roi, idx] : by_roi) {
    if (static_cast<int>(idx.size()) < k)
      throw invalid_argument("ROI '" + roi + "' has fewer tiles than folds");
    bool all_same = true;
    for (size_t i : idx)
      if (tiles[i].second != tiles[idx[0]].second) all_same = false;
    if (all_same && idx.size() > 1)
      std::cerr << "warning: all tiles of ROI '" << roi
                << "' share one coordinate; splitting by tile id only\n";

    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
      return std::make_pair(tiles[a].second.first, tiles[a].first.id) <
             std::make_pair(tiles[b].second.first, tiles[b].first.id);
    });
    const size_t half = sorted.size() / 2;
    for (int side = 0; side < 2; ++side) {
      std::vector<size_t> part(sorted.begin() + (side ? half : 0),
                               side ? sorted.end() : sorted.begin() + half);
      std::sort(part.begin(), part.end(), [&](size_t a, size_t b) {
        return std::make_pair(tiles[a].second.second, tiles[a].first.id) <
               std::make_pair(tiles[b].second.second, tiles[b].first.id);
      });
      const size_t phalf = part.size() / 2;
      for (size_t j = 0; j < part.size(); ++j)
        out.fold[tiles[part[j]].first] = side * 2 + (j < phalf ? 0 : 1);
    }
  }
  return out;
}

double FittedModel::predict_count(const std::map<std::string, double>& features) const {
  double v = intercept;
  for (size_t j = 0; j < feature_names.size(); ++j) {
    const auto it = features.find(feature_names[j]);
    if (it == features.end())
      throw invalid_argument("missing feature '" + feature_names[j] + "' for prediction");
    v += coef[j] * (it->second - means[j]) / sds[j];
  }
  return inverse_transform(v);
}

std::string FittedModel::to_json() const {
  nlohmann::json j;
  j["feature_names"] = feature_names;
  j["coefficients"] = coef;
  j["intercept"] = intercept;
  j["means"] = means;
  j["sds"] = sds;
  j["dropped"] = dropped;
  j["delta"] = delta;
  j["lambda"] = lambda;
  j["fold"] = fold;
  j["seed"] = seed;
  return j.dump(2);
}

FittedModel FittedModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FittedModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.coef = j.at("coefficients").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.means = j.at("means").get<std::vector<double>>();
  m.sds = j.at("sds").get<std::vector<double>>();
  m.dropped = j.at("dropped").get<std::vector<std::string>>();
  m.delta = j.at("delta").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.fold = j.at("fold").get<int>();
  m.seed = j.at("seed").get<unsigned>();
  if (m.coef.size() != m.feature_names.size() || m.means.size() != m.feature_names.size() ||
      m.sds.size() != m.feature_names.size())
    throw invalid_argument("model JSON: coefficient vector misaligned with feature names");
  return m;
}

double null_model(const std::vector<double>& train_counts) {
  if (train_counts.empty()) throw invalid_argument("null model needs at least one training row");
  double sum = 0.0;
  for (double c : train_counts) sum += c;
  return sum / train_counts.size();
}

namespace {

struct Scaler {
  std::vector<int> retained;  // indices into the raw column set
  std::vector<double> means, sds;
  std::vector<std::string> dropped;
};

Scaler make_scaler(const Eigen::MatrixXd& X, const std::vector<int>& rows,
                   const std::vector<std::string>& names) {
  Scaler s;
  for (int j = 0; j < X.cols(); ++j) {
    double mean = 0.0;
    for (int i : rows) mean += X(i, j);
    mean /= rows.size();
    double var = 0.0;
    for (int i : rows) var += (X(i, j) - mean) * (X(i, j) - mean);
    const double sd = std::sqrt(var / rows.size());
    if (sd > 1e-12) {
      s.retained.push_back(j);
      s.means.push_back(mean);
      s.sds.push_back(sd);
    } else {
      s.dropped.push_back(names[j]);
    }
  }
  return s;
}

Eigen::MatrixXd standardized(const Eigen::MatrixXd& X, const std::vector<int>& rows,
                             const Scaler& s) {
  Eigen::MatrixXd out(rows.size(), s.retained.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < s.retained.size(); ++j)
      out(i, j) = (X(rows[i], s.retained[j]) - s.means[j]) / s.sds[j];
  return out;
}

}  // namespace

CvResult nested_cv_train(const FeatureTable& features, const SurveyTable& survey,
                         const FoldAssignment& outer, const ModelHyperparams& grids,
                         unsigned seed) {
  features.validate();
  grids.validate();

  std::map<TileRef, int> feature_row;
  for (size_t i = 0; i < features.tiles.size(); ++i)
    feature_row[features.tiles[i]] = static_cast<int>(i);

  struct Row {
    TileRef tile;
    double count;
    int feature_idx;
    int fold;
  };
  std::vector<Row> rows;
  for (const auto& sr : survey.active()) {
    const auto fit = feature_row.find(sr.tile);
    if (fit == feature_row.end())
      throw invalid_argument("survey tile " + sr.tile.roi + ":" + std::to_string(sr.tile.id) +
                             " has no feature row");
    const auto oit = outer.fold.find(sr.tile);
    if (oit == outer.fold.end())
      throw invalid_argument("survey tile " + sr.tile.roi + ":" + std::to_string(sr.tile.id) +
                             " has no fold assignment");
    rows.push_back({sr.tile, static_cast<double>(sr.observed), fit->second, oit->second});
  }
  if (rows.empty()) throw invalid_argument("no usable survey rows");
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.tile < b.tile; });

  const int p = static_cast<int>(features.n_cols());
  Eigen::MatrixXd X(rows.size(), p);
  Eigen::VectorXd counts(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = features.cols[j][rows[i].feature_idx];
    counts[i] = rows[i].count;
  }

  CvResult result;
  for (int f = 0; f < outer.k; ++f) {
    std::vector<int> train_idx, val_idx;
    for (size_t i = 0; i < rows.size(); ++i)
      (rows[i].fold == f ? val_idx : train_idx).push_back(static_cast<int>(i));
    if (train_idx.empty()) throw invalid_argument("empty training fold " + std::to_string(f));
    if (val_idx.empty()) continue;

    const Scaler scaler = make_scaler(X, train_idx, features.col_names);
    const Eigen::MatrixXd Xs = standardized(X, train_idx, scaler);
    Eigen::VectorXd ylog(train_idx.size());
    for (size_t i = 0; i < train_idx.size(); ++i) ylog[i] = target_transform(counts[train_idx[i]]);

    // Seeded ROI-stratified inner 3-fold assignment over the training rows.
    constexpr int kInner = 3;
    std::vector<int> inner_fold(train_idx.size(), -1);
    {
      std::mt19937 rng(seed * 1000003u + static_cast<unsigned>(f));
      std::map<std::string, std::vector<int>> by_roi;
      for (size_t i = 0; i < train_idx.size(); ++i)
        by_roi[rows[train_idx[i]].tile.roi].push_back(static_cast<int>(i));
      for (auto& [roi, members] : by_roi) {
        std::shuffle(members.begin(), members.end(), rng);
        for (size_t j = 0; j < members.size(); ++j)
          inner_fold[members[j]] = static_cast<int>(j % kInner);
      }
    }

    double best_score = std::numeric_limits<double>::infinity();
    double best_delta = grids.delta_grid.front(), best_lambda = 0.0;
    for (double delta : grids.delta_grid) {
      const double lmax = lambda_max(Xs, ylog, delta);
      for (double frac : grids.lambda_frac_grid) {
        const double lambda = frac * lmax;
        std::vector<double> fold_scores;
        for (int jf = 0; jf < kInner; ++jf) {
          std::vector<int> itr, iva;
          for (size_t i = 0; i < train_idx.size(); ++i)
            (inner_fold[i] == jf ? iva : itr).push_back(static_cast<int>(i));
          if (itr.empty() || iva.empty())
            throw invalid_argument("empty inner fold in outer fold " + std::to_string(f));
          Eigen::MatrixXd Xtr(itr.size(), Xs.cols());
          Eigen::VectorXd ytr(itr.size());
          for (size_t i = 0; i < itr.size(); ++i) {
            Xtr.row(i) = Xs.row(itr[i]);
            ytr[i] = ylog[itr[i]];
          }
          const auto fit = fit_huber_l1(Xtr, ytr, delta, lambda);
          std::vector<double> abs_err;
          for (int i : iva) {
            const double pred = inverse_transform(Xs.row(i).dot(fit.beta) + fit.intercept);
            abs_err.push_back(std::abs(pred - counts[train_idx[i]]));
          }
          fold_scores.push_back(median_of(std::move(abs_err)));
        }
        double score = 0.0;
        for (double s : fold_scores) score += s;
        score /= fold_scores.size();
        if (score < best_score) {
          best_score = score;
          best_delta = delta;
          best_lambda = lambda;
        }
      }
    }

    const auto fit = fit_huber_l1(Xs, ylog, best_delta, best_lambda);
    FittedModel model;
    for (size_t j = 0; j < scaler.retained.size(); ++j) {
      model.feature_names.push_back(features.col_names[scaler.retained[j]]);
      model.coef.push_back(fit.beta[static_cast<Eigen::Index>(j)]);
    }
    model.intercept = fit.intercept;
    model.means = scaler.means;
    model.sds = scaler.sds;
    model.dropped = scaler.dropped;
    model.delta = best_delta;
    model.lambda = best_lambda;
    model.fold = f;
    model.seed = seed;
    result.fold_models.push_back(std::move(model));

    const Eigen::MatrixXd Xv = standardized(X, val_idx, scaler);
    for (size_t i = 0; i < val_idx.size(); ++i) {
      PooledRow pr;
      pr.tile = rows[val_idx[i]].tile;
      pr.fold = f;
      pr.observed = counts[val_idx[i]];
      pr.predicted = inverse_transform(Xv.row(i).dot(fit.beta) + fit.intercept);
      result.pooled.push_back(pr);
    }
  }
  std::sort(result.pooled.begin(), result.pooled.end(),
            [](const PooledRow& a, const PooledRow& b) { return a.tile < b.tile; });
  return result;
}

void write_pooled_csv(const std::vector<PooledRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "tile_id,roi,fold,observed,predicted\n";
  char buf[40];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.predicted);
    out << r.tile.id << ',' << r.tile.roi << ',' << r.fold << ',' << static_cast<long>(r.observed)
        << ',' << buf << "\n";
  }
  if (!out) throw io_error("write failed: " + path);
}

std::vector<PooledRow> read_pooled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open pooled CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty pooled CSV");
  std::vector<PooledRow> out;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() != 5)
      throw io_error(path + ": row " + std::to_string(row) + ": expected 5 fields");
    PooledRow pr;
    pr.tile.id = std::stoi(fields[0]);
    pr.tile.roi = fields[1];
    pr.fold = std::stoi(fields[2]);
    pr.observed = std::stod(fields[3]);
    pr.predicted = std::stod(fields[4]);
    out.push_back(std::move(pr));
  }
  return out;
}

}  // namespace gridpop
