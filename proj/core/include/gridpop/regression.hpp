#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridpop/features.hpp"
#include "gridpop/survey.hpp"

namespace gridpop {

/// Candidate grids for the Huber transition delta and the l1 weight.
/// Lambda candidates are fractions of the data-dependent lambda_max.
struct ModelHyperparams {
  std::vector<double> delta_grid{0.5, 1.0, 1.35, 2.0};
  std::vector<double> lambda_frac_grid{0.0001, 0.001, 0.01, 0.1, 1.0};

  void validate() const;
};

struct FittedModel {
  std::vector<std::string> feature_names;  // retained (non-constant) features
  std::vector<double> coef;                // aligned to feature_names
  double intercept = 0.0;
  std::vector<double> means, sds;          // z-scoring parameters, aligned
  std::vector<std::string> dropped;        // zero-variance features
  double delta = 1.35;
  double lambda = 0.0;
  int fold = -1;
  unsigned seed = 0;

  /// Predicted count for one raw (unstandardized) feature row.
  double predict_count(const std::map<std::string, double>& features) const;

  std::string to_json() const;
  static FittedModel from_json(const std::string& text);
};

struct FoldAssignment {
  std::map<TileRef, int> fold;
  int k = 0;
};

/// Quadrant split per ROI: tiles halved by median easting, each half by its
/// median northing. Ties broken by tile id order. k must be 4.
FoldAssignment spatial_kfold(
    const std::vector<std::pair<TileRef, std::pair<double, double>>>& tiles, int k = 4);

struct HuberFitResult {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  std::vector<double> objective_trace;  // objective after every iteration
  int iterations = 0;
};

/// Huber value at residual r (quadratic within |r| <= delta, linear beyond).
double huber_value(double r, double delta);

/// min over b of sum_i huber(y_i - b, delta): the Huber location estimate.
double huber_intercept(const Eigen::VectorXd& y, double delta);

/// Smallest l1 weight at which all coefficients are exactly zero:
/// max_j |(1/n) sum_i psi_delta(y_i - yH) x_ij|.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double delta);

/// Proximal gradient (backtracking line search + soft thresholding) on
/// (1/n) sum_i huber(y_i - b0 - x_i.beta, delta) + lambda * ||beta||_1.
/// X is expected column-standardized; the intercept is unpenalized.
HuberFitResult fit_huber_l1(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double delta,
                            double lambda, bool fit_intercept = true);

/// log(1 + count) and its clamped inverse.
double target_transform(double count);
double inverse_transform(double log_value);

struct PooledRow {
  TileRef tile;
  int fold = -1;
  double observed = 0.0;
  double predicted = 0.0;
};

struct CvResult {
  std::vector<FittedModel> fold_models;
  std::vector<PooledRow> pooled;
};

/// Nested cross-validation: per outer fold, a seeded ROI-stratified 3-fold
/// inner split selects (delta, lambda) by mean count-scale MeAE, the model
/// is refit on the whole training fold and the held-out fold predicted.
CvResult nested_cv_train(const FeatureTable& features, const SurveyTable& survey,
                         const FoldAssignment& outer, const ModelHyperparams& grids,
                         unsigned seed);

/// Constant predictor: mean of the training counts.
double null_model(const std::vector<double>& train_counts);

void write_pooled_csv(const std::vector<PooledRow>& rows, const std::string& path);
std::vector<PooledRow> read_pooled_csv(const std::string& path);

}  // namespace gridpop
