#pragma once

#include <string>

#include "gridpop/config.hpp"
#include "gridpop/evaluation.hpp"

namespace gridpop {

/// Library entry points behind the CLI subcommands. Each returns the
/// process exit code: 0 success, 1 runtime failure, 2 configuration
/// failure. Artifacts land under config.output_dir.

int run_validate(const RunConfig& config);
int run_features(const RunConfig& config);
int run_train(const RunConfig& config);
int run_evaluate(const RunConfig& config);
int run_predict(const RunConfig& config, const std::string& model_path, const std::string& roi);

/// Feature assembly for one ROI grid (shared by features and predict).
AssembleResult build_roi_features(const RunConfig& config, const TileGrid& grid);

}  // namespace gridpop
