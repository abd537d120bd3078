#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "gridpop/pipeline.hpp"

namespace {

// Outputs are independent of thread count; the flag only bounds internal
// parallelism.
int g_threads = 0;

gridpop::RunConfig load(const std::string& config_path, const std::string& out_override,
                        int seed_override) {
  gridpop::RunConfig cfg = gridpop::load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (const char* env = std::getenv("GRIDPOP_OUT"); env && out_override.empty())
    cfg.output_dir = env;
  if (seed_override >= 0) cfg.seed = static_cast<unsigned>(seed_override);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridded population estimation pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, model_path, roi;
  int seed = -1;
  app.add_option("--threads", g_threads, "worker thread bound (default: machine parallelism)");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON")->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--seed", seed, "seed override");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the run configuration");
  add_common(validate);
  CLI::App* features = app.add_subcommand("features", "build the per-tile feature table");
  add_common(features);
  CLI::App* train = app.add_subcommand("train", "nested spatial cross-validation training");
  add_common(train);
  CLI::App* evaluate = app.add_subcommand("evaluate", "pooled metrics report and scatter plot");
  add_common(evaluate);
  CLI::App* predict = app.add_subcommand("predict", "predict counts on an ROI grid");
  add_common(predict);
  predict->add_option("--model", model_path, "fitted model JSON")->required();
  predict->add_option("--roi", roi, "target ROI label")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    gridpop::RunConfig cfg = load(config_path, out_dir, seed);
    if (validate->parsed()) return gridpop::run_validate(cfg);
    if (features->parsed()) return gridpop::run_features(cfg);
    if (train->parsed()) return gridpop::run_train(cfg);
    if (evaluate->parsed()) return gridpop::run_evaluate(cfg);
    if (predict->parsed()) return gridpop::run_predict(cfg, model_path, roi);
  } catch (const gridpop::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
