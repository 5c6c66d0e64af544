#include <CLI11.hpp>

#include "torusnf/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"torusnf: spectral workbench for time dependent Schrodinger "
               "operators on flat tori"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  int threads = 0;
  std::int64_t seed = -1;

  const std::vector<std::string> names = {"validate", "partition", "normal-form",
                                          "evolve", "fit", "all"};
  const std::vector<std::string> descs = {
      "check the parameter constraints and print the derived exponent",
      "build the resonant block partition and verify its properties",
      "run the iterated normal form and report remainder orders",
      "integrate the configured system and emit a norm trace CSV",
      "fit a growth exponent to the norm trace",
      "run the whole pipeline"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config, "path to the JSON config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "cap the worker pool");
    sub->add_option("--seed", seed, "override the config seed");
  }

  CLI11_PARSE(app, argc, argv);

  torusnf::RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  opts.threads = threads;

  return torusnf::run_experiment(config, app.get_subcommands().front()->get_name(), opts);
}
