#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "tailgame/commands.hpp"
#include "tailgame/error.hpp"

using namespace tailgame;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;

  RunConfig load() const {
    auto cfg = load_run_config(config);
    if (seed) {
      cfg.seed = *seed;
      cfg.train.seed = *seed;
    }
    if (!out.empty()) cfg.output_dir = out;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)")->required();
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curiosity-driven multi-player multi-label trainer"};
  app.require_subcommand(1);

  Common generate, train_opts, eval, ablate, sweep, inspect;
  auto* gen_cmd = app.add_subcommand("generate", "write synthetic train/val/test files and a manifest");
  add_common(gen_cmd, generate);

  auto* train_cmd = app.add_subcommand("train", "train players, write checkpoint, diagnostics and metrics");
  add_common(train_cmd, train_opts);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a sparse data file");
  add_common(eval_cmd, eval);
  std::string checkpoint, data;
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint.json from train")->required();
  eval_cmd->add_option("--data", data, "sparse data file")->required();

  auto* ablate_cmd = app.add_subcommand("ablate", "full vs no_curiosity vs single_predictor");
  add_common(ablate_cmd, ablate);

  auto* sweep_cmd = app.add_subcommand("sweep", "one run per value per seed");
  add_common(sweep_cmd, sweep);
  std::string parameter;
  std::vector<double> values;
  sweep_cmd->add_option("--param", parameter, "alpha, n_players, beta or rho")->required();
  sweep_cmd->add_option("--values", values, "values to try")->required()->delimiter(',');

  auto* inspect_cmd = app.add_subcommand("inspect-partition", "print frequencies and the label partition");
  add_common(inspect_cmd, inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_cmd) cmd_generate(generate.load(), std::cout);
    if (*train_cmd) cmd_train(train_opts.load(), std::cout);
    if (*eval_cmd) cmd_eval(eval.load(), checkpoint, data, std::cout);
    if (*ablate_cmd) cmd_ablate(ablate.load(), std::cout);
    if (*sweep_cmd) cmd_sweep(sweep.load(), parameter, values, std::cout);
    if (*inspect_cmd) cmd_inspect_partition(inspect.load(), std::cout);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
