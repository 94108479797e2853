#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tailgame/config.hpp"

namespace tailgame {

// Each command reads everything it needs from the RunConfig, writes its
// artifacts under config.output_dir and a short report to `out`. Errors are
// thrown as InputError (exit 2) or NumericalError (exit 3).

struct LoadedData {
  DatasetSplits splits;
  std::string source;
};

// Synthetic specs are generated and split with the run seed; file sources are
// read as given. Downsampling, if configured, touches the training split only.
LoadedData load_data(const RunConfig& config);

// train.txt, val.txt, test.txt and manifest.json.
void cmd_generate(const RunConfig& config, std::ostream& out);

// checkpoint.json, diagnostics.jsonl, summary.json, metrics.json (test split).
void cmd_train(const RunConfig& config, std::ostream& out);

// Metrics and specialization ranks of a checkpoint on a sparse data file;
// written to eval.json and printed.
void cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint,
              const std::filesystem::path& data, std::ostream& out);

// ablation.json: full / no_curiosity / single_predictor over the ablate seeds.
void cmd_ablate(const RunConfig& config, std::ostream& out);

// sweep.json and sweep.csv. `parameter` is one of alpha, n_players, beta, rho.
// A value that fails to train is reported with status "error".
void cmd_sweep(const RunConfig& config, const std::string& parameter, const std::vector<double>& values,
               std::ostream& out);

// Frequencies and partition of the training split, printed as JSON.
void cmd_inspect_partition(const RunConfig& config, std::ostream& out);

}  // namespace tailgame
