#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tailgame/dataset.hpp"
#include "tailgame/training.hpp"

namespace tailgame {

struct DownsampleSpec {
  std::size_t k_rarest = 0;
  double fraction = 0.0;
};

struct DataSource {
  std::optional<SynthSpec> synthetic;
  // Used when `synthetic` is empty; relative paths resolve against the config file.
  std::filesystem::path train_file, val_file, test_file;
  std::array<double, 3> split{0.4, 0.2, 0.4};
  std::optional<DownsampleSpec> downsample;  // applied to the training split only
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  DataSource data;
  TrainConfig train;  // fusion and metric options live here too
  std::vector<std::uint64_t> ablate_seeds;  // empty = {seed}
  std::vector<std::uint64_t> sweep_seeds;   // empty = {seed}
};

// JSON config. Every object is checked against its known keys; an unknown or
// mistyped key throws InputError naming the full key path.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {},
                           const std::string& source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace tailgame
