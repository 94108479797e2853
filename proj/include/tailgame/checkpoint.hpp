#pragma once

#include <filesystem>
#include <string>

#include "tailgame/training.hpp"

namespace tailgame {

inline constexpr int kCheckpointVersion = 1;

// Versioned JSON: partition (with the training label counts it was built
// from), feature_dim, fusion settings and every player's parameters. Doubles
// are written in shortest round-trip form, so load(save(m)) == m exactly.
std::string checkpoint_json(const TrainedModel& model);
TrainedModel parse_checkpoint(const std::string& text, const std::string& source_name = "<checkpoint>");

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace tailgame
