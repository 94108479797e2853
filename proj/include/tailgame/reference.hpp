#pragma once

// Serial reference implementations of the batch kernels. They walk the batch
// one sample at a time in the order of the training pseudocode (forward every
// player, fuse, accumulate the gradient, divide by B) and exist to check the
// OpenMP kernels and to serve as the baseline in the benchmarks.

#include <vector>

#include "tailgame/game.hpp"

namespace tailgame::reference {

Matrix forward_batch(const PlayerModel& player, const Matrix& features);

Matrix fuse_batch(const std::vector<PlayerModel>& players, const Partition& partition, const FusionSpec& fusion,
                  const Matrix& features);

PlayerGradient player_gradient(PlayerId player, const std::vector<PlayerModel>& players,
                               const Partition& partition, const FrequencyTable& ft, const GameSpec& spec,
                               const Matrix& features, const Matrix& labels);

}  // namespace tailgame::reference
