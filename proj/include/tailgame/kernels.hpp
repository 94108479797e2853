#pragma once

// OpenMP batch kernels. Every kernel writes disjoint output rows per thread
// and performs reductions in a fixed order, so results are bit-identical for
// any thread count. Serial counterparts live in reference.hpp.

#include <cstddef>
#include <vector>

#include "tailgame/game.hpp"

namespace tailgame::kernels {

// B x |L_i| clamped probabilities.
Matrix forward_batch(const PlayerModel& player, const Matrix& features);

// B x L fused probabilities. `weights` from resolve_fusion_weights.
Matrix fuse_batch(const std::vector<Matrix>& player_probs, const Partition& partition, FusionStrategy strategy,
                  const std::vector<std::vector<double>>& weights);

// Batch-mean ascent gradient of J_i = M + alpha * mean_x C_i(x) with respect
// to player i's parameters, peers held fixed. M and the rarity bonus are
// differentiated through the fusion operator, the disagreement term through
// pi_i only. Throws InputError on an empty batch.
PlayerGradient player_gradient(PlayerId player, const std::vector<PlayerModel>& players,
                               const Partition& partition, const FrequencyTable& ft, const GameSpec& spec,
                               const Matrix& features, const Matrix& labels);

// Per-sample operation count of one cyclic sweep:
// sum_i |L_i| (d + 1) for the logits plus |L_i| + |O_i| for the rewards.
std::size_t sweep_operation_count(const Partition& partition, std::size_t feature_dim);

int max_threads();

}  // namespace tailgame::kernels
