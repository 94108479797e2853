#pragma once

#include <vector>

#include "tailgame/fusion.hpp"
#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"
#include "tailgame/player.hpp"
#include "tailgame/rewards.hpp"

namespace tailgame {

// Everything the shared payoff and curiosity terms need besides parameters.
struct GameSpec {
  CuriositySpec curiosity;
  SurrogateSpec surrogate;
  FusionSpec fusion;
};

// Same shape as a PlayerModel's parameters.
struct PlayerGradient {
  Matrix weights;
  std::vector<double> bias;
};

// Player probabilities (B x |L_i| each) and fused probabilities (B x L).
struct BatchOutputs {
  std::vector<Matrix> player_probs;
  Matrix fused;
};

BatchOutputs forward_game(const std::vector<PlayerModel>& players, const Partition& partition,
                          const FusionSpec& fusion, const Matrix& features);

// Batch estimates of M, per-player r_i, d_i, C_i, J_i (sample means), and
// Phi = M + alpha * sum_i C_i. Throws NumericalError if M exceeds its bound.
RewardBreakdown evaluate_game(const std::vector<PlayerModel>& players, const Partition& partition,
                              const FrequencyTable& ft, const GameSpec& spec, const Matrix& features,
                              const Matrix& labels);
RewardBreakdown evaluate_game(const BatchOutputs& outputs, const Partition& partition, const FrequencyTable& ft,
                              const GameSpec& spec, const Matrix& labels);

}  // namespace tailgame
