#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"

namespace tailgame {

// Player probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon].
inline constexpr double kProbEpsilon = 1e-7;

// Per-label logistic regression over shared features for one label block.
struct PlayerModel {
  PlayerId id = 0;
  std::vector<LabelId> block;
  std::size_t feature_dim = 0;
  Matrix weights;  // |block| x feature_dim
  std::vector<double> bias;

  std::size_t num_outputs() const { return block.size(); }
  bool all_finite() const;
  bool operator==(const PlayerModel&) const = default;
};

struct PlayerOutput {
  PlayerId player_id = 0;
  std::vector<double> probs;  // aligned with the player's block
};

// Weights and biases i.i.d. N(0, sigma^2) from a seeded generator, players
// drawn in id order.
std::vector<PlayerModel> init_players(const Partition& partition, std::size_t feature_dim, double sigma,
                                      std::uint64_t seed);

double sigmoid(double z);
double clamp_prob(double p);

// clamp(sigmoid(w_l . x + b_l)).
PlayerOutput player_forward(const PlayerModel& player, std::span<const double> x);

}  // namespace tailgame
