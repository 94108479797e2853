#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"
#include "tailgame/player.hpp"

namespace tailgame {

enum class FusionStrategy { weighted_average, max_pool };

struct FusionSpec {
  FusionStrategy strategy = FusionStrategy::weighted_average;
  // [player][slot in block]; empty means uniform over covering players.
  std::vector<std::vector<double>> weights;
  // One global threshold, or one per label.
  std::vector<double> thresholds{0.5};

  double threshold_for(LabelId l) const { return thresholds.size() == 1 ? thresholds[0] : thresholds[l]; }
};

// Throws InputError("unnormalized fusion weights") when a label's covering
// weights do not sum to 1 within 1e-9, or on a malformed threshold vector.
void validate_fusion(const FusionSpec& spec, const Partition& partition);

// Explicit per-(player, slot) weights; uniform 1/|cover(l)| when spec.weights is empty.
std::vector<std::vector<double>> resolve_fusion_weights(const FusionSpec& spec, const Partition& partition);

// Player covering `label` with the largest probability; ties go to the lowest id.
PlayerId max_pool_winner(const Partition& partition, LabelId label,
                         const std::vector<std::span<const double>>& player_probs);

std::vector<double> fuse(std::span<const PlayerOutput> outputs, const Partition& partition,
                         const FusionSpec& spec);

// y_l = 1 iff p_l > tau_l. `tau` holds one global value or one per label.
std::vector<std::uint8_t> threshold(std::span<const double> fused, std::span<const double> tau);

// Per label: the midpoint between consecutive distinct validation scores that
// maximises F1 (smallest on ties). Labels without validation positives, or
// without two distinct scores, keep `default_tau`.
std::vector<double> tune_thresholds(const Matrix& scores, const Matrix& labels, double default_tau);

}  // namespace tailgame
