#include "tailgame/game.hpp"

#include <string>

#include "tailgame/error.hpp"
#include "tailgame/kernels.hpp"

namespace tailgame {

BatchOutputs forward_game(const std::vector<PlayerModel>& players, const Partition& partition,
                          const FusionSpec& fusion, const Matrix& features) {
  BatchOutputs out;
  out.player_probs.reserve(players.size());
  for (const auto& p : players) out.player_probs.push_back(kernels::forward_batch(p, features));
  out.fused = kernels::fuse_batch(out.player_probs, partition, fusion.strategy,
                                  resolve_fusion_weights(fusion, partition));
  return out;
}

RewardBreakdown evaluate_game(const std::vector<PlayerModel>& players, const Partition& partition,
                              const FrequencyTable& ft, const GameSpec& spec, const Matrix& features,
                              const Matrix& labels) {
  return evaluate_game(forward_game(players, partition, spec.fusion, features), partition, ft, spec, labels);
}

RewardBreakdown evaluate_game(const BatchOutputs& outputs, const Partition& partition, const FrequencyTable& ft,
                              const GameSpec& spec, const Matrix& labels) {
  const std::size_t B = outputs.fused.rows();
  const std::size_t N = partition.num_players();
  if (B == 0) throw InputError("empty batch");

  RewardBreakdown rb;
  rb.surrogate = surrogate_score(outputs.fused, labels, spec.surrogate);
  if (!(rb.surrogate <= spec.surrogate.max_value() + 1e-12)) {
    throw NumericalError("shared payoff " + std::to_string(rb.surrogate) + " exceeds its upper bound");
  }

  Matrix rarity(B, N), disagree(B, N);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(B); ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    const auto p = outputs.fused.row(m);
    const auto decisions = threshold(p, spec.fusion.thresholds);
    std::vector<std::span<const double>> probs;
    probs.reserve(N);
    for (const auto& pp : outputs.player_probs) probs.push_back(pp.row(m));
    for (PlayerId i = 0; i < N; ++i) {
      rarity(m, i) = rarity_bonus(partition.blocks[i], p, decisions, labels.row(m), ft, spec.curiosity.mode);
      disagree(m, i) = disagreement(i, probs, partition);
    }
  }

  rb.players.resize(N);
  std::vector<double> curiosities(N);
  for (PlayerId i = 0; i < N; ++i) {
    double r = 0.0, d = 0.0;
    for (std::size_t m = 0; m < B; ++m) {
      r += rarity(m, i);
      d += disagree(m, i);
    }
    auto& pr = rb.players[i];
    pr.rarity = r / static_cast<double>(B);
    pr.disagreement = d / static_cast<double>(B);
    pr.curiosity = curiosity(pr.rarity, pr.disagreement, spec.curiosity.beta);
    pr.objective = per_player_objective(rb.surrogate, pr.curiosity, spec.curiosity.alpha);
    curiosities[i] = pr.curiosity;
  }
  rb.potential = potential(rb.surrogate, curiosities, spec.curiosity.alpha);
  return rb;
}

}  // namespace tailgame
