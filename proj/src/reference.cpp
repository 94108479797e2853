#include "tailgame/reference.hpp"

#include <cmath>

#include "tailgame/error.hpp"

namespace tailgame::reference {

Matrix forward_batch(const PlayerModel& player, const Matrix& features) {
  Matrix probs(features.rows(), player.block.size());
  for (std::size_t m = 0; m < features.rows(); ++m) {
    const auto out = player_forward(player, features.row(m));
    for (std::size_t k = 0; k < out.probs.size(); ++k) probs(m, k) = out.probs[k];
  }
  return probs;
}

Matrix fuse_batch(const std::vector<PlayerModel>& players, const Partition& partition, const FusionSpec& fusion,
                  const Matrix& features) {
  Matrix fused(features.rows(), partition.num_labels);
  std::vector<PlayerOutput> outputs(players.size());
  for (std::size_t m = 0; m < features.rows(); ++m) {
    for (PlayerId j = 0; j < players.size(); ++j) outputs[j] = player_forward(players[j], features.row(m));
    const auto p = fuse(outputs, partition, fusion);
    for (std::size_t l = 0; l < p.size(); ++l) fused(m, l) = p[l];
  }
  return fused;
}

PlayerGradient player_gradient(PlayerId player, const std::vector<PlayerModel>& players,
                               const Partition& partition, const FrequencyTable& ft, const GameSpec& spec,
                               const Matrix& features, const Matrix& labels) {
  const std::size_t B = features.rows();
  if (B == 0) throw InputError("empty batch");
  const std::size_t L = partition.num_labels;
  const PlayerModel& self = players[player];
  const auto weights = resolve_fusion_weights(spec.fusion, partition);
  const double alpha = spec.curiosity.alpha;
  const double beta = spec.curiosity.beta;
  const bool soft_f1 = spec.surrogate.kind == SurrogateKind::soft_f1;

  std::vector<PlayerOutput> outputs(players.size());
  auto forward_sample = [&](std::size_t m) {
    for (PlayerId j = 0; j < players.size(); ++j) outputs[j] = player_forward(players[j], features.row(m));
    return fuse(outputs, partition, spec.fusion);
  };

  // The pooled soft-F1 payoff couples samples through its numerator and denominator.
  double overlap = 0.0, predicted = 0.0, actual = 0.0;
  if (soft_f1) {
    for (std::size_t m = 0; m < B; ++m) {
      const auto p = forward_sample(m);
      for (LabelId l = 0; l < L; ++l) {
        const double w = spec.surrogate.label_weight(l);
        overlap += w * p[l] * labels(m, l);
        predicted += w * p[l];
        actual += w * labels(m, l);
      }
    }
  }
  const double num = 2.0 * overlap + kSoftF1Smoothing;
  const double den = predicted + actual + kSoftF1Smoothing;

  std::size_t shared = 0;
  for (LabelId l : self.block) shared += partition.coverage[l].size() > 1 ? 1 : 0;

  PlayerGradient g{Matrix(self.block.size(), self.feature_dim), std::vector<double>(self.block.size(), 0.0)};
  for (std::size_t m = 0; m < B; ++m) {
    const auto p = forward_sample(m);
    std::vector<std::span<const double>> probs;
    for (const auto& o : outputs) probs.emplace_back(o.probs);
    const auto x = features.row(m);
    for (std::size_t k = 0; k < self.block.size(); ++k) {
      const LabelId l = self.block[k];
      const double pi = outputs[player].probs[k];
      if (pi <= kProbEpsilon || pi >= 1.0 - kProbEpsilon) continue;
      const double y = labels(m, l);
      const double lw = spec.surrogate.label_weight(l);

      // Per-sample terms are scaled by B here and divided back out below.
      double d_payoff = soft_f1 ? static_cast<double>(B) * lw * (2.0 * y * den - num) / (den * den)
                                : lw * (y / p[l] - (1.0 - y) / (1.0 - p[l])) / static_cast<double>(L);
      if (spec.curiosity.mode == CorrectnessMode::soft_probability) {
        d_payoff += alpha * (y > 0.5 ? 1.0 : -1.0) * rarity_weight(ft, l);
      }
      double route = weights[player][k];
      if (spec.fusion.strategy == FusionStrategy::max_pool) {
        route = max_pool_winner(partition, l, probs) == player ? 1.0 : 0.0;
      }
      double d_disagree = 0.0;
      const auto& cover = partition.coverage[l];
      if (cover.size() > 1) {
        double q = 0.0;
        for (PlayerId j : cover) {
          if (j != player) q += probs[j][static_cast<std::size_t>(partition.slot(j, l))];
        }
        q /= static_cast<double>(cover.size() - 1);
        d_disagree = alpha * beta / static_cast<double>(shared) *
                     (std::log(pi / q) - std::log((1.0 - pi) / (1.0 - q)));
      }
      const double dz = (d_payoff * route + d_disagree) * pi * (1.0 - pi);
      for (std::size_t j = 0; j < x.size(); ++j) g.weights(k, j) += dz * x[j];
      g.bias[k] += dz;
    }
  }
  for (double& v : g.weights.values()) v /= static_cast<double>(B);
  for (double& v : g.bias) v /= static_cast<double>(B);
  return g;
}

}  // namespace tailgame::reference
