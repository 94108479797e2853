#include "tailgame/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tailgame/error.hpp"

namespace tailgame {

void validate_fusion(const FusionSpec& spec, const Partition& partition) {
  if (spec.thresholds.size() != 1 && spec.thresholds.size() != partition.num_labels) {
    throw InputError("threshold vector must hold 1 or L values");
  }
  for (double t : spec.thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw InputError("thresholds must lie in (0,1)");
  }
  if (spec.strategy != FusionStrategy::weighted_average || spec.weights.empty()) return;
  if (spec.weights.size() != partition.num_players()) throw InputError("fusion weights need one row per player");
  std::vector<double> total(partition.num_labels, 0.0);
  for (PlayerId i = 0; i < partition.num_players(); ++i) {
    if (spec.weights[i].size() != partition.blocks[i].size()) {
      throw InputError("fusion weights must align with player blocks");
    }
    for (std::size_t k = 0; k < partition.blocks[i].size(); ++k) {
      if (!(spec.weights[i][k] >= 0.0)) throw InputError("fusion weights must be non-negative");
      total[partition.blocks[i][k]] += spec.weights[i][k];
    }
  }
  for (double t : total) {
    if (std::abs(t - 1.0) > 1e-9) throw InputError("unnormalized fusion weights");
  }
}

std::vector<std::vector<double>> resolve_fusion_weights(const FusionSpec& spec, const Partition& partition) {
  if (!spec.weights.empty()) return spec.weights;
  std::vector<std::vector<double>> w(partition.num_players());
  for (PlayerId i = 0; i < partition.num_players(); ++i) {
    w[i].reserve(partition.blocks[i].size());
    for (LabelId l : partition.blocks[i]) {
      w[i].push_back(1.0 / static_cast<double>(partition.coverage[l].size()));
    }
  }
  return w;
}

PlayerId max_pool_winner(const Partition& partition, LabelId label,
                         const std::vector<std::span<const double>>& player_probs) {
  const auto& cover = partition.coverage[label];
  PlayerId best = cover.front();
  double best_p = player_probs[best][static_cast<std::size_t>(partition.slot(best, label))];
  for (std::size_t c = 1; c < cover.size(); ++c) {
    const PlayerId j = cover[c];
    const double p = player_probs[j][static_cast<std::size_t>(partition.slot(j, label))];
    if (p > best_p) {
      best = j;
      best_p = p;
    }
  }
  return best;
}

std::vector<double> fuse(std::span<const PlayerOutput> outputs, const Partition& partition,
                         const FusionSpec& spec) {
  if (outputs.size() != partition.num_players()) throw InputError("fusion needs one output per player");
  std::vector<std::span<const double>> probs;
  for (PlayerId i = 0; i < outputs.size(); ++i) {
    if (outputs[i].probs.size() != partition.blocks[i].size()) {
      throw InputError("player output does not match its block");
    }
    probs.emplace_back(outputs[i].probs);
  }
  std::vector<double> fused(partition.num_labels, 0.0);
  if (spec.strategy == FusionStrategy::max_pool) {
    for (LabelId l = 0; l < partition.num_labels; ++l) {
      const PlayerId w = max_pool_winner(partition, l, probs);
      fused[l] = probs[w][static_cast<std::size_t>(partition.slot(w, l))];
    }
    return fused;
  }
  const auto weights = resolve_fusion_weights(spec, partition);
  std::vector<double> total(partition.num_labels, 0.0);
  for (LabelId l = 0; l < partition.num_labels; ++l) {
    for (PlayerId i : partition.coverage[l]) {
      const auto k = static_cast<std::size_t>(partition.slot(i, l));
      fused[l] += weights[i][k] * probs[i][k];
      total[l] += weights[i][k];
    }
    if (!(total[l] > 0.0)) throw InputError("unnormalized fusion weights");
  }
  return fused;
}

std::vector<std::uint8_t> threshold(std::span<const double> fused, std::span<const double> tau) {
  std::vector<std::uint8_t> y(fused.size());
  for (std::size_t l = 0; l < fused.size(); ++l) {
    const double t = tau.size() == 1 ? tau[0] : tau[l];
    y[l] = fused[l] > t ? 1 : 0;
  }
  return y;
}

std::vector<double> tune_thresholds(const Matrix& scores, const Matrix& labels, double default_tau) {
  if (scores.rows() == 0) throw InputError("empty validation set");
  const std::size_t M = scores.rows();
  const std::size_t L = scores.cols();
  std::vector<double> tau(L, default_tau);
  std::vector<std::size_t> order(M);
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t positives = 0;
    for (std::size_t m = 0; m < M; ++m) positives += labels(m, l) > 0.5 ? 1 : 0;
    if (positives == 0) continue;

    // Ascending scores; a cut after position k predicts everything above it positive.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores(a, l) < scores(b, l); });
    std::size_t tp = positives;
    std::size_t fp = M - positives;
    double best_f1 = -1.0;
    for (std::size_t k = 0; k + 1 < M; ++k) {
      const std::size_t m = order[k];
      if (labels(m, l) > 0.5) {
        --tp;
      } else {
        --fp;
      }
      const double lo = scores(m, l);
      const double hi = scores(order[k + 1], l);
      if (!(hi > lo)) continue;
      const std::size_t fn = positives - tp;
      const double f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
      if (f1 > best_f1) {
        best_f1 = f1;
        tau[l] = 0.5 * (lo + hi);
      }
    }
  }
  return tau;
}

}  // namespace tailgame
