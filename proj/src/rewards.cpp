#include "tailgame/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "tailgame/error.hpp"

namespace tailgame {

void CuriositySpec::validate() const {
  if (!(alpha >= 0.0)) throw InputError("alpha must be non-negative");
  if (!(beta >= 0.0)) throw InputError("beta must be non-negative");
}

double surrogate_score(const Matrix& fused, const Matrix& labels, const SurrogateSpec& spec) {
  const std::size_t B = fused.rows();
  const std::size_t L = fused.cols();
  if (spec.kind == SurrogateKind::soft_f1) {
    double overlap = 0.0, predicted = 0.0, actual = 0.0;
    for (std::size_t m = 0; m < B; ++m) {
      for (std::size_t l = 0; l < L; ++l) {
        const double w = spec.label_weight(static_cast<LabelId>(l));
        overlap += w * fused(m, l) * labels(m, l);
        predicted += w * fused(m, l);
        actual += w * labels(m, l);
      }
    }
    return (2.0 * overlap + kSoftF1Smoothing) / (predicted + actual + kSoftF1Smoothing);
  }
  double loss = 0.0;
  for (std::size_t m = 0; m < B; ++m) {
    for (std::size_t l = 0; l < L; ++l) {
      const double p = fused(m, l);
      const double y = labels(m, l);
      loss += spec.label_weight(static_cast<LabelId>(l)) * -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return -loss / static_cast<double>(B * L);
}

double rarity_bonus(std::span<const LabelId> block, std::span<const double> fused,
                    std::span<const std::uint8_t> decisions, std::span<const double> labels,
                    const FrequencyTable& ft, CorrectnessMode mode) {
  double r = 0.0;
  for (LabelId l : block) {
    const bool positive = labels[l] > 0.5;
    double correct = 0.0;
    if (mode == CorrectnessMode::hard_indicator) {
      correct = (decisions[l] != 0) == positive ? 1.0 : 0.0;
    } else {
      correct = positive ? fused[l] : 1.0 - fused[l];
    }
    r += correct / (1.0 + ft.freq[l]);
  }
  return r;
}

double bernoulli_kl(double p, double q) {
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(kl, 0.0);
}

double disagreement(PlayerId player, const std::vector<std::span<const double>>& player_probs,
                    const Partition& partition) {
  const auto& block = partition.blocks[player];
  double total = 0.0;
  std::size_t shared = 0;
  for (std::size_t k = 0; k < block.size(); ++k) {
    const LabelId l = block[k];
    const auto& cover = partition.coverage[l];
    if (cover.size() < 2) continue;
    double peer_sum = 0.0;
    for (PlayerId j : cover) {
      if (j != player) peer_sum += player_probs[j][static_cast<std::size_t>(partition.slot(j, l))];
    }
    const double peer_mean = peer_sum / static_cast<double>(cover.size() - 1);
    total += bernoulli_kl(player_probs[player][k], peer_mean);
    ++shared;
  }
  return shared == 0 ? 0.0 : total / static_cast<double>(shared);
}

double disagreement(PlayerId player, std::span<const PlayerOutput> outputs, const Partition& partition) {
  std::vector<std::span<const double>> probs;
  probs.reserve(outputs.size());
  for (const auto& o : outputs) probs.emplace_back(o.probs);
  return disagreement(player, probs, partition);
}

double potential(double surrogate, std::span<const double> curiosities, double alpha) {
  double sum = 0.0;
  for (double c : curiosities) sum += c;
  return surrogate + alpha * sum;
}

double tail_recall_surrogate(const Matrix& fused, const Matrix& labels, const FrequencyTable& ft,
                             const Partition& partition, std::span<const LabelId> tail) {
  if (tail.empty()) throw InputError("empty tail set");
  double total = 0.0;
  for (LabelId l : tail) {
    const double w = static_cast<double>(partition.coverage[l].size()) / (1.0 + ft.freq[l]);
    double soft_tp = 0.0;
    for (std::size_t m = 0; m < fused.rows(); ++m) soft_tp += fused(m, l) * labels(m, l);
    total += w * soft_tp;
  }
  return total;
}

}  // namespace tailgame
