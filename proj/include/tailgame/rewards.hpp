#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"
#include "tailgame/player.hpp"

namespace tailgame {

enum class CorrectnessMode { hard_indicator, soft_probability };

struct CuriositySpec {
  double alpha = 0.5;  // curiosity weight in J_i
  double beta = 0.2;   // disagreement weight inside C_i
  CorrectnessMode mode = CorrectnessMode::soft_probability;

  void validate() const;
};

enum class SurrogateKind { soft_f1, neg_bce };

inline constexpr double kSoftF1Smoothing = 1e-6;

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::soft_f1;
  // Optional per-label multipliers on each label's term (empty = all 1).
  std::vector<double> label_weights;

  double max_value() const { return kind == SurrogateKind::soft_f1 ? 1.0 : 0.0; }
  double label_weight(LabelId l) const { return label_weights.empty() ? 1.0 : label_weights[l]; }
};

// Batch-level shared payoff M over fused probabilities (rows = samples).
//   soft_f1: (2 sum w p y + s) / (sum w p + sum w y + s)
//   neg_bce: -(1 / (B L)) sum w BCE(p, y)
double surrogate_score(const Matrix& fused, const Matrix& labels, const SurrogateSpec& spec);

// Rarity-weighted correctness over one player's block for a single sample.
// Hard mode scores 1{yhat = y}; soft mode scores p if y = 1, else 1 - p.
double rarity_bonus(std::span<const LabelId> block, std::span<const double> fused,
                    std::span<const std::uint8_t> decisions, std::span<const double> labels,
                    const FrequencyTable& ft, CorrectnessMode mode);

// KL(Bernoulli(p) || Bernoulli(q)) in nats.
double bernoulli_kl(double p, double q);

// Mean Bernoulli KL between player i and the mean of its peers over the
// labels of L_i that some peer also covers. Zero with no shared labels.
double disagreement(PlayerId player, const std::vector<std::span<const double>>& player_probs,
                    const Partition& partition);
double disagreement(PlayerId player, std::span<const PlayerOutput> outputs, const Partition& partition);

inline double curiosity(double rarity, double disagreement, double beta) { return rarity + beta * disagreement; }
inline double per_player_objective(double surrogate, double curiosity, double alpha) {
  return surrogate + alpha * curiosity;
}
double potential(double surrogate, std::span<const double> curiosities, double alpha);

// sum over tail labels of cover(l) / (1 + freq(l)) * sum_samples p_l y_l.
double tail_recall_surrogate(const Matrix& fused, const Matrix& labels, const FrequencyTable& ft,
                             const Partition& partition, std::span<const LabelId> tail);

struct PlayerReward {
  double rarity = 0.0;
  double disagreement = 0.0;
  double curiosity = 0.0;
  double objective = 0.0;
};

struct RewardBreakdown {
  double surrogate = 0.0;
  std::vector<PlayerReward> players;
  double potential = 0.0;
};

}  // namespace tailgame
