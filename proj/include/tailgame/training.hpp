#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tailgame/dataset.hpp"
#include "tailgame/diagnostics.hpp"
#include "tailgame/game.hpp"
#include "tailgame/label_space.hpp"
#include "tailgame/metrics.hpp"

namespace tailgame {

enum class OptimizerKind { sgd, adaptive_moments };

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::sgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  Matrix m_weights, v_weights;
  std::vector<double> m_bias, v_bias;
  std::size_t steps = 0;
};

// Ascent step theta += eta * g (sgd) or the bias-corrected moment step.
// Throws InputError on a shape mismatch.
void apply_update(PlayerModel& player, const PlayerGradient& gradient, double eta, const OptimizerSpec& spec,
                  OptimizerState& state);

struct StoppingRule {
  enum class Kind { fixed_epochs, patience };
  Kind kind = Kind::fixed_epochs;
  std::size_t patience = 5;  // epochs without a validation Rare-F1 improvement
};

struct TrainConfig {
  std::size_t players = 3;
  double overlap = 0.2;
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  bool full_batch = false;
  double learning_rate = 2.0;
  std::vector<double> player_learning_rates;  // empty = shared learning_rate
  OptimizerSpec optimizer;
  CuriositySpec curiosity;
  SurrogateKind surrogate = SurrogateKind::soft_f1;
  bool rarity_weighted_surrogate = false;
  FusionStrategy fusion = FusionStrategy::weighted_average;
  double threshold = 0.5;
  bool tune_thresholds = false;
  double init_sigma = 0.1;
  std::uint64_t seed = 0;
  StoppingRule stopping;
  HeadTailRule tail_rule = HeadTailRule::count_fraction(0.2);
  HeadTailRule diagnostics_rule = HeadTailRule::cumulative_mass(0.1);
  std::size_t probe_size = 256;
  std::vector<std::size_t> ks{1, 3, 5};

  double learning_rate_for(PlayerId i) const {
    return player_learning_rates.empty() ? learning_rate : player_learning_rates[i];
  }
  void validate() const;
};

// Game spec (surrogate weights, fusion, curiosity) implied by a config.
GameSpec make_game_spec(const TrainConfig& config, const FrequencyTable& ft, const Partition& partition);

struct TrainedModel {
  FrequencyTable frequencies;
  Partition partition;
  std::vector<PlayerModel> players;
  FusionSpec fusion;
};

struct TrainResult {
  TrainedModel model;
  GameSpec game;
  double initial_phi = 0.0;
  std::vector<EpochDiagnostics> diagnostics;
  std::vector<double> stationarity;  // per-player gradient norm on the full training set at the end
};

using EpochObserver = std::function<void(const EpochDiagnostics&)>;

// Cyclic best-response training: per minibatch, players 0..N-1 each take one
// ascent step on J_i against the current (already updated) peers.
// Throws NumericalError("numerical divergence; reduce η") on non-finite parameters.
TrainResult train(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set, const TrainConfig& config,
                  const EpochObserver& observer = {});

// Halves the learning rate until the potential never decreases across an
// epoch (including the first, measured against initialisation).
struct MonotoneRun {
  double learning_rate = 0.0;
  std::size_t halvings = 0;
  bool monotone = false;
  TrainResult result;
};
MonotoneRun train_with_monotone_potential(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set,
                                          const TrainConfig& config, std::size_t max_halvings = 12);

struct ModelOutputs {
  BatchOutputs batch;
  Matrix decisions;
};
ModelOutputs predict(const TrainedModel& model, const Matrix& features);

MetricReport evaluate_model(const TrainedModel& model, const MultiLabelDataset& data, HeadTailRule tail_rule,
                            std::span<const std::size_t> ks);

enum class AblationVariant { full, no_curiosity, single_predictor };

std::string to_string(AblationVariant v);

// no_curiosity: alpha = 0. single_predictor: one player over all labels,
// alpha = 0, surrogate terms weighted by 1 / (1 + freq(l)).
TrainConfig ablation_config(const TrainConfig& base, AblationVariant variant);

struct AblationOutcome {
  AblationVariant variant = AblationVariant::full;
  TrainConfig config;
  MetricReport test_metrics;
};

AblationOutcome ablation_run(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set,
                             const MultiLabelDataset& test_set, const TrainConfig& base, AblationVariant variant);

}  // namespace tailgame
