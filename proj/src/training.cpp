#include "tailgame/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tailgame/error.hpp"
#include "tailgame/kernels.hpp"
#include "tailgame/rng.hpp"

namespace tailgame {

void apply_update(PlayerModel& player, const PlayerGradient& gradient, double eta, const OptimizerSpec& spec,
                  OptimizerState& state) {
  if (gradient.weights.rows() != player.weights.rows() || gradient.weights.cols() != player.weights.cols() ||
      gradient.bias.size() != player.bias.size()) {
    throw InputError("gradient shape does not match player parameters");
  }
  auto& w = player.weights.values();
  const auto& gw = gradient.weights.values();
  if (spec.kind == OptimizerKind::sgd) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += eta * gw[j];
    for (std::size_t k = 0; k < player.bias.size(); ++k) player.bias[k] += eta * gradient.bias[k];
    ++state.steps;
    return;
  }
  if (state.steps == 0) {
    state.m_weights = Matrix(player.weights.rows(), player.weights.cols());
    state.v_weights = Matrix(player.weights.rows(), player.weights.cols());
    state.m_bias.assign(player.bias.size(), 0.0);
    state.v_bias.assign(player.bias.size(), 0.0);
  }
  ++state.steps;
  const double c1 = 1.0 - std::pow(spec.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(spec.beta2, static_cast<double>(state.steps));
  auto step = [&](double& theta, double g, double& m, double& v) {
    m = spec.beta1 * m + (1.0 - spec.beta1) * g;
    v = spec.beta2 * v + (1.0 - spec.beta2) * g * g;
    theta += eta * (m / c1) / (std::sqrt(v / c2) + spec.epsilon);
  };
  auto& mw = state.m_weights.values();
  auto& vw = state.v_weights.values();
  for (std::size_t j = 0; j < w.size(); ++j) step(w[j], gw[j], mw[j], vw[j]);
  for (std::size_t k = 0; k < player.bias.size(); ++k) {
    step(player.bias[k], gradient.bias[k], state.m_bias[k], state.v_bias[k]);
  }
}

void TrainConfig::validate() const {
  if (players == 0) throw InputError("players must be >= 1");
  if (epochs == 0) throw InputError("epochs must be >= 1");
  if (!full_batch && batch_size == 0) throw InputError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!player_learning_rates.empty()) {
    if (player_learning_rates.size() != players) throw InputError("learning_rates needs one value per player");
    for (double eta : player_learning_rates) {
      if (!(eta > 0.0)) throw InputError("learning rates must be > 0");
    }
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw InputError("overlap must lie in [0,1)");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InputError("threshold must lie in (0,1)");
  if (!(init_sigma >= 0.0)) throw InputError("init_sigma must be non-negative");
  curiosity.validate();
  if (optimizer.kind == OptimizerKind::adaptive_moments) {
    if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0) ||
        !(optimizer.epsilon > 0.0)) {
      throw InputError("invalid adaptive-moment optimizer settings");
    }
  }
}

GameSpec make_game_spec(const TrainConfig& config, const FrequencyTable& ft, const Partition& partition) {
  GameSpec g;
  g.curiosity = config.curiosity;
  g.surrogate.kind = config.surrogate;
  if (config.rarity_weighted_surrogate) {
    for (LabelId l = 0; l < ft.num_labels(); ++l) g.surrogate.label_weights.push_back(rarity_weight(ft, l));
  }
  g.fusion.strategy = config.fusion;
  g.fusion.thresholds = {config.threshold};
  validate_fusion(g.fusion, partition);
  return g;
}

ModelOutputs predict(const TrainedModel& model, const Matrix& features) {
  ModelOutputs out;
  out.batch = forward_game(model.players, model.partition, model.fusion, features);
  out.decisions = apply_thresholds(out.batch.fused, model.fusion.thresholds);
  return out;
}

MetricReport evaluate_model(const TrainedModel& model, const MultiLabelDataset& data, HeadTailRule tail_rule,
                            std::span<const std::size_t> ks) {
  if (data.num_labels() != model.partition.num_labels) throw InputError("label space mismatch");
  const auto split = split_head_tail(model.frequencies, tail_rule);
  const auto out = predict(model, data.feature_matrix());
  return evaluate_metrics(out.batch.fused, out.decisions, data.label_matrix(), split.tail, ks);
}

namespace {

double gradient_norm(const PlayerGradient& g) {
  double s = 0.0;
  for (double v : g.weights.values()) s += v * v;
  for (double v : g.bias) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TrainResult train(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set, const TrainConfig& config,
                  const EpochObserver& observer) {
  config.validate();
  if (train_set.empty()) throw InputError("empty dataset");
  if (val_set.empty()) throw InputError("empty validation set");
  if (train_set.num_labels() != val_set.num_labels() || train_set.feature_dim() != val_set.feature_dim()) {
    throw InputError("training and validation label spaces differ");
  }

  TrainResult result;
  auto& model = result.model;
  model.frequencies = compute_frequencies(train_set);
  model.partition = partition_labels(model.frequencies, config.players, config.overlap);
  model.players = init_players(model.partition, train_set.feature_dim(), config.init_sigma, config.seed);
  result.game = make_game_spec(config, model.frequencies, model.partition);
  model.fusion = result.game.fusion;

  const auto& ft = model.frequencies;
  const auto& partition = model.partition;
  const GameSpec& game = result.game;
  const auto tail_split = split_head_tail(ft, config.tail_rule);
  const auto diag_split = split_head_tail(ft, config.diagnostics_rule);

  const Matrix train_x = train_set.feature_matrix();
  const Matrix train_y = train_set.label_matrix();
  const Matrix val_x = val_set.feature_matrix();
  const Matrix val_y = val_set.label_matrix();
  std::vector<std::size_t> probe_rows(std::min(config.probe_size, val_set.size()));
  std::iota(probe_rows.begin(), probe_rows.end(), std::size_t{0});
  const Matrix probe_x = val_set.feature_matrix(probe_rows);

  const std::size_t M = train_set.size();
  const std::size_t batch = config.full_batch ? M : std::min(config.batch_size, M);
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto shuffle_rng = make_rng(config.seed, Stream::kShuffle);

  std::vector<OptimizerState> states(partition.num_players());
  double previous_phi = evaluate_game(model.players, partition, ft, game, train_x, train_y).potential;
  result.initial_phi = previous_phi;
  double best_rare = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (!config.full_batch) std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < M; start += batch) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(batch, M - start));
      const Matrix bx = config.full_batch ? train_x : train_set.feature_matrix(rows);
      const Matrix by = config.full_batch ? train_y : train_set.label_matrix(rows);
      for (PlayerId i = 0; i < partition.num_players(); ++i) {
        const auto g = kernels::player_gradient(i, model.players, partition, ft, game, bx, by);
        apply_update(model.players[i], g, config.learning_rate_for(i), config.optimizer, states[i]);
        if (!model.players[i].all_finite()) throw NumericalError("numerical divergence; reduce η");
      }
    }

    EpochDiagnostics diag;
    diag.epoch = epoch;
    const auto rb = evaluate_game(model.players, partition, ft, game, train_x, train_y);
    diag.phi = rb.potential;
    diag.phi_delta = diag.phi - previous_phi;
    previous_phi = diag.phi;
    diag.surrogate = rb.surrogate;
    diag.players = rb.players;
    if (!std::isfinite(diag.phi)) throw NumericalError("numerical divergence; reduce η");

    const auto probe = forward_game(model.players, partition, model.fusion, probe_x);
    diag.kl = disagreement_by_split(probe.player_probs, partition, diag_split);

    const auto val_out = predict(model, val_x);
    diag.val_metrics = evaluate_metrics(val_out.batch.fused, val_out.decisions, val_y, tail_split.tail, config.ks);
    diag.tail_recall_surrogate = tail_recall_surrogate(val_out.batch.fused, val_y, ft, partition, tail_split.tail);

    if (observer) observer(diag);
    result.diagnostics.push_back(diag);

    if (config.stopping.kind == StoppingRule::Kind::patience) {
      if (diag.val_metrics.rare_f1 > best_rare) {
        best_rare = diag.val_metrics.rare_f1;
        stale = 0;
      } else if (++stale >= config.stopping.patience) {
        break;
      }
    }
  }

  for (PlayerId i = 0; i < partition.num_players(); ++i) {
    result.stationarity.push_back(
        gradient_norm(kernels::player_gradient(i, model.players, partition, ft, game, train_x, train_y)));
  }

  if (config.tune_thresholds) {
    const auto val_out = predict(model, val_x);
    model.fusion.thresholds = tune_thresholds(val_out.batch.fused, val_y, config.threshold);
  }
  return result;
}

MonotoneRun train_with_monotone_potential(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set,
                                          const TrainConfig& config, std::size_t max_halvings) {
  MonotoneRun run;
  TrainConfig cfg = config;
  for (run.halvings = 0;; ++run.halvings) {
    run.result = train(train_set, val_set, cfg);
    run.learning_rate = cfg.learning_rate;
    run.monotone = std::all_of(run.result.diagnostics.begin(), run.result.diagnostics.end(),
                               [](const EpochDiagnostics& d) { return d.phi_delta >= 0.0; });
    if (run.monotone || run.halvings == max_halvings) return run;
    cfg.learning_rate *= 0.5;
    for (double& eta : cfg.player_learning_rates) eta *= 0.5;
  }
}

std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::full: return "full";
    case AblationVariant::no_curiosity: return "no_curiosity";
    case AblationVariant::single_predictor: return "single_predictor";
  }
  return "unknown";
}

TrainConfig ablation_config(const TrainConfig& base, AblationVariant variant) {
  TrainConfig cfg = base;
  switch (variant) {
    case AblationVariant::full:
      break;
    case AblationVariant::no_curiosity:
      cfg.curiosity.alpha = 0.0;
      break;
    case AblationVariant::single_predictor:
      cfg.players = 1;
      cfg.player_learning_rates.clear();
      cfg.curiosity.alpha = 0.0;
      cfg.rarity_weighted_surrogate = true;
      break;
  }
  return cfg;
}

AblationOutcome ablation_run(const MultiLabelDataset& train_set, const MultiLabelDataset& val_set,
                             const MultiLabelDataset& test_set, const TrainConfig& base, AblationVariant variant) {
  AblationOutcome out;
  out.variant = variant;
  out.config = ablation_config(base, variant);
  const auto result = train(train_set, val_set, out.config);
  out.test_metrics = evaluate_model(result.model, test_set, out.config.tail_rule, out.config.ks);
  return out;
}

}  // namespace tailgame
