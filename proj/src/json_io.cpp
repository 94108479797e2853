#include "tailgame/json_io.hpp"

namespace tailgame {

std::string to_string(FusionStrategy s) {
  return s == FusionStrategy::max_pool ? "max_pool" : "weighted_average";
}

std::string to_string(SurrogateKind k) { return k == SurrogateKind::neg_bce ? "neg_bce" : "soft_f1"; }

std::string to_string(CorrectnessMode m) {
  return m == CorrectnessMode::hard_indicator ? "hard_indicator" : "soft_probability";
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::adaptive_moments ? "adaptive_moments" : "sgd";
}

Json to_json(const MetricReport& report, bool per_label) {
  Json j;
  j["micro_f1"] = report.micro_f1;
  j["macro_f1"] = report.macro_f1;
  j["rare_f1"] = report.rare_f1;
  j["map"] = report.map;
  Json pk = Json::object();
  for (const auto& [k, v] : report.p_at_k) pk[std::to_string(k)] = v;
  j["p_at_k"] = pk;
  if (per_label) {
    Json rows = Json::array();
    for (const auto& s : report.per_label) rows.push_back({{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}});
    j["per_label"] = rows;
  }
  return j;
}

Json to_json(const EpochDiagnostics& diag) {
  Json j;
  j["epoch"] = diag.epoch;
  j["phi"] = diag.phi;
  j["phi_delta"] = diag.phi_delta;
  j["surrogate"] = diag.surrogate;
  Json players = Json::array();
  for (const auto& p : diag.players) {
    players.push_back({{"r", p.rarity}, {"d", p.disagreement}, {"C", p.curiosity}, {"J", p.objective}});
  }
  j["per_player"] = players;
  j["kl_head"] = diag.kl.kl_head;
  j["kl_tail"] = diag.kl.kl_tail;
  j["kl_flags"] = {{"has_peers", diag.kl.has_peers},
                   {"head_shared", diag.kl.head_shared},
                   {"tail_shared", diag.kl.tail_shared}};
  j["tail_recall_surrogate"] = diag.tail_recall_surrogate;
  j["val_metrics"] = to_json(diag.val_metrics, false);
  return j;
}

Json to_json(const TraceSummary& s) {
  return {{"epochs", s.epochs},
          {"monotone_fraction", s.monotone_fraction},
          {"kl_tail_first", s.kl_tail_first},
          {"kl_tail_last", s.kl_tail_last},
          {"max_gain_epoch", s.max_gain_epoch},
          {"max_gain", s.max_gain},
          {"max_kl_decline_epoch", s.max_kl_decline_epoch},
          {"max_kl_decline", s.max_kl_decline},
          {"gain_overlaps_decline", s.gain_overlaps_decline}};
}

Json to_json(const SetRanking& ranking) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < ranking.rank.size(); ++i) {
    Json r;
    r["player"] = i;
    if (ranking.rank[i]) {
      r["rank"] = *ranking.rank[i];
      r["micro_f1"] = ranking.score[i];
    } else {
      r["rank"] = nullptr;
    }
    rows.push_back(r);
  }
  return rows;
}

Json to_json(const SpecializationRanks& ranks) { return {{"head", to_json(ranks.head)}, {"tail", to_json(ranks.tail)}}; }

Json to_json(const Partition& partition, const FrequencyTable& ft) {
  Json j;
  j["num_labels"] = partition.num_labels;
  j["num_players"] = partition.num_players();
  j["overlap_ratio"] = partition.overlap_ratio;
  j["source_count"] = ft.source_count;
  j["counts"] = ft.counts;
  j["blocks"] = partition.blocks;
  j["cores"] = partition.cores;
  j["overlaps"] = partition.overlaps;
  return j;
}

Json to_json(const HeadTailRule& rule) {
  return {{"kind", rule.kind == HeadTailRule::Kind::count_fraction ? "count_fraction" : "cumulative_mass"},
          {"fraction", rule.fraction}};
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["players"] = c.players;
  j["overlap"] = c.overlap;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["full_batch"] = c.full_batch;
  j["learning_rate"] = c.learning_rate;
  if (!c.player_learning_rates.empty()) j["learning_rates"] = c.player_learning_rates;
  j["optimizer"] = {{"kind", to_string(c.optimizer.kind)},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"epsilon", c.optimizer.epsilon}};
  j["init_sigma"] = c.init_sigma;
  j["alpha"] = c.curiosity.alpha;
  j["beta"] = c.curiosity.beta;
  j["correctness"] = to_string(c.curiosity.mode);
  j["surrogate"] = to_string(c.surrogate);
  j["rarity_weighted_surrogate"] = c.rarity_weighted_surrogate;
  j["fusion"] = to_string(c.fusion);
  j["threshold"] = c.threshold;
  j["tune_thresholds"] = c.tune_thresholds;
  j["stopping"] = c.stopping.kind == StoppingRule::Kind::patience
                      ? Json{{"kind", "patience"}, {"patience", c.stopping.patience}}
                      : Json{{"kind", "fixed_epochs"}};
  j["tail_rule"] = to_json(c.tail_rule);
  j["diagnostics_split"] = to_json(c.diagnostics_rule);
  j["probe_size"] = c.probe_size;
  j["k"] = c.ks;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const SynthSpec& s) {
  return {{"num_labels", s.num_labels},
          {"feature_dim", s.feature_dim},
          {"num_samples", s.num_samples},
          {"power_exponent", s.power_exponent},
          {"base_prevalence", s.base_prevalence},
          {"correlated", s.correlated},
          {"noise_rate", s.noise_rate}};
}

}  // namespace tailgame
