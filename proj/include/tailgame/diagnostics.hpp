#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"
#include "tailgame/metrics.hpp"
#include "tailgame/rewards.hpp"

namespace tailgame {

struct SplitDisagreement {
  double kl_head = 0.0;
  double kl_tail = 0.0;
  bool has_peers = false;    // N >= 2
  bool head_shared = false;  // some head label is covered by >= 2 players
  bool tail_shared = false;
};

// Per split: for each label covered by >= 2 players, the Bernoulli KL of every
// covering player to the mean of the others, averaged over players, then
// labels, then samples. A split without shared labels reports 0.
SplitDisagreement disagreement_by_split(const std::vector<Matrix>& player_probs, const Partition& partition,
                                        const HeadTailSplit& split);

struct EpochDiagnostics {
  std::size_t epoch = 0;
  double phi = 0.0;
  double phi_delta = 0.0;
  double surrogate = 0.0;
  std::vector<PlayerReward> players;
  SplitDisagreement kl;
  double tail_recall_surrogate = 0.0;
  MetricReport val_metrics;
};

struct TraceSummary {
  std::size_t epochs = 0;
  double monotone_fraction = 0.0;  // share of consecutive epochs with phi non-decreasing
  double kl_tail_first = 0.0;
  double kl_tail_last = 0.0;
  std::size_t max_gain_epoch = 0;
  double max_gain = 0.0;
  std::size_t max_kl_decline_epoch = 0;
  double max_kl_decline = 0.0;
  bool gain_overlaps_decline = false;  // epochs of largest gain and largest decline within one epoch
};

// Needs at least two epochs.
TraceSummary trace_summary(std::span<const EpochDiagnostics> trace);

}  // namespace tailgame
