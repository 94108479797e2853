#include "tailgame/diagnostics.hpp"

#include <cstdlib>
#include <tuple>

#include "tailgame/error.hpp"

namespace tailgame {

namespace {

// Returns the mean disagreement and whether any label was shared.
std::pair<double, bool> split_kl(const std::vector<Matrix>& probs, const Partition& partition,
                                 const std::vector<LabelId>& labels) {
  std::vector<LabelId> shared;
  for (LabelId l : labels) {
    if (partition.coverage[l].size() >= 2) shared.push_back(l);
  }
  if (shared.empty() || probs.empty()) return {0.0, false};
  const std::size_t B = probs.front().rows();
  if (B == 0) return {0.0, true};
  double over_samples = 0.0;
  for (std::size_t m = 0; m < B; ++m) {
    double over_labels = 0.0;
    for (LabelId l : shared) {
      const auto& cover = partition.coverage[l];
      double total = 0.0;
      for (PlayerId j : cover) total += probs[j](m, static_cast<std::size_t>(partition.slot(j, l)));
      double over_players = 0.0;
      for (PlayerId j : cover) {
        const double p = probs[j](m, static_cast<std::size_t>(partition.slot(j, l)));
        const double peer = (total - p) / static_cast<double>(cover.size() - 1);
        over_players += bernoulli_kl(p, peer);
      }
      over_labels += over_players / static_cast<double>(cover.size());
    }
    over_samples += over_labels / static_cast<double>(shared.size());
  }
  return {over_samples / static_cast<double>(B), true};
}

}  // namespace

SplitDisagreement disagreement_by_split(const std::vector<Matrix>& player_probs, const Partition& partition,
                                        const HeadTailSplit& split) {
  SplitDisagreement out;
  out.has_peers = partition.num_players() >= 2;
  if (!out.has_peers) return out;
  std::tie(out.kl_head, out.head_shared) = split_kl(player_probs, partition, split.head);
  std::tie(out.kl_tail, out.tail_shared) = split_kl(player_probs, partition, split.tail);
  return out;
}

TraceSummary trace_summary(std::span<const EpochDiagnostics> trace) {
  if (trace.size() < 2) throw InputError("trace summary needs at least two epochs");
  TraceSummary s;
  s.epochs = trace.size();
  s.kl_tail_first = trace.front().kl.kl_tail;
  s.kl_tail_last = trace.back().kl.kl_tail;
  std::size_t non_decreasing = 0;
  bool first = true;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    const double gain = trace[t].phi - trace[t - 1].phi;
    const double decline = trace[t - 1].kl.kl_tail - trace[t].kl.kl_tail;
    if (gain >= 0.0) ++non_decreasing;
    if (first || gain > s.max_gain) {
      s.max_gain = gain;
      s.max_gain_epoch = trace[t].epoch;
    }
    if (first || decline > s.max_kl_decline) {
      s.max_kl_decline = decline;
      s.max_kl_decline_epoch = trace[t].epoch;
    }
    first = false;
  }
  s.monotone_fraction = static_cast<double>(non_decreasing) / static_cast<double>(trace.size() - 1);
  const auto gap = static_cast<long long>(s.max_gain_epoch) - static_cast<long long>(s.max_kl_decline_epoch);
  s.gain_overlaps_decline = std::llabs(gap) <= 1;
  return s;
}

}  // namespace tailgame
