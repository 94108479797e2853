#include "tailgame/label_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tailgame/error.hpp"

namespace tailgame {

FrequencyTable compute_frequencies(const MultiLabelDataset& dataset) {
  if (dataset.empty() || dataset.num_labels() == 0) throw InputError("empty dataset");
  return frequencies_from_counts(dataset.label_counts(), dataset.size());
}

FrequencyTable frequencies_from_counts(std::vector<std::size_t> counts, std::size_t source_count) {
  if (source_count == 0 || counts.empty()) throw InputError("empty dataset");
  FrequencyTable ft;
  ft.freq.reserve(counts.size());
  for (std::size_t c : counts) {
    if (c > source_count) throw InputError("label count exceeds sample count");
    ft.freq.push_back(static_cast<double>(c) / static_cast<double>(source_count));
  }
  ft.counts = std::move(counts);
  ft.source_count = source_count;
  return ft;
}

std::vector<LabelId> frequency_order(const FrequencyTable& ft) {
  std::vector<LabelId> order(ft.num_labels());
  std::iota(order.begin(), order.end(), LabelId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](LabelId a, LabelId b) { return ft.freq[a] > ft.freq[b]; });
  return order;
}

HeadTailSplit split_head_tail(const FrequencyTable& ft, HeadTailRule rule) {
  if (!(rule.fraction > 0.0 && rule.fraction < 1.0)) {
    throw InputError("head/tail fraction must lie in (0,1), got " + std::to_string(rule.fraction));
  }
  const std::size_t L = ft.num_labels();
  const auto order = frequency_order(ft);
  std::size_t head_size = 0;
  if (rule.kind == HeadTailRule::Kind::count_fraction) {
    const auto tail_size = static_cast<std::size_t>(std::ceil(rule.fraction * static_cast<double>(L)));
    head_size = L - std::min(tail_size, L);
  } else {
    const double total = std::accumulate(ft.freq.begin(), ft.freq.end(), 0.0);
    const double target = rule.fraction * total;
    double mass = 0.0;
    while (head_size < L && mass < target) mass += ft.freq[order[head_size++]];
  }
  HeadTailSplit split;
  split.rule = rule;
  split.head.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(head_size));
  split.tail.assign(order.begin() + static_cast<std::ptrdiff_t>(head_size), order.end());
  std::sort(split.head.begin(), split.head.end());
  std::sort(split.tail.begin(), split.tail.end());
  return split;
}

Partition partition_labels(const FrequencyTable& ft, std::size_t num_players, double overlap_ratio) {
  const std::size_t L = ft.num_labels();
  if (num_players == 0) throw InputError("at least one player is required");
  if (num_players > L) throw InputError("more players than labels");
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) throw InputError("overlap ratio must lie in [0,1)");

  const auto order = frequency_order(ft);
  const std::size_t S = L / num_players;
  const auto O = static_cast<std::size_t>(std::floor(static_cast<double>(S) * overlap_ratio / 2.0 + 1e-9));

  std::vector<std::vector<LabelId>> blocks(num_players);
  std::vector<std::vector<LabelId>> cores(num_players);
  for (std::size_t i = 0; i < num_players; ++i) {
    const std::size_t core_begin = i * S;
    const std::size_t core_end = (i + 1 == num_players) ? L : (i + 1) * S;
    const std::size_t block_begin = core_begin >= O ? core_begin - O : 0;
    const std::size_t block_end = std::min(L, core_end + O);
    cores[i].assign(order.begin() + static_cast<std::ptrdiff_t>(core_begin),
                    order.begin() + static_cast<std::ptrdiff_t>(core_end));
    blocks[i].assign(order.begin() + static_cast<std::ptrdiff_t>(block_begin),
                     order.begin() + static_cast<std::ptrdiff_t>(block_end));
  }
  return make_partition(L, overlap_ratio, std::move(blocks), std::move(cores));
}

Partition make_partition(std::size_t num_labels, double overlap_ratio,
                         std::vector<std::vector<LabelId>> blocks,
                         std::vector<std::vector<LabelId>> cores) {
  if (blocks.empty() || blocks.size() != cores.size()) {
    throw InputError("partition needs one block and one core per player");
  }
  const std::size_t N = blocks.size();
  Partition p;
  p.num_labels = num_labels;
  p.overlap_ratio = overlap_ratio;
  p.coverage.assign(num_labels, {});
  p.slots.assign(N, std::vector<std::int32_t>(num_labels, -1));

  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < blocks[i].size(); ++k) {
      const LabelId l = blocks[i][k];
      if (l >= num_labels) throw InputError("partition label id out of range");
      if (p.slots[i][l] != -1) throw InputError("duplicate label in partition block");
      p.slots[i][l] = static_cast<std::int32_t>(k);
      p.coverage[l].push_back(i);
    }
  }
  std::vector<int> core_owner(num_labels, -1);
  for (std::size_t i = 0; i < N; ++i) {
    for (LabelId l : cores[i]) {
      if (l >= num_labels) throw InputError("partition label id out of range");
      if (core_owner[l] != -1) throw InputError("partition cores overlap");
      if (p.slots[i][l] == -1) throw InputError("core label missing from its block");
      core_owner[l] = static_cast<int>(i);
    }
  }
  for (std::size_t l = 0; l < num_labels; ++l) {
    if (p.coverage[l].empty() || core_owner[l] == -1) {
      throw InputError("partition does not cover label " + std::to_string(l));
    }
  }
  p.overlaps.assign(N, {});
  for (std::size_t i = 0; i < N; ++i) {
    for (LabelId l : blocks[i]) {
      if (p.coverage[l].size() > 1) p.overlaps[i].push_back(l);
    }
    std::sort(p.overlaps[i].begin(), p.overlaps[i].end());
  }
  p.blocks = std::move(blocks);
  p.cores = std::move(cores);
  return p;
}

double rarity_weight(const FrequencyTable& ft, LabelId label) {
  if (label >= ft.num_labels()) throw InputError("label id out of range: " + std::to_string(label));
  return 1.0 / (1.0 + ft.freq[label]);
}

}  // namespace tailgame
