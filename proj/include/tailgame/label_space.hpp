#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tailgame/dataset.hpp"

namespace tailgame {

using PlayerId = std::size_t;

// Empirical prevalence freq(l) = count(l) / M over a training split.
struct FrequencyTable {
  std::vector<std::size_t> counts;
  std::size_t source_count = 0;
  std::vector<double> freq;

  std::size_t num_labels() const { return freq.size(); }
};

FrequencyTable compute_frequencies(const MultiLabelDataset& dataset);
FrequencyTable frequencies_from_counts(std::vector<std::size_t> counts, std::size_t source_count);

// Label ids from most to least frequent; equal frequencies keep ascending id.
std::vector<LabelId> frequency_order(const FrequencyTable& ft);

struct HeadTailRule {
  enum class Kind { count_fraction, cumulative_mass };
  Kind kind = Kind::count_fraction;
  double fraction = 0.2;

  static HeadTailRule count_fraction(double f) { return {Kind::count_fraction, f}; }
  static HeadTailRule cumulative_mass(double f) { return {Kind::cumulative_mass, f}; }
};

// Both sets sorted by label id.
struct HeadTailSplit {
  std::vector<LabelId> head;
  std::vector<LabelId> tail;
  HeadTailRule rule;
};

// count_fraction(f): tail is the ceil(f*L) least frequent labels.
// cumulative_mass(f): head is the shortest frequency-descending prefix whose
// mass reaches f * sum(freq).
HeadTailSplit split_head_tail(const FrequencyTable& ft, HeadTailRule rule);

// Overlapping frequency-ranked blocks, one per player.
struct Partition {
  std::size_t num_labels = 0;
  double overlap_ratio = 0.0;
  std::vector<std::vector<LabelId>> blocks;    // frequency-rank order
  std::vector<std::vector<LabelId>> cores;     // frequency-rank order, disjoint
  std::vector<std::vector<LabelId>> overlaps;  // sorted by id
  std::vector<std::vector<PlayerId>> coverage; // label -> covering players, ascending
  std::vector<std::vector<std::int32_t>> slots; // [player][label] -> index in block or -1

  std::size_t num_players() const { return blocks.size(); }
  std::int32_t slot(PlayerId player, LabelId label) const { return slots[player][label]; }
};

// Sorted by frequency; S = floor(L/N), O = floor(S*rho/2). Player i's core is
// ranks [iS, (i+1)S), the L - NS leftover ranks join the last core, and each
// block adds up to O ranks on either side of its core.
Partition partition_labels(const FrequencyTable& ft, std::size_t num_players, double overlap_ratio);

// Rebuilds derived fields (overlaps, coverage, slots) from explicit blocks and
// cores, validating coverage and core disjointness.
Partition make_partition(std::size_t num_labels, double overlap_ratio,
                         std::vector<std::vector<LabelId>> blocks,
                         std::vector<std::vector<LabelId>> cores);

// 1 / (1 + freq(l)).
double rarity_weight(const FrequencyTable& ft, LabelId label);

}  // namespace tailgame
