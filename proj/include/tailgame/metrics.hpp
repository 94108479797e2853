#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tailgame/label_space.hpp"
#include "tailgame/matrix.hpp"
#include "tailgame/player.hpp"

namespace tailgame {

// All batch metrics take row-per-sample matrices: scores in [0,1], decisions
// and labels as 0/1.

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
  double rare = 0.0;
};

// micro: pooled over all labels; macro: mean per-label F1 (a label with no
// positives and no predictions scores 1); rare: pooled over `tail`. Pooled
// scores with a zero denominator are 0. Throws on an empty tail.
F1Scores f1_scores(const Matrix& decisions, const Matrix& labels, std::span<const LabelId> tail);

// Mean over samples of the hit rate among the k top-scored labels (ties: lower id first).
double precision_at_k(const Matrix& scores, const Matrix& labels, std::size_t k);

// Mean over labels with at least one positive of the average precision of the
// sample ranking by that label's score (ties: sample order).
double mean_average_precision(const Matrix& scores, const Matrix& labels);

struct LabelStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double rare_f1 = 0.0;
  double map = 0.0;
  std::map<std::size_t, double> p_at_k;
  std::vector<LabelStats> per_label;
};

Matrix apply_thresholds(const Matrix& scores, std::span<const double> tau);

// Values of k larger than L are skipped. mAP is 0 when no label has positives.
MetricReport evaluate_metrics(const Matrix& scores, const Matrix& decisions, const Matrix& labels,
                              std::span<const LabelId> tail, std::span<const std::size_t> ks);

// Players ranked 1..N (1 = best, ties to the lower id) by micro-F1 of their own
// thresholded outputs over the labels they cover in a label set.
struct SetRanking {
  std::vector<std::optional<std::size_t>> rank;  // nullopt = covers no label in the set
  std::vector<double> score;
  std::vector<PlayerId> excluded;
};

struct SpecializationRanks {
  SetRanking head;
  SetRanking tail;
};

SpecializationRanks specialization_ranks(const std::vector<PlayerModel>& players, const Matrix& features,
                                         const Matrix& labels, const HeadTailSplit& split,
                                         const Partition& partition, double tau = 0.5);

}  // namespace tailgame
