#include "tailgame/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tailgame/error.hpp"
#include "tailgame/kernels.hpp"

namespace tailgame {

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double pooled_f1(const Counts& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::vector<Counts> label_counts(const Matrix& decisions, const Matrix& labels) {
  if (decisions.rows() != labels.rows() || decisions.cols() != labels.cols()) {
    throw InputError("decision and label shapes differ");
  }
  std::vector<Counts> counts(labels.cols());
  for (std::size_t m = 0; m < labels.rows(); ++m) {
    for (std::size_t l = 0; l < labels.cols(); ++l) {
      const bool pred = decisions(m, l) > 0.5;
      const bool truth = labels(m, l) > 0.5;
      if (pred && truth) ++counts[l].tp;
      else if (pred) ++counts[l].fp;
      else if (truth) ++counts[l].fn;
    }
  }
  return counts;
}

}  // namespace

F1Scores f1_scores(const Matrix& decisions, const Matrix& labels, std::span<const LabelId> tail) {
  if (tail.empty()) throw InputError("empty tail set");
  const auto counts = label_counts(decisions, labels);
  Counts all, rare;
  double macro = 0.0;
  for (const auto& c : counts) {
    all.tp += c.tp;
    all.fp += c.fp;
    all.fn += c.fn;
    macro += (c.tp + c.fp + c.fn == 0) ? 1.0 : pooled_f1(c);
  }
  for (LabelId l : tail) {
    if (l >= counts.size()) throw InputError("tail label out of range");
    rare.tp += counts[l].tp;
    rare.fp += counts[l].fp;
    rare.fn += counts[l].fn;
  }
  F1Scores s;
  s.micro = pooled_f1(all);
  s.macro = counts.empty() ? 0.0 : macro / static_cast<double>(counts.size());
  s.rare = pooled_f1(rare);
  return s;
}

double precision_at_k(const Matrix& scores, const Matrix& labels, std::size_t k) {
  const std::size_t L = scores.cols();
  if (k == 0 || k > L) throw InputError("precision@k needs 1 <= k <= L");
  if (scores.rows() == 0) throw InputError("precision@k needs at least one sample");
  std::vector<std::size_t> order(L);
  double total = 0.0;
  for (std::size_t m = 0; m < scores.rows(); ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return scores(m, a) > scores(m, b) || (scores(m, a) == scores(m, b) && a < b);
                      });
    std::size_t hits = 0;
    for (std::size_t r = 0; r < k; ++r) hits += labels(m, order[r]) > 0.5 ? 1 : 0;
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(scores.rows());
}

double mean_average_precision(const Matrix& scores, const Matrix& labels) {
  const std::size_t M = scores.rows();
  std::vector<std::size_t> order(M);
  double total = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t l = 0; l < scores.cols(); ++l) {
    std::size_t positives = 0;
    for (std::size_t m = 0; m < M; ++m) positives += labels(m, l) > 0.5 ? 1 : 0;
    if (positives == 0) continue;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores(a, l) > scores(b, l); });
    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < M; ++r) {
      if (labels(order[r], l) > 0.5) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    total += ap / static_cast<double>(positives);
    ++evaluated;
  }
  if (evaluated == 0) throw InputError("no label has positives");
  return total / static_cast<double>(evaluated);
}

Matrix apply_thresholds(const Matrix& scores, std::span<const double> tau) {
  Matrix out(scores.rows(), scores.cols());
  for (std::size_t m = 0; m < scores.rows(); ++m) {
    for (std::size_t l = 0; l < scores.cols(); ++l) {
      const double t = tau.size() == 1 ? tau[0] : tau[l];
      out(m, l) = scores(m, l) > t ? 1.0 : 0.0;
    }
  }
  return out;
}

MetricReport evaluate_metrics(const Matrix& scores, const Matrix& decisions, const Matrix& labels,
                              std::span<const LabelId> tail, std::span<const std::size_t> ks) {
  MetricReport r;
  const auto f1 = f1_scores(decisions, labels, tail);
  r.micro_f1 = f1.micro;
  r.macro_f1 = f1.macro;
  r.rare_f1 = f1.rare;
  try {
    r.map = mean_average_precision(scores, labels);
  } catch (const InputError&) {
    r.map = 0.0;
  }
  for (std::size_t k : ks) {
    if (k >= 1 && k <= scores.cols()) r.p_at_k[k] = precision_at_k(scores, labels, k);
  }
  for (const auto& c : label_counts(decisions, labels)) {
    LabelStats s;
    s.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    s.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    s.f1 = (c.tp + c.fp + c.fn == 0) ? 1.0 : pooled_f1(c);
    r.per_label.push_back(s);
  }
  return r;
}

namespace {

SetRanking rank_players(const std::vector<PlayerModel>& players, const std::vector<Matrix>& probs,
                        const Matrix& labels, const std::vector<LabelId>& label_set, double tau) {
  const std::size_t N = players.size();
  SetRanking out;
  out.rank.assign(N, std::nullopt);
  out.score.assign(N, 0.0);
  std::vector<bool> in_set(labels.cols(), false);
  for (LabelId l : label_set) in_set[l] = true;

  std::vector<PlayerId> ranked;
  for (PlayerId i = 0; i < N; ++i) {
    Counts c;
    bool covers = false;
    for (std::size_t k = 0; k < players[i].block.size(); ++k) {
      const LabelId l = players[i].block[k];
      if (!in_set[l]) continue;
      covers = true;
      for (std::size_t m = 0; m < labels.rows(); ++m) {
        const bool pred = probs[i](m, k) > tau;
        const bool truth = labels(m, l) > 0.5;
        if (pred && truth) ++c.tp;
        else if (pred) ++c.fp;
        else if (truth) ++c.fn;
      }
    }
    if (!covers) {
      out.excluded.push_back(i);
      continue;
    }
    out.score[i] = pooled_f1(c);
    ranked.push_back(i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](PlayerId a, PlayerId b) { return out.score[a] > out.score[b]; });
  for (std::size_t r = 0; r < ranked.size(); ++r) out.rank[ranked[r]] = r + 1;
  return out;
}

}  // namespace

SpecializationRanks specialization_ranks(const std::vector<PlayerModel>& players, const Matrix& features,
                                         const Matrix& labels, const HeadTailSplit& split,
                                         const Partition& partition, double tau) {
  if (players.empty()) throw InputError("specialization ranks need at least one player");
  if (players.size() != partition.num_players()) throw InputError("player count does not match partition");
  std::vector<Matrix> probs;
  for (const auto& p : players) probs.push_back(kernels::forward_batch(p, features));
  return {rank_players(players, probs, labels, split.head, tau), rank_players(players, probs, labels, split.tail, tau)};
}

}  // namespace tailgame
