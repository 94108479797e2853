#include "tailgame/kernels.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

#include "tailgame/error.hpp"

namespace tailgame::kernels {

namespace {

void check_features(const PlayerModel& player, const Matrix& features) {
  if (features.cols() != player.feature_dim) {
    throw InputError("feature dimension mismatch: batch has " + std::to_string(features.cols()) +
                     ", player expects " + std::to_string(player.feature_dim));
  }
}

// Player covering `label` with the largest probability in row m; lowest id on ties.
PlayerId row_winner(const std::vector<Matrix>& probs, const Partition& partition, std::size_t m, LabelId label) {
  const auto& cover = partition.coverage[label];
  PlayerId best = cover.front();
  double best_p = probs[best](m, static_cast<std::size_t>(partition.slot(best, label)));
  for (std::size_t c = 1; c < cover.size(); ++c) {
    const PlayerId j = cover[c];
    const double p = probs[j](m, static_cast<std::size_t>(partition.slot(j, label)));
    if (p > best_p) {
      best = j;
      best_p = p;
    }
  }
  return best;
}

}  // namespace

Matrix forward_batch(const PlayerModel& player, const Matrix& features) {
  check_features(player, features);
  const auto B = static_cast<std::ptrdiff_t>(features.rows());
  const std::size_t K = player.block.size();
  Matrix probs(features.rows(), K);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < B; ++m) {
    const auto x = features.row(static_cast<std::size_t>(m));
    auto out = probs.row(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < K; ++k) {
      const auto w = player.weights.row(k);
      out[k] = clamp_prob(sigmoid(std::inner_product(w.begin(), w.end(), x.begin(), player.bias[k])));
    }
  }
  return probs;
}

Matrix fuse_batch(const std::vector<Matrix>& player_probs, const Partition& partition, FusionStrategy strategy,
                  const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = player_probs.empty() ? 0 : player_probs.front().rows();
  const auto B = static_cast<std::ptrdiff_t>(rows);
  const std::size_t L = partition.num_labels;
  Matrix fused(rows, L);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t mi = 0; mi < B; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    for (LabelId l = 0; l < L; ++l) {
      if (strategy == FusionStrategy::max_pool) {
        const PlayerId w = row_winner(player_probs, partition, m, l);
        fused(m, l) = player_probs[w](m, static_cast<std::size_t>(partition.slot(w, l)));
      } else {
        double p = 0.0;
        for (PlayerId i : partition.coverage[l]) {
          const auto k = static_cast<std::size_t>(partition.slot(i, l));
          p += weights[i][k] * player_probs[i](m, k);
        }
        fused(m, l) = p;
      }
    }
  }
  return fused;
}

PlayerGradient player_gradient(PlayerId player, const std::vector<PlayerModel>& players,
                               const Partition& partition, const FrequencyTable& ft, const GameSpec& spec,
                               const Matrix& features, const Matrix& labels) {
  const std::size_t B = features.rows();
  if (B == 0) throw InputError("empty batch");
  if (labels.rows() != B || labels.cols() != partition.num_labels) throw InputError("label batch shape mismatch");
  const PlayerModel& self = players[player];
  check_features(self, features);

  std::vector<Matrix> probs(players.size());
  for (PlayerId j = 0; j < players.size(); ++j) probs[j] = forward_batch(players[j], features);
  const auto weights = resolve_fusion_weights(spec.fusion, partition);
  const Matrix fused = fuse_batch(probs, partition, spec.fusion.strategy, weights);

  const std::size_t L = partition.num_labels;
  const auto Bd = static_cast<double>(B);
  const double alpha = spec.curiosity.alpha;
  const double beta = spec.curiosity.beta;
  const bool soft_f1 = spec.surrogate.kind == SurrogateKind::soft_f1;

  // Pooled soft-F1 numerator and denominator: per-row partials, fixed-order sum.
  double f1_num = 0.0, f1_den = 0.0;
  if (soft_f1) {
    std::vector<double> row_overlap(B), row_mass(B);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(B); ++mi) {
      const auto m = static_cast<std::size_t>(mi);
      double overlap = 0.0, mass = 0.0;
      for (LabelId l = 0; l < L; ++l) {
        const double w = spec.surrogate.label_weight(l);
        overlap += w * fused(m, l) * labels(m, l);
        mass += w * (fused(m, l) + labels(m, l));
      }
      row_overlap[m] = overlap;
      row_mass[m] = mass;
    }
    double overlap = 0.0, mass = 0.0;
    for (std::size_t m = 0; m < B; ++m) {
      overlap += row_overlap[m];
      mass += row_mass[m];
    }
    f1_num = 2.0 * overlap + kSoftF1Smoothing;
    f1_den = mass + kSoftF1Smoothing;
  }

  const auto& block = self.block;
  const std::size_t K = block.size();
  std::size_t shared = 0;
  for (LabelId l : block) shared += partition.coverage[l].size() > 1 ? 1 : 0;
  const double disagreement_scale = shared == 0 ? 0.0 : alpha * beta / (Bd * static_cast<double>(shared));

  // delta(m, k) = dJ_i / dz_{m,k}
  Matrix delta(B, K);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(B); ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    for (std::size_t k = 0; k < K; ++k) {
      const LabelId l = block[k];
      const double pi = probs[player](m, k);
      if (pi <= kProbEpsilon || pi >= 1.0 - kProbEpsilon) continue;  // clamped: flat
      const double p = fused(m, l);
      const double y = labels(m, l);

      double route = 0.0;
      if (spec.fusion.strategy == FusionStrategy::max_pool) {
        route = row_winner(probs, partition, m, l) == player ? 1.0 : 0.0;
      } else {
        route = weights[player][k];
      }

      const double lw = spec.surrogate.label_weight(l);
      double d_payoff = 0.0;
      if (soft_f1) {
        d_payoff = lw * (2.0 * y * f1_den - f1_num) / (f1_den * f1_den);
      } else {
        d_payoff = lw * (y / p - (1.0 - y) / (1.0 - p)) / (Bd * static_cast<double>(L));
      }
      if (spec.curiosity.mode == CorrectnessMode::soft_probability) {
        d_payoff += alpha / Bd * (y > 0.5 ? 1.0 : -1.0) / (1.0 + ft.freq[l]);
      }

      double d_disagree = 0.0;
      const auto& cover = partition.coverage[l];
      if (cover.size() > 1 && disagreement_scale > 0.0) {
        double peer = 0.0;
        for (PlayerId j : cover) {
          if (j != player) peer += probs[j](m, static_cast<std::size_t>(partition.slot(j, l)));
        }
        peer /= static_cast<double>(cover.size() - 1);
        d_disagree = disagreement_scale * (std::log(pi / peer) - std::log((1.0 - pi) / (1.0 - peer)));
      }
      delta(m, k) = (d_payoff * route + d_disagree) * pi * (1.0 - pi);
    }
  }

  PlayerGradient g{Matrix(K, self.feature_dim), std::vector<double>(K, 0.0)};
  const std::size_t d = self.feature_dim;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ki = 0; ki < static_cast<std::ptrdiff_t>(K); ++ki) {
    const auto k = static_cast<std::size_t>(ki);
    auto gw = g.weights.row(k);
    double gb = 0.0;
    for (std::size_t m = 0; m < B; ++m) {
      const double dz = delta(m, k);
      if (dz == 0.0) continue;
      const auto x = features.row(m);
      for (std::size_t j = 0; j < d; ++j) gw[j] += dz * x[j];
      gb += dz;
    }
    g.bias[k] = gb;
  }
  return g;
}

std::size_t sweep_operation_count(const Partition& partition, std::size_t feature_dim) {
  std::size_t ops = 0;
  for (PlayerId i = 0; i < partition.num_players(); ++i) {
    ops += partition.blocks[i].size() * (feature_dim + 1) + partition.blocks[i].size() + partition.overlaps[i].size();
  }
  return ops;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace tailgame::kernels
