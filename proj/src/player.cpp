#include "tailgame/player.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tailgame/error.hpp"
#include "tailgame/rng.hpp"

namespace tailgame {

bool PlayerModel::all_finite() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(weights.values().begin(), weights.values().end(), finite) &&
         std::all_of(bias.begin(), bias.end(), finite);
}

std::vector<PlayerModel> init_players(const Partition& partition, std::size_t feature_dim, double sigma,
                                      std::uint64_t seed) {
  if (feature_dim == 0) throw InputError("feature_dim must be >= 1");
  if (!(sigma >= 0.0)) throw InputError("init sigma must be non-negative");
  auto rng = make_rng(seed, Stream::kInit);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<PlayerModel> players;
  players.reserve(partition.num_players());
  for (PlayerId i = 0; i < partition.num_players(); ++i) {
    PlayerModel p;
    p.id = i;
    p.block = partition.blocks[i];
    p.feature_dim = feature_dim;
    p.weights = Matrix(p.block.size(), feature_dim);
    p.bias.assign(p.block.size(), 0.0);
    for (double& w : p.weights.values()) w = sigma * gauss(rng);
    for (double& b : p.bias) b = sigma * gauss(rng);
    players.push_back(std::move(p));
  }
  return players;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

PlayerOutput player_forward(const PlayerModel& player, std::span<const double> x) {
  if (x.size() != player.feature_dim) {
    throw InputError("feature dimension mismatch: got " + std::to_string(x.size()) + ", player expects " +
                     std::to_string(player.feature_dim));
  }
  PlayerOutput out;
  out.player_id = player.id;
  out.probs.resize(player.block.size());
  for (std::size_t k = 0; k < player.block.size(); ++k) {
    const auto w = player.weights.row(k);
    const double z = std::inner_product(w.begin(), w.end(), x.begin(), player.bias[k]);
    out.probs[k] = clamp_prob(sigmoid(z));
  }
  return out;
}

}  // namespace tailgame
