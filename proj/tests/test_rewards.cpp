#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tailgame/error.hpp"
#include "tailgame/kernels.hpp"
#include "tailgame/rewards.hpp"

using namespace tailgame;

namespace {

Matrix row(std::vector<double> v) {
  Matrix m(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
  return m;
}

}  // namespace

TEST_CASE("surrogate examples") {
  SurrogateSpec f1;
  CHECK(surrogate_score(row({1, 0, 1}), row({1, 0, 1}), f1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(surrogate_score(row({0, 0, 0}), row({1, 0, 1}), f1) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(surrogate_score(row({0.5, 0.5}), row({1, 0}), f1) == doctest::Approx(0.5).epsilon(1e-6));
  SurrogateSpec bce{SurrogateKind::neg_bce, {}};
  CHECK(surrogate_score(row({0.5, 0.5}), row({1, 0}), bce) == doctest::Approx(-std::log(2.0)));
  CHECK(f1.max_value() == 1.0);
  CHECK(bce.max_value() == 0.0);
}

TEST_CASE("surrogate bounds over random inputs") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(kProbEpsilon, 1 - kProbEpsilon);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t B = 1 + t % 5, L = 1 + t % 7;
    Matrix p(B, L);
    for (double& v : p.values()) v = u(rng);
    const auto y = oracle::random_labels(B, L, rng, 0.3);
    const double f = surrogate_score(p, y, {});
    CHECK((f >= 0.0 && f <= 1.0));
    CHECK(surrogate_score(p, y, {SurrogateKind::neg_bce, {}}) <= 0.0);
  }
}

TEST_CASE("rarity bonus") {
  const auto ft = frequencies_from_counts({0, 4}, 4);
  const std::vector<LabelId> block{0, 1};
  const std::vector<double> y{1, 0};
  const std::vector<std::uint8_t> correct{1, 0}, a_wrong{0, 0};
  CHECK(rarity_bonus(block, std::vector<double>{0.9, 0.2}, correct, y, ft, CorrectnessMode::hard_indicator) == 1.5);
  CHECK(rarity_bonus(block, std::vector<double>{0.1, 0.2}, a_wrong, y, ft, CorrectnessMode::hard_indicator) == 0.5);
  CHECK(rarity_bonus(block, std::vector<double>{1.0, 0.0}, correct, y, ft, CorrectnessMode::soft_probability) == 1.5);
  CHECK(rarity_bonus(block, std::vector<double>{0.7, 0.2}, correct, y, ft, CorrectnessMode::soft_probability) ==
        doctest::Approx(0.7 + 0.8 * 0.5));
  // soft approaches hard when probabilities saturate on the right side
  const std::vector<double> sat{1 - kProbEpsilon, kProbEpsilon};
  const double soft = rarity_bonus(block, sat, correct, y, ft, CorrectnessMode::soft_probability);
  CHECK(std::abs(soft - 1.5) <= kProbEpsilon * 2);
}

TEST_CASE("bernoulli kl and disagreement") {
  CHECK(bernoulli_kl(0.9, 0.5) == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)));
  CHECK(bernoulli_kl(0.9, 0.5) == doctest::Approx(0.3681).epsilon(1e-4));
  CHECK(bernoulli_kl(0.3, 0.3) == 0.0);

  const auto p = make_partition(3, 0.5, {{0, 1}, {1, 2}, {1, 2}}, {{0, 1}, {2}, {}});
  std::vector<std::vector<double>> probs{{0.2, 0.9}, {0.5, 0.4}, {0.3, 0.8}};
  std::vector<std::span<const double>> spans(probs.begin(), probs.end());
  // player 0 shares only label 1 with peers 1 and 2 (mean 0.4)
  CHECK(disagreement(0, spans, p) == doctest::Approx(bernoulli_kl(0.9, 0.4)));
  // player 1 shares labels 1 and 2
  const double d1 = 0.5 * (bernoulli_kl(0.5, (0.9 + 0.3) / 2) + bernoulli_kl(0.4, 0.8));
  CHECK(disagreement(1, spans, p) == doctest::Approx(d1));

  const auto solo = make_partition(2, 0.0, {{0, 1}}, {{0, 1}});
  std::vector<std::span<const double>> one{probs[0]};
  CHECK(disagreement(0, one, solo) == 0.0);

  std::vector<std::vector<double>> same{{0.3, 0.6}, {0.6, 0.1}, {0.6, 0.1}};
  std::vector<std::span<const double>> s2(same.begin(), same.end());
  CHECK(disagreement(1, s2, p) == doctest::Approx(bernoulli_kl(0.6, 0.6) * 0.5).epsilon(1e-12));
}

TEST_CASE("disagreement is non-negative on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(kProbEpsilon, 1 - kProbEpsilon);
  const auto p = make_partition(4, 0.5, {{0, 1, 2}, {1, 2, 3}, {2, 3}}, {{0, 1}, {2}, {3}});
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::vector<double>> probs{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, {u(rng), u(rng)}};
    std::vector<std::span<const double>> spans(probs.begin(), probs.end());
    for (PlayerId i = 0; i < 3; ++i) CHECK(disagreement(i, spans, p) >= 0.0);
  }
}

TEST_CASE("curiosity, objective and potential arithmetic") {
  CHECK(curiosity(1.5, 0.3681, 0.0) == 1.5);
  CHECK(curiosity(0.0, 0.0, 0.2) == 0.0);
  CHECK(curiosity(1.5, 0.3681, 0.2) == doctest::Approx(1.57362));
  CHECK(per_player_objective(0.5, 1.5, 0.0) == 0.5);
  CHECK(per_player_objective(0.5, 1.5, 0.5) == 1.25);
  CHECK(per_player_objective(0.5, 0.0, 0.5) == 0.5);
  const std::vector<double> c{1.5, 0.8, 0.2};
  CHECK(potential(0.5, c, 0.0) == 0.5);
  CHECK(potential(0.5, c, 0.5) == doctest::Approx(1.75));
  CHECK(potential(0.5, std::vector<double>{1.5}, 0.5) == per_player_objective(0.5, 1.5, 0.5));
  CuriositySpec bad;
  bad.alpha = -1;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("tail recall surrogate") {
  const auto ft = frequencies_from_counts({0, 3}, 3);
  const auto p = make_partition(2, 0.0, {{1, 0}}, {{1, 0}});
  const std::vector<LabelId> tail{0};
  Matrix fused(3, 2), y(3, 2);
  fused(0, 0) = 1;
  y(0, 0) = 1;
  fused(1, 0) = 1;
  y(1, 0) = 1;
  CHECK(tail_recall_surrogate(fused, y, ft, p, tail) == 2.0);
  Matrix half = fused;
  for (double& v : half.values()) v *= 0.5;
  CHECK(tail_recall_surrogate(half, y, ft, p, tail) == 1.0);
  CHECK(tail_recall_surrogate(fused, Matrix(3, 2), ft, p, tail) == 0.0);
  try {
    tail_recall_surrogate(fused, y, ft, p, {});
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "empty tail set");
  }
}

TEST_CASE("rarity dominance") {
  const auto ft = frequencies_from_counts({1, 9}, 10);
  CHECK(1.0 / (1.0 + ft.freq[0]) > 1.0 / (1.0 + ft.freq[1]));
}

TEST_CASE("misclassified tail positive gets a positive logit derivative") {
  // One-sample batches; the rarest label sits in the last player's block.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> logit(-6.0, -0.05);
  const auto ft = frequencies_from_counts({9, 7, 5, 1}, 10);
  const auto p = make_partition(4, 0.9, {{0, 1, 2}, {1, 2, 3}}, {{0, 1}, {2, 3}});
  for (int t = 0; t < 50; ++t) {
    auto players = init_players(p, 3, 1.0, static_cast<std::uint64_t>(t));
    const Matrix x = oracle::random_matrix(1, 3, rng);
    double z = 0.0;
    for (std::size_t j = 0; j < 3; ++j) z += players[1].weights(2, j) * x(0, j);
    players[1].bias[2] = logit(rng) - z;
    Matrix y(1, 4);
    y(0, 3) = 1.0;
    const auto g = kernels::player_gradient(1, players, p, ft, GameSpec{}, x, y);
    CHECK(g.bias[2] > 0.0);
  }
}
