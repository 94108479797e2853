#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tailgame/error.hpp"
#include "tailgame/metrics.hpp"
#include "tailgame/training.hpp"

using namespace tailgame;

namespace {

Matrix from_bits(std::size_t B, std::size_t L, std::uint32_t bits) {
  Matrix m(B, L);
  for (std::size_t k = 0; k < B * L; ++k) m.values()[k] = (bits >> k) & 1u;
  return m;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(r.size(), r.begin()->size());
  std::size_t i = 0;
  for (const auto& row : r) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("f1 examples") {
  // tail label 0: TP=1, FN=1, FP=0
  const auto y = rows({{1, 0}, {1, 1}});
  const auto yhat = rows({{1, 0}, {0, 1}});
  const std::vector<LabelId> tail{0};
  CHECK(f1_scores(yhat, y, tail).rare == doctest::Approx(2.0 / 3.0));
  const auto exact = f1_scores(y, y, tail);
  CHECK(exact.micro == 1.0);
  CHECK(exact.macro == 1.0);
  CHECK(exact.rare == 1.0);
  CHECK_THROWS_WITH_AS(f1_scores(y, y, {}), "empty tail set", InputError);
  const auto zeros = f1_scores(Matrix(2, 2), Matrix(2, 2), tail);
  CHECK(zeros.micro == 0.0);
  CHECK(zeros.macro == 1.0);
  CHECK(zeros.rare == 0.0);
}

TEST_CASE("f1 against brute force, exhaustive up to 3x3") {
  for (std::size_t B = 1; B <= 3; ++B) {
    for (std::size_t L = 1; L <= 3; ++L) {
      const std::uint32_t n = 1u << (B * L);
      const std::vector<LabelId> tail{static_cast<LabelId>(L - 1)};
      for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = 0; b < n; ++b) {
          const auto yhat = from_bits(B, L, a), y = from_bits(B, L, b);
          const auto s = f1_scores(yhat, y, tail);
          REQUIRE(s.micro == oracle::micro_f1(yhat, y));
          REQUIRE(s.macro == doctest::Approx(oracle::macro_f1(yhat, y)).epsilon(1e-12));
          REQUIRE(s.rare == oracle::pooled_f1(oracle::count_labels(yhat, y, tail)));
        }
      }
    }
  }
}

TEST_CASE("single-label micro equals that label's F1") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto y = oracle::random_labels(6, 1, rng), yhat = oracle::random_labels(6, 1, rng);
    Matrix scores = yhat;
    const auto r = evaluate_metrics(scores, yhat, y, std::vector<LabelId>{0}, std::vector<std::size_t>{1});
    if (r.per_label[0].precision + r.per_label[0].recall > 0 || oracle::micro_f1(yhat, y) > 0) {
      CHECK(r.micro_f1 == doctest::Approx(r.per_label[0].f1));
    }
  }
}

TEST_CASE("turning a tail FN into a TP raises Rare-F1") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto y = oracle::random_labels(5, 4, rng, 0.5);
    auto yhat = oracle::random_labels(5, 4, rng, 0.5);
    const std::vector<LabelId> tail{2, 3};
    for (std::size_t m = 0; m < 5; ++m) {
      for (LabelId l : tail) {
        if (y(m, l) > 0.5 && yhat(m, l) < 0.5) {
          const double before = f1_scores(yhat, y, tail).rare;
          Matrix fixed = yhat;
          fixed(m, l) = 1.0;
          CHECK(f1_scores(fixed, y, tail).rare > before);
        }
      }
    }
  }
}

TEST_CASE("precision at k") {
  const auto s = rows({{0.9, 0.1, 0.5}});
  CHECK(precision_at_k(s, rows({{1, 0, 0}}), 1) == 1.0);
  CHECK(precision_at_k(s, rows({{0, 1, 0}}), 3) == doctest::Approx(1.0 / 3.0));
  CHECK(precision_at_k(rows({{0.5, 0.5}}), rows({{0, 1}}), 1) == 0.0);  // tie goes to label 0
  CHECK_THROWS_AS(precision_at_k(s, rows({{1, 0, 0}}), 4), InputError);
  CHECK_THROWS_AS(precision_at_k(s, rows({{1, 0, 0}}), 0), InputError);
}

TEST_CASE("mean average precision") {
  CHECK(mean_average_precision(rows({{0.9}, {0.1}}), rows({{1}, {0}})) == 1.0);
  CHECK(mean_average_precision(rows({{0.1}, {0.9}}), rows({{1}, {0}})) == 0.5);
  CHECK(mean_average_precision(rows({{0.5}, {0.5}}), rows({{0}, {1}})) == 0.5);  // tie keeps sample order
  CHECK_THROWS_AS(mean_average_precision(rows({{0.5}, {0.5}}), rows({{0}, {0}})), InputError);
}

TEST_CASE("ranking metrics against brute force") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> level(0, 4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t B = 1 + t % 6, L = 1 + (t / 6) % 7;
    Matrix s(B, L);
    for (double& v : s.values()) v = level(rng) / 4.0;
    const auto y = oracle::random_labels(B, L, rng, 0.4);
    for (std::size_t k = 1; k <= L; ++k) CHECK(precision_at_k(s, y, k) == doctest::Approx(oracle::p_at_k(s, y, k)));
    const double want = oracle::mean_ap(s, y);
    if (want < 0) {
      CHECK_THROWS_AS(mean_average_precision(s, y), InputError);
    } else {
      CHECK(mean_average_precision(s, y) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("metrics are invariant to sample order") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix s(20, 5);
  for (double& v : s.values()) v = u(rng);
  const auto y = oracle::random_labels(20, 5, rng, 0.4);
  const std::vector<double> tau{0.5};
  const std::vector<LabelId> tail{3, 4};
  const std::vector<std::size_t> ks{1, 3};
  const auto a = evaluate_metrics(s, apply_thresholds(s, tau), y, tail, ks);
  Matrix s2(20, 5), y2(20, 5);
  for (std::size_t m = 0; m < 20; ++m) {
    for (std::size_t l = 0; l < 5; ++l) {
      s2(19 - m, l) = s(m, l);
      y2(19 - m, l) = y(m, l);
    }
  }
  const auto b = evaluate_metrics(s2, apply_thresholds(s2, tau), y2, tail, ks);
  CHECK(a.micro_f1 == b.micro_f1);
  CHECK(a.macro_f1 == doctest::Approx(b.macro_f1));
  CHECK(a.rare_f1 == b.rare_f1);
  CHECK(a.map == doctest::Approx(b.map));
  CHECK(a.p_at_k.at(3) == doctest::Approx(b.p_at_k.at(3)));
  for (double v : {a.micro_f1, a.macro_f1, a.rare_f1, a.map, a.p_at_k.at(1)}) CHECK((v >= 0 && v <= 1));
}

TEST_CASE("specialization ranks") {
  const auto ft = frequencies_from_counts({8, 6, 4, 2}, 10);
  SUBCASE("one player ranks first everywhere") {
    const auto p = partition_labels(ft, 1, 0.0);
    const auto players = init_players(p, 2, 0.5, 1);
    const auto split = split_head_tail(ft, HeadTailRule::count_fraction(0.5));
    std::mt19937_64 rng(1);
    const auto r = specialization_ranks(players, oracle::random_matrix(10, 2, rng), oracle::random_labels(10, 4, rng),
                                        split, p);
    CHECK(r.head.rank[0] == std::optional<std::size_t>{1});
    CHECK(r.tail.rank[0] == std::optional<std::size_t>{1});
  }
  SUBCASE("identical players tie toward the lower id; uncovering players are excluded") {
    const auto p = make_partition(4, 0.5, {{0, 1, 2, 3}, {0, 1, 2, 3}, {0}}, {{0, 1, 2, 3}, {}, {}});
    auto players = init_players(p, 2, 0.0, 1);
    players[1] = players[0];
    players[1].id = 1;
    const auto split = split_head_tail(ft, HeadTailRule::count_fraction(0.5));
    std::mt19937_64 rng(2);
    const auto r = specialization_ranks(players, oracle::random_matrix(6, 2, rng), oracle::random_labels(6, 4, rng),
                                        split, p);
    CHECK(r.tail.rank[0] == std::optional<std::size_t>{1});
    CHECK(r.tail.rank[1] == std::optional<std::size_t>{2});
    CHECK(!r.tail.rank[2].has_value());
    CHECK(r.tail.excluded == std::vector<PlayerId>{2});
  }
  SUBCASE("the trained tail player ranks first on the tail") {
    SynthSpec spec;
    spec.num_labels = 6;
    spec.feature_dim = 5;
    spec.num_samples = 600;
    spec.power_exponent = 0.3;
    const auto sp = split_dataset(generate_synthetic(spec, 3), {0.6, 0.2, 0.2}, 3);
    TrainConfig cfg;
    cfg.players = 2;
    cfg.overlap = 0.0;
    cfg.epochs = 30;
    cfg.curiosity.alpha = 0.0;
    cfg.surrogate = SurrogateKind::neg_bce;
    cfg.player_learning_rates = {1e-300, 5.0};  // player 0 stays at its initialisation
    cfg.init_sigma = 0.5;
    const auto res = train(sp.train, sp.val, cfg);
    const auto split = split_head_tail(res.model.frequencies, HeadTailRule::count_fraction(0.5));
    const auto r = specialization_ranks(res.model.players, sp.test.feature_matrix(), sp.test.label_matrix(), split,
                                        res.model.partition);
    CHECK(r.tail.rank[1] == std::optional<std::size_t>{1});
  }
}
