#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tailgame/diagnostics.hpp"
#include "tailgame/error.hpp"

using namespace tailgame;

namespace {

Matrix filled(std::size_t B, std::size_t L, double v) {
  Matrix m(B, L);
  for (double& x : m.values()) x = v;
  return m;
}

EpochDiagnostics epoch(std::size_t e, double phi, double kl_tail) {
  EpochDiagnostics d;
  d.epoch = e;
  d.phi = phi;
  d.kl.kl_tail = kl_tail;
  return d;
}

}  // namespace

TEST_CASE("identical players disagree nowhere") {
  const auto p = make_partition(3, 0.5, {{0, 1, 2}, {1, 2}}, {{0}, {1, 2}});
  const HeadTailSplit split{{0}, {1, 2}, HeadTailRule::count_fraction(0.5)};
  const auto d = disagreement_by_split({filled(4, 3, 0.3), filled(4, 2, 0.3)}, p, split);
  CHECK(d.has_peers);
  CHECK(d.kl_head == 0.0);
  CHECK(d.kl_tail == 0.0);
  CHECK(!d.head_shared);
  CHECK(d.tail_shared);
}

TEST_CASE("single player has no peers") {
  const auto p = make_partition(2, 0.0, {{0, 1}}, {{0, 1}});
  const HeadTailSplit split{{0}, {1}, HeadTailRule::count_fraction(0.5)};
  const auto d = disagreement_by_split({filled(2, 2, 0.7)}, p, split);
  CHECK(!d.has_peers);
  CHECK(d.kl_tail == 0.0);
}

TEST_CASE("two players on one shared tail label") {
  const auto p = make_partition(2, 0.5, {{0, 1}, {1}}, {{0}, {1}});
  const HeadTailSplit split{{0}, {1}, HeadTailRule::count_fraction(0.5)};
  Matrix a(1, 2), b(1, 1);
  a(0, 0) = 0.2;
  a(0, 1) = 0.9;
  b(0, 0) = 0.5;
  const auto d = disagreement_by_split({a, b}, p, split);
  auto kl = [](double x, double y) { return x * std::log(x / y) + (1 - x) * std::log((1 - x) / (1 - y)); };
  CHECK(d.kl_tail == doctest::Approx((kl(0.9, 0.5) + kl(0.5, 0.9)) / 2.0));
  CHECK(d.kl_head == 0.0);
}

TEST_CASE("split disagreement is non-negative on random inputs") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const auto ft = frequencies_from_counts({9, 7, 5, 3, 2, 1}, 10);
  const auto p = partition_labels(ft, 3, 0.5);
  const auto split = split_head_tail(ft, HeadTailRule::count_fraction(0.5));
  for (int t = 0; t < 100; ++t) {
    std::vector<Matrix> probs;
    for (PlayerId i = 0; i < 3; ++i) {
      Matrix m(5, p.blocks[i].size());
      for (double& v : m.values()) v = u(rng);
      probs.push_back(m);
    }
    const auto d = disagreement_by_split(probs, p, split);
    CHECK(d.kl_head >= 0.0);
    CHECK(d.kl_tail >= 0.0);
  }
}

TEST_CASE("trace summary") {
  SUBCASE("increasing potential with a matching kl drop") {
    const std::vector<EpochDiagnostics> t{epoch(1, 1.0, 0.5), epoch(2, 3.0, 0.2), epoch(3, 3.5, 0.15)};
    const auto s = trace_summary(t);
    CHECK(s.epochs == 3);
    CHECK(s.monotone_fraction == 1.0);
    CHECK(s.max_gain_epoch == 2);
    CHECK(s.max_kl_decline_epoch == 2);
    CHECK(s.gain_overlaps_decline);
    CHECK(s.kl_tail_first == 0.5);
    CHECK(s.kl_tail_last == 0.15);
  }
  SUBCASE("constant potential counts as non-decreasing") {
    const std::vector<EpochDiagnostics> t{epoch(1, 2.0, 0), epoch(2, 2.0, 0), epoch(3, 2.0, 0)};
    CHECK(trace_summary(t).monotone_fraction == 1.0);
  }
  SUBCASE("a dip and a distant decline") {
    const std::vector<EpochDiagnostics> t{epoch(1, 0.0, 1.0), epoch(2, 5.0, 1.0), epoch(3, 4.0, 1.0),
                                          epoch(4, 4.5, 1.0), epoch(5, 4.6, 0.1)};
    const auto s = trace_summary(t);
    CHECK(s.monotone_fraction == doctest::Approx(0.75));
    CHECK(s.max_gain_epoch == 2);
    CHECK(s.max_kl_decline_epoch == 5);
    CHECK(!s.gain_overlaps_decline);
  }
  SUBCASE("too short") {
    const std::vector<EpochDiagnostics> t{epoch(1, 0.0, 0.0)};
    CHECK_THROWS_AS(trace_summary(t), InputError);
  }
}
