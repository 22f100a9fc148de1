#include <gtest/gtest.h>

#include <set>

#include "mmarket/matching.hpp"
#include "support/oracles.hpp"

namespace mmarket {
namespace {

MarketInstance latin_square() {
  return make_instance({3, 0, 1.0, 1.0, 0},
                       {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}},
                       {{1, 2, 0}, {2, 0, 1}, {0, 1, 2}});
}

// n men and n women where man i's list is the central order rotated by i and
// woman j's list is reversed-rotated: a market with many stable matchings.
MarketInstance cyclic_market(int n) {
  std::vector<std::vector<int>> men(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> women(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      men[static_cast<std::size_t>(i)].push_back((i + j) % n);
      women[static_cast<std::size_t>(i)].push_back((i + 1 + j) % n);
    }
  }
  return make_instance({n, 0, 1.0, 1.0, 0}, men, women);
}

TEST(EnumerateStableTest, UnanimousHasOneMatching) {
  for (int n : {1, 2, 7, 40}) {
    const auto set = enumerate_stable(generate({n, 3, 0.0, 0.0, 1}), 100);
    ASSERT_EQ(set.matchings.size(), 1u);
    EXPECT_FALSE(set.truncated);
    EXPECT_EQ(set.man_optimal, set.woman_optimal);
  }
}

TEST(EnumerateStableTest, LatinSquareHasThree) {
  const auto inst = latin_square();
  const auto set = enumerate_stable(inst, 100);
  ASSERT_EQ(set.matchings.size(), 3u);
  EXPECT_EQ(oracle::sorted_men_views(set), oracle::sorted_men_views(brute_force_stable(inst)));
  EXPECT_EQ(set.matchings.front().man_to_woman, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(set.matchings.back().man_to_woman, (std::vector<int>{2, 0, 1}));
}

TEST(EnumerateStableTest, CapTruncatesButKeepsExtremes) {
  const auto inst = latin_square();
  const auto set = enumerate_stable(inst, 2);
  ASSERT_EQ(set.matchings.size(), 2u);
  EXPECT_TRUE(set.truncated);
  EXPECT_EQ(set.matchings[set.man_optimal], deferred_acceptance(inst, Side::Men));
  EXPECT_EQ(set.matchings[set.woman_optimal], deferred_acceptance(inst, Side::Women));

  const auto exact = enumerate_stable(inst, 3);
  EXPECT_EQ(exact.matchings.size(), 3u);
  EXPECT_FALSE(exact.truncated);

  EXPECT_THROW(enumerate_stable(inst, 1), std::invalid_argument);
}

TEST(EnumerateStableTest, CyclicMarketAgainstBruteForce) {
  for (int n = 2; n <= 8; ++n) {
    const auto inst = cyclic_market(n);
    const auto set = enumerate_stable(inst, 1'000'000);
    EXPECT_EQ(oracle::sorted_men_views(set), oracle::sorted_men_views(brute_force_stable(inst))) << "n=" << n;
  }
}

TEST(EnumerateStableTest, MatchesBruteForceOnMallowsMarkets) {
  std::uint64_t seed = 0;
  for (double phi : {0.5, 0.9, 1.0}) {
    for (int trial = 0; trial < 150; ++trial) {
      const int n = 1 + static_cast<int>(seed % 8);
      const int k = static_cast<int>((seed / 8) % 3);
      const auto inst = generate({n, k, phi, phi, ++seed});
      const auto set = enumerate_stable(inst, 100000);
      ASSERT_FALSE(set.truncated);
      ASSERT_EQ(oracle::sorted_men_views(set), oracle::sorted_men_views(brute_force_stable(inst)))
          << "phi=" << phi << " n=" << n << " k=" << k << " seed=" << seed;
    }
  }
}

TEST(EnumerateStableTest, LatticeProperties) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 14);
    const int k = static_cast<int>(gen() % 4);
    const auto inst = oracle::random_uniform_instance(n, k, gen);
    const auto set = enumerate_stable(inst, 5000);
    const auto& mu_m = set.matchings[set.man_optimal];
    const auto& mu_w = set.matchings[set.woman_optimal];
    ASSERT_EQ(mu_m, deferred_acceptance(inst, Side::Men));
    ASSERT_EQ(mu_w, deferred_acceptance(inst, Side::Women));

    std::set<std::vector<int>> distinct;
    const auto unmatched = mu_m.unmatched_women();
    for (const auto& mu : set.matchings) {
      ASSERT_TRUE(distinct.insert(mu.man_to_woman).second) << "duplicate matching";
      ASSERT_TRUE(is_stable(inst, mu));
      ASSERT_EQ(mu.unmatched_women(), unmatched);  // rural hospitals
      for (int m = 0; m < n; ++m) {
        const int r = inst.men.rank_of(m, mu.man_to_woman[m]);
        ASSERT_LE(inst.men.rank_of(m, mu_m.man_to_woman[m]), r);
        ASSERT_GE(inst.men.rank_of(m, mu_w.man_to_woman[m]), r);
      }
      for (int w = 0; w < n + k; ++w) {
        const int him = mu.woman_to_man[w];
        if (him == kUnmatched) continue;
        const int r = inst.women.rank_of(w, him);
        ASSERT_LE(inst.women.rank_of(w, mu_w.woman_to_man[w]), r);
        ASSERT_GE(inst.women.rank_of(w, mu_m.woman_to_man[w]), r);
      }
    }
  }
}

TEST(RotationPosetTest, PredecessorsPointBackwards) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = oracle::random_uniform_instance(12, static_cast<int>(gen() % 3), gen);
    const auto poset = build_rotation_poset(inst);
    ASSERT_EQ(poset.predecessors.size(), poset.rotations.size());
    for (std::size_t r = 0; r < poset.rotations.size(); ++r) {
      EXPECT_GE(poset.rotations[r].pairs.size(), 2u);
      for (int p : poset.predecessors[r]) EXPECT_LT(p, static_cast<int>(r));
    }
    // Eliminating every rotation in order walks from one extreme to the other.
    Matching mu = poset.man_optimal;
    for (const auto& rot : poset.rotations) eliminate(mu, rot);
    EXPECT_EQ(mu, poset.woman_optimal);
  }
}

}  // namespace
}  // namespace mmarket
