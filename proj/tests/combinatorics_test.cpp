#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dvino/combinatorics.hpp"

using namespace dvino;

namespace {

ValueSequence seq(std::initializer_list<Rational> v) { return ValueSequence(std::vector<Rational>(v)); }

using Idx = std::vector<std::size_t>;

ValueSequence random_sequence(std::mt19937_64& rng, std::size_t n, int den) {
  std::vector<Rational> v(n);
  for (auto& x : v) x = Rational(static_cast<std::int64_t>(rng() % (den + 1)), den);
  std::sort(v.begin(), v.end(), std::greater<>());
  return ValueSequence(v);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // sentinel: nothing thrown
}

}  // namespace

TEST(ValueSequence, RejectsIncreasingAndOutOfRange) {
  EXPECT_THROW(seq({Rational(1, 2), Rational(1)}), Error);
  EXPECT_THROW(seq({Rational(3, 2)}), Error);
  EXPECT_EQ(seq({1, Rational(1, 2), 0}).last_nonzero(), 1U);
}

TEST(SelectSingle, AllOnes) {
  auto w = select_single(seq({1, 1}), 4, Rational(3, 5));
  EXPECT_EQ(w.indices, (Idx{0, 1, 0, 1}));
  EXPECT_EQ(w.value_sum, Rational(4));
  EXPECT_EQ(w.threshold, Rational(12, 5));
  EXPECT_TRUE(w.all_positive);
}

TEST(SelectSingle, OneAndHalf) {
  auto a = seq({1, Rational(1, 2)});
  auto w = select_single(a, 4, Rational(37, 50));
  EXPECT_EQ(w.indices, (Idx{0, 1, 0, 1}));
  EXPECT_EQ(w.value_sum, Rational(3));
  // exhaustive over {0,1}^4: optimum 3; the all-ones tuple gives only 2
  std::vector<ValueSequence> cols{a};
  auto best = brute_force_select(cols, 4, 2);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->value_sum, Rational(3));
}

TEST(SelectSingle, LengthFour) {
  auto a = seq({1, Rational(9, 10), Rational(2, 5), 0});
  auto w = select_single(a, 4, Rational(11, 20));
  EXPECT_EQ(w.indices, (Idx{1, 1, 1, 1}));
  EXPECT_EQ(w.value_sum, Rational(18, 5));
  std::vector<ValueSequence> cols{a};
  EXPECT_EQ(brute_force_select(cols, 4, 4)->value_sum, Rational(18, 5));
}

TEST(SelectSingle, Hypotheses) {
  EXPECT_EQ(kind_of([] { select_single(seq({1, 0}), 4, Rational(3, 5)); }), ErrorKind::HypothesisUnmet);
  EXPECT_EQ(kind_of([] { select_single(seq({1, 1, 1}), 4, Rational(3, 5)); }), ErrorKind::HypothesisUnmet);
  EXPECT_EQ(kind_of([] { select_single(seq({1, 1}), 4, Rational(1, 2)); }), ErrorKind::HypothesisUnmet);
  EXPECT_EQ(kind_of([] { select_single(seq({1, 1}), 3, Rational(3, 5)); }), ErrorKind::HypothesisUnmet);
  // odd length behind the flag
  auto w = select_single(seq({1, 1, 1}), 4, Rational(3, 5), true);
  EXPECT_GE(w.index_sum, 3U);
  EXPECT_TRUE(w.exceeds_threshold());
}

TEST(SelectSharp4, AllOnes) {
  auto one = seq({1, 1});
  auto w = select_sharp4(one, one, one, one, Rational(63, 100));
  EXPECT_EQ(w.indices, (Idx{1, 1, 0, 0}));
  EXPECT_EQ(w.value_sum, Rational(4));
  EXPECT_EQ(w.threshold, Rational(59, 25));
}

TEST(SelectSharp4, SharpnessInstance) {
  auto a = seq({1, Rational(2, 3)});
  auto d = seq({Rational(1, 10), 0});
  auto w = select_sharp4(a, a, a, d, Rational(63, 100));
  EXPECT_EQ(w.indices, (Idx{1, 1, 0, 0}));
  EXPECT_EQ(w.value_sum, Rational(73, 30));
  std::vector<ValueSequence> cols{a, a, a, d};
  EXPECT_EQ(brute_force_select(cols, 4, 2)->value_sum, Rational(73, 30));
}

TEST(SelectSharp4, ZeroLeadingEntry) {
  auto one = seq({1, 1});
  auto zero = seq({0, 0});
  EXPECT_EQ(kind_of([&] { select_sharp4(one, one, one, zero, Rational(63, 100)); }),
            ErrorKind::HypothesisUnmet);
}

// The n = 2, four-sequence threshold (16/3)c - 1 exceeds 4 once c > 15/16,
// while every value sum is at most 4: all-ones columns at c = 19/20 satisfy
// the hypothesis and admit no witness.
TEST(SelectSharp4, ThresholdUnreachableAboveFifteenSixteenths) {
  auto one = seq({1, 1});
  EXPECT_EQ(kind_of([&] { select_sharp4(one, one, one, one, Rational(19, 20)); }), ErrorKind::NoWitness);
  EXPECT_NO_THROW(select_sharp4(one, one, one, one, Rational(3, 4)));
}

// Below 15/16 it still fails just past 3/4: (1,1) x3 with (t,t) meets the
// hypothesis for cp < 3/4 + t/4, yet the best sum 3 + t is at most
// (16/3)cp - 1 once cp >= 3/4 + 3t/16.
TEST(SelectSharp4, FailsJustAboveThreeQuarters) {
  auto one = seq({1, 1});
  for (std::int64_t inv : {4, 10, 100}) {
    const Rational t(1, inv);
    ValueSequence d({t, t});
    const Rational cp = Rational(3, 4) + Rational(7, 32) * t;  // between 3t/16 and t/4
    EXPECT_EQ(kind_of([&] { select_sharp4(one, one, one, d, cp); }), ErrorKind::NoWitness) << inv;
    std::vector<ValueSequence> cols{one, one, one, d};
    auto best = brute_force_select(cols, 4, 2);
    ASSERT_TRUE(best);
    EXPECT_EQ(best->value_sum, Rational(3) + t);
    EXPECT_FALSE(best->value_sum > Rational(16, 3) * cp - Rational(1));
  }
}

TEST(SelectSharp4, SharpnessGapShrinksWithEpsilon) {
  auto a = seq({1, Rational(2, 3)});
  for (std::int64_t inv : {10, 100, 1000}) {
    Rational eps(1, inv);
    auto d = seq({eps, 0});
    Rational cp = (Rational(5) + eps) / Rational(8) - Rational(1, 1'000'000);
    auto w = select_sharp4(a, a, a, d, cp);
    Rational gap = w.value_sum - w.threshold;
    EXPECT_TRUE(gap.is_positive());
    EXPECT_LT(gap, Rational(2) * eps);
  }
}

TEST(SelectMulti, AllOnesLengthThree) {
  std::vector<ValueSequence> cols(4, seq({1, 1, 1}));
  auto w = select_multi(cols, Rational(7, 10));
  EXPECT_EQ(w.indices, (Idx{1, 1, 1, 0}));
  EXPECT_EQ(w.value_sum, Rational(4));
}

TEST(SelectMulti, FiveColumnsLengthTwo) {
  std::vector<ValueSequence> cols(5, seq({1, Rational(4, 5)}));
  auto w = select_multi(cols, Rational(13, 20));
  EXPECT_EQ(w.indices, (Idx{1, 1, 0, 0, 0}));
  EXPECT_EQ(w.value_sum, Rational(23, 5));
  EXPECT_EQ(brute_force_select(cols, 5, 2)->value_sum, Rational(23, 5));
}

TEST(SelectMulti, BadShapeForFourByTwo) {
  std::vector<ValueSequence> cols(4, seq({1, 1}));
  EXPECT_EQ(kind_of([&] { select_multi(cols, Rational(7, 10)); }), ErrorKind::BadShape);
}

TEST(BruteForce, DegenerateColumns) {
  std::vector<ValueSequence> zeros{seq({0, 0, 0})};
  EXPECT_FALSE(brute_force_select(zeros, 4, 3).has_value());
  std::vector<ValueSequence> single{seq({Rational(1, 2)})};
  auto w = brute_force_select(single, 4, 0);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->indices, (Idx{0, 0, 0, 0}));
  EXPECT_EQ(w->index_sum, 0U);
  std::vector<ValueSequence> big(8, seq({1, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(kind_of([&] { brute_force_select(big, 8, 1); }), ErrorKind::TooLarge);
}

TEST(Selectors, AgreeWithOracleOnRandomInstances) {
  std::mt19937_64 rng(2024);
  int hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t n = 2 + rng() % 4;
    int k = 4 + static_cast<int>(rng() % 3);
    std::vector<ValueSequence> cols;
    for (int j = 0; j < k; ++j) cols.push_back(random_sequence(rng, n, 6));
    Rational c = Rational(k + 1, 2 * k) + Rational(1, 100);
    SelectionWitness w;
    try {
      if (n == 2 && k == 4) {
        w = select_sharp4(cols[0], cols[1], cols[2], cols[3], Rational(5, 8) + Rational(1, 100));
      } else {
        w = select_multi(cols, c);
      }
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::HypothesisUnmet);
      continue;
    }
    ++hits;
    ASSERT_TRUE(witness_is_sound(cols, w, n));
    auto best = brute_force_select(cols, k, n);
    ASSERT_TRUE(best);
    ASSERT_EQ(best->value_sum, w.value_sum);
  }
  EXPECT_GT(hits, 100);
}

TEST(SelectMulti, PermutingColumnsPermutesWitness) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 200; ++trial) {
    std::vector<ValueSequence> cols;
    for (int j = 0; j < 5; ++j) cols.push_back(random_sequence(rng, 3, 97));
    SelectionWitness w;
    try {
      w = select_multi(cols, Rational(3, 5) + Rational(1, 100));
    } catch (const Error&) {
      continue;
    }
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ValueSequence> permuted;
    for (auto p : perm) permuted.push_back(cols[p]);
    auto pw = select_multi(permuted, Rational(3, 5) + Rational(1, 100));
    EXPECT_EQ(pw.value_sum, w.value_sum);
    // with a unique optimum the tuple itself follows the permutation
    std::size_t optima = 0;
    std::vector<std::size_t> idx(5, 0);
    for (int t = 0; t < 243; ++t) {
      int r = t;
      Rational v;
      std::size_t s = 0;
      bool pos = true;
      for (int j = 0; j < 5; ++j) {
        idx[j] = static_cast<std::size_t>(r % 3);
        r /= 3;
        v += cols[j][idx[j]];
        s += idx[j];
        pos = pos && cols[j][idx[j]].is_positive();
      }
      if (pos && s >= 3 && v == w.value_sum) ++optima;
    }
    if (optima == 1) {
      for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(pw.indices[j], w.indices[perm[j]]);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(GridVerify, SmallExamples) {
  std::vector<Rational> quarters{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  auto r1 = grid_verify(LemmaId::Single, 2, 4, quarters, Rational(51, 100));
  EXPECT_EQ(r1.failure_count, 0U);
  EXPECT_EQ(r1.instances_checked, 15U);
  EXPECT_GT(r1.hypothesis_hits, 0U);

  std::vector<Rational> thirds{0, Rational(1, 3), Rational(2, 3), 1};
  auto r2 = grid_verify(LemmaId::Sharp4, 2, 4, thirds, Rational(16, 25));
  EXPECT_EQ(r2.failure_count, 0U);
  EXPECT_EQ(r2.instances_checked, 10000U);

  std::vector<Rational> halves{0, Rational(1, 2), 1};
  auto r3 = grid_verify(LemmaId::Multi, 3, 4, halves, Rational(16, 25));
  EXPECT_EQ(r3.failure_count, 0U);
  EXPECT_EQ(r3.instances_checked, 10000U);
  EXPECT_EQ(r3.oracle_checked, r3.hypothesis_hits);
}

TEST(GridVerify, ReportsCounterexamplesWhenTheBoundIsUnreachable) {
  std::vector<Rational> grid{0, 1};
  auto r = grid_verify(LemmaId::Sharp4, 2, 4, grid, Rational(19, 20));
  EXPECT_GT(r.failure_count, 0U);
  ASSERT_FALSE(r.failures.empty());
}

TEST(NonincreasingSequences, CountIsMultisetNumber) {
  std::vector<Rational> grid{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  EXPECT_EQ(nonincreasing_sequences(grid, 2).size(), 15U);
  EXPECT_EQ(nonincreasing_sequences(grid, 3).size(), 35U);
  EXPECT_EQ(nonincreasing_sequences(grid, 4).size(), 70U);
}
