#include <gtest/gtest.h>

#include <random>

#include "dvino/sumsets.hpp"

using namespace dvino;

namespace {

ResidueSet make_set(u64 m, std::initializer_list<u64> xs) {
  std::vector<u64> v(xs);
  return residue_set(m, v);
}

ResidueSet random_set(u64 m, std::mt19937_64& rng, std::size_t min_size = 1) {
  std::uniform_int_distribution<u64> pick(0, m - 1);
  std::uniform_int_distribution<std::size_t> size(min_size, m);
  ResidueSet s(m);
  const std::size_t want = size(rng);
  while (s.count() < want) s.set(pick(rng));
  return s;
}

// direct enumeration of all tuples
std::vector<std::uint64_t> enumerate_counts(const std::vector<ResidueSet>& sets) {
  const u64 m = sets[0].size();
  std::vector<std::uint64_t> counts(m, 0);
  std::vector<std::vector<u64>> elems;
  for (const auto& s : sets) elems.push_back(elements(s));
  std::vector<std::size_t> idx(sets.size(), 0);
  for (;;) {
    u64 sum = 0;
    for (std::size_t j = 0; j < sets.size(); ++j) sum += elems[j][idx[j]];
    ++counts[sum % m];
    std::size_t j = 0;
    while (j < sets.size() && ++idx[j] == elems[j].size()) idx[j++] = 0;
    if (j == sets.size()) break;
  }
  return counts;
}

}  // namespace

TEST(Sumset, Examples) {
  std::vector<ResidueSet> a{make_set(7, {1, 2}), make_set(7, {3, 4})};
  EXPECT_EQ(elements(sumset(a)), (std::vector<u64>{4, 5, 6}));
  for (u64 m : {1u, 6u, 11u}) {
    std::vector<ResidueSet> z{make_set(m, {0}), make_set(m, {0})};
    EXPECT_EQ(elements(sumset(z)), (std::vector<u64>{0}));
  }
  std::vector<ResidueSet> four(4, make_set(5, {1, 2}));
  EXPECT_EQ(sumset(four).count(), 5u);
  std::vector<ResidueSet> with_empty{make_set(5, {1}), ResidueSet(5)};
  try {
    sumset(with_empty);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySet);
  }
}

TEST(Sumset, MatchesEnumerationAndIsSymmetric) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const u64 m = 1 + rng() % 40;
    const std::size_t k = 2 + rng() % 3;
    std::vector<ResidueSet> sets;
    for (std::size_t j = 0; j < k; ++j) sets.push_back(random_set(m, rng));
    ResidueSet s = sumset(sets);
    auto counts = enumerate_counts(sets);
    for (u64 r = 0; r < m; ++r) EXPECT_EQ(s.test(r), counts[r] > 0);
    std::size_t largest = 0;
    for (const auto& x : sets) largest = std::max(largest, x.count());
    EXPECT_GE(s.count(), largest);
    std::vector<ResidueSet> rev(sets.rbegin(), sets.rend());
    EXPECT_EQ(sumset(rev), s);
    // associativity: (A + B) + rest
    std::vector<ResidueSet> head{sets[0], sets[1]};
    std::vector<ResidueSet> grouped{sumset(head)};
    grouped.insert(grouped.end(), sets.begin() + 2, sets.end());
    EXPECT_EQ(grouped.size() == 1 ? grouped[0] : sumset(grouped), s);
  }
}

TEST(CauchyDavenport, Examples) {
  std::vector<ResidueSet> a{make_set(7, {1, 2}), make_set(7, {3, 4})};
  auto r = cauchy_davenport_check(7, a);
  EXPECT_EQ(r.lhs, 3u);
  EXPECT_EQ(r.rhs, 3u);
  EXPECT_TRUE(r.holds);
  std::vector<ResidueSet> four(4, make_set(5, {1, 2}));
  r = cauchy_davenport_check(5, four);
  EXPECT_EQ(r.lhs, 5u);
  EXPECT_EQ(r.rhs, 5u);
  std::vector<ResidueSet> ones(2, make_set(3, {1}));
  r = cauchy_davenport_check(3, ones);
  EXPECT_EQ(r.lhs, 1u);
  EXPECT_EQ(r.rhs, 1u);
  EXPECT_TRUE(r.holds);
  std::vector<ResidueSet> comp(2, make_set(6, {1}));
  try {
    cauchy_davenport_check(6, comp);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPrime);
  }
}

TEST(CauchyDavenport, RandomPrimes) {
  std::mt19937_64 rng(101);
  const std::vector<u64> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};
  for (int t = 0; t < 1000; ++t) {
    const u64 p = primes[rng() % primes.size()];
    const std::size_t k = 2 + rng() % 4;
    std::vector<ResidueSet> sets;
    for (std::size_t j = 0; j < k; ++j) sets.push_back(random_set(p, rng));
    EXPECT_TRUE(cauchy_davenport_check(p, sets).holds);
  }
}

TEST(RepresentationCounts, Examples) {
  std::vector<ResidueSet> full(2, ResidueSet(5).set());
  for (std::int64_t n = 0; n < 5; ++n) EXPECT_EQ(count_representations_modN(full, n), 5);
  std::vector<ResidueSet> a{make_set(7, {1, 2}), make_set(7, {3, 4})};
  EXPECT_EQ(count_representations_modN(a, 5), 2);
  EXPECT_EQ(count_representations_modN(a, 12), 2);
  EXPECT_EQ(count_representations_modN(a, 0), 0);
}

TEST(RepresentationCounts, MatchEnumeration) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const u64 m = 1 + rng() % 31;
    std::size_t k = 1 + rng() % 4;
    while (k > 1 && std::pow(static_cast<double>(m), static_cast<double>(k)) > 1e6) --k;
    std::vector<ResidueSet> sets;
    for (std::size_t j = 0; j < k; ++j) sets.push_back(random_set(m, rng));
    auto expect = enumerate_counts(sets);
    auto got = representation_counts_modN(sets);
    for (u64 r = 0; r < m; ++r) EXPECT_EQ(got[r], expect[r]);
  }
  // long inputs take the transform path
  for (int t = 0; t < 5; ++t) {
    const u64 m = 97;
    std::vector<ResidueSet> sets;
    for (int j = 0; j < 3; ++j) sets.push_back(random_set(m, rng, 60));
    auto expect = enumerate_counts(sets);
    auto got = representation_counts_modN(sets);
    for (u64 r = 0; r < m; ++r) EXPECT_EQ(got[r], expect[r]);
  }
}

TEST(Varnavides, Examples) {
  std::vector<Rational> th{Rational(3, 5), Rational(3, 5)};
  auto v = varnavides_bound(th, 53);
  EXPECT_EQ(v.theta, Rational(1, 5));
  EXPECT_EQ(v.min_N, 51u);
  EXPECT_EQ(v.bound, BigRational(53, 5));
  try {
    varnavides_bound(th, 50);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisUnmet);
  }
  EXPECT_THROW(varnavides_bound(th, 11), Error);
  std::vector<Rational> one{Rational(1, 2), Rational(1, 2)};
  EXPECT_THROW(varnavides_bound(one, 1000), Error);
  std::vector<Rational> three{Rational(1, 2), Rational(1, 2), Rational(1, 2)};
  auto w = varnavides_bound(three, 200);
  EXPECT_EQ(w.theta, Rational(1, 8));  // (3/2 - 1)/4
  EXPECT_EQ(w.bound, BigRational(1, 512) * BigRational(40000));
}

TEST(Varnavides, HoldsOnRandomSets) {
  std::mt19937_64 rng(43);
  const std::vector<u64> primes{53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
  for (int t = 0; t < 40; ++t) {
    std::vector<Rational> th{Rational(3, 5), Rational(7, 10)};
    const u64 N = primes[rng() % primes.size()];
    auto v = varnavides_bound(th, N);
    std::vector<ResidueSet> sets;
    for (const auto& x : th) {
      const auto need = static_cast<std::size_t>((x * Rational(static_cast<std::int64_t>(N))).ceil());
      ResidueSet s(N);
      while (s.count() < need) s.set(rng() % N);
      sets.push_back(s);
    }
    auto counts = representation_counts_modN(sets);
    for (const auto& c : counts) EXPECT_GE(BigRational(c), v.bound);
  }
}
