#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <vector>

#include "choiceless/starcount.hpp"

using namespace choiceless;
using namespace choiceless::starcount;

namespace {

// Counts injective sequences over {0..n-1} by explicit enumeration.
std::size_t enumerate_injective(std::size_t n) {
  std::vector<bool> used(n, false);
  std::size_t count = 0;
  std::function<void()> rec = [&]() {
    ++count;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      rec();
      used[v] = false;
    }
  };
  rec();
  return count;
}

// T(n) summed with the outer index i and the factorial quotient formed
// directly.
BigNat t_by_columns(std::size_t n) {
  const BigNat nf = factorial(n);
  BigNat total = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 0; j < i; ++j) total += nf / (BigNat(i) * factorial(j));
  }
  return total;
}

}  // namespace

TEST(Star, KnownValues) {
  EXPECT_EQ(star(0), 1);
  EXPECT_EQ(star(1), 2);
  EXPECT_EQ(star(2), 5);
  EXPECT_EQ(star(3), 16);
  EXPECT_EQ(star(16), BigNat("56874039553217"));
}

TEST(Star, BruteForceEnumeration) {
  EXPECT_EQ(enumerate_injective(4), 65u);
  for (std::size_t n = 0; n <= 7; ++n) EXPECT_EQ(star(n), enumerate_injective(n)) << n;
}

TEST(Star, RecurrenceAgreesWithFactorialSum) {
  auto table = star_table(300);
  for (std::size_t n = 0; n <= 300; ++n) {
    BigNat direct = 0;
    for (std::size_t i = 0; i <= n; ++i) direct += factorial(n) / factorial(i);
    ASSERT_EQ(table[n], direct) << n;
    ASSERT_EQ(star_by_sum(n), direct) << n;
    if (n > 0) ASSERT_EQ(table[n], BigNat(n) * table[n - 1] + 1);
  }
  EXPECT_EQ(star(300), table[300]);
}

TEST(StarMod, Examples) {
  EXPECT_EQ(star_mod(3, 16), 0);
  EXPECT_EQ(star_mod(0, 2), 1);
  EXPECT_EQ(star_mod(19, 16), 0);
  EXPECT_EQ(star(19) % 16, 0);
  EXPECT_THROW(star_mod(5, 12), std::invalid_argument);
  EXPECT_THROW(star_mod(5, 1), std::invalid_argument);
  EXPECT_THROW(star_mod(5, 0), std::invalid_argument);
}

TEST(StarMod, MatchesExactResidues) {
  auto table = star_table(2000);
  for (std::size_t n = 0; n <= 2000; ++n) {
    for (std::size_t r = 1; r <= 16; ++r) {
      ASSERT_EQ(star_mod(n, pow2(r)), table[n] % pow2(r)) << n << " " << r;
    }
  }
  for (std::size_t n : {0u, 50u, 200u, 999u}) {
    EXPECT_EQ(star_mod(n, pow2(64)), table[n] % pow2(64));
    EXPECT_EQ(star_mod(n, pow2(100)), table[n] % pow2(100));
  }
}

TEST(Parity, EvenIffStarOdd) {
  EXPECT_TRUE(check_parity_law(10000).ok);
  auto table = star_table(500);
  for (std::size_t n = 0; n <= 500; ++n) EXPECT_EQ(n % 2 == 0, table[n] % 2 == 1);
}

TEST(Divisibility, PremiseSetsFromExactValues) {
  auto table = star_table(200);
  for (unsigned r = 1; r <= 4; ++r) {
    Report report = check_divisibility_lemma(r, 100);
    EXPECT_TRUE(report.ok) << report.to_json().dump();
    std::vector<std::size_t> expected;
    for (std::size_t n = 0; n <= 100; ++n) {
      if (table[n] % pow2(r) == 0) expected.push_back(n);
    }
    EXPECT_EQ(report.details["premise_holds_at"].get<std::vector<std::size_t>>(), expected) << r;
  }
  EXPECT_EQ(check_divisibility_lemma(4, 100).details["premise_holds_at"].get<std::vector<std::size_t>>(),
            (std::vector<std::size_t>{3, 19, 35, 51, 67, 83, 99}));
  EXPECT_EQ(check_divisibility_lemma(4, 3).details["premise_holds_at"].get<std::vector<std::size_t>>(),
            (std::vector<std::size_t>{3}));
  auto odd = check_divisibility_lemma(1, 50).details["premise_holds_at"].get<std::vector<std::size_t>>();
  EXPECT_EQ(odd.size(), 25u);
  for (auto n : odd) EXPECT_EQ(n % 2, 1u);
}

TEST(Divisibility, NoCounterexamplesUpToTenThousand) {
  for (unsigned r = 1; r <= 4; ++r) EXPECT_TRUE(check_divisibility_lemma(r, 10000).ok) << r;
  EXPECT_THROW(check_divisibility_lemma(5, 10), std::invalid_argument);
  EXPECT_THROW(check_divisibility_lemma(0, 10), std::invalid_argument);
}

TEST(Identity2, TAgreesWithColumnSummation) {
  for (std::size_t n = 2; n <= 30; ++n) EXPECT_EQ(t_value(n), t_by_columns(n)) << n;
}

TEST(Identity2, Examples) {
  EXPECT_TRUE(check_identity_2(3, 4).ok);
  EXPECT_TRUE(check_identity_2(5, 2).ok);
  // Direct evaluation of the n = 3, k = 4 case.
  const BigNat mod = 32;
  EXPECT_EQ(star(19) % mod, (16 * t_by_columns(3) + star(3)) % mod);
  EXPECT_THROW(check_identity_2(1, 4), std::invalid_argument);
  EXPECT_THROW(check_identity_2(3, 1), std::invalid_argument);
}

TEST(Identity2, HoldsOnTheFullGrid) {
  Report report = check_identity_2_range(50, 8);
  EXPECT_TRUE(report.ok) << report.to_json().dump();
  EXPECT_EQ(report.details["cases"], 49 * 7);
}

TEST(TParity, SmallCases) {
  Report five = check_t_parity(5);
  EXPECT_TRUE(five.ok);
  EXPECT_EQ(five.details["partial_sum_parities"].get<std::vector<int>>(), (std::vector<int>{0, 0, 1, 1, 1}));
  EXPECT_TRUE(check_t_parity(3).ok);
  EXPECT_TRUE(check_t_parity(7).ok);
  for (std::size_t n : {3u, 5u, 7u}) EXPECT_EQ(t_by_columns(n) % 2, 1);
  EXPECT_THROW(check_t_parity(4), std::invalid_argument);
  EXPECT_THROW(check_t_parity(1), std::invalid_argument);
}

TEST(TParity, OddUpToFortyNine) {
  EXPECT_TRUE(check_t_parity_range(49).ok);
  for (std::size_t n = 3; n <= 49; n += 2) EXPECT_EQ(t_by_columns(n) % 2, 1) << n;
}

TEST(ScanPow2, SmallRanges) {
  EXPECT_EQ(scan_pow2(100), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(scan_pow2(3), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(scan_pow2(2), (std::vector<std::size_t>{0, 1}));
}

TEST(ScanPow2, ResidueFilterAgreesWithExactScan) {
  EXPECT_EQ(scan_pow2(2500), scan_pow2_exhaustive(2500));
}

TEST(ScanPow2, OneMillion) { EXPECT_EQ(scan_pow2(1000000), (std::vector<std::size_t>{0, 1, 3})); }

TEST(StarGap, Examples) {
  Report three = check_star_gap_range(3, 2000);
  EXPECT_TRUE(three.ok);
  EXPECT_EQ(three.details["outcome"], "vacuous");
  Report one = check_star_gap(1, 2);
  EXPECT_TRUE(one.ok);
  EXPECT_EQ(one.details["outcome"], "confirmed");
  EXPECT_EQ(star(3), 16);
  Report zero = check_star_gap(0, 1);
  EXPECT_TRUE(zero.ok);
  EXPECT_EQ(zero.details["outcome"], "confirmed");
  EXPECT_THROW(check_star_gap(2, 1), std::invalid_argument);
}

TEST(StarGap, RangesFromEveryPowerOfTwoStart) {
  for (std::size_t n : {0u, 1u, 3u}) {
    Report report = check_star_gap_range(n, 300);
    EXPECT_TRUE(report.ok) << report.to_json().dump();
  }
  // From 0 the later hits 1* = 2 and 3* = 16 satisfy 1 | t.
  EXPECT_EQ(check_star_gap_range(0, 50).details["premise_holds_at"].get<std::vector<std::size_t>>(),
            (std::vector<std::size_t>{1, 3}));
}
