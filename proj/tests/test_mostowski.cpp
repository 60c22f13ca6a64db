#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "choiceless/mostowski.hpp"

using namespace choiceless;
using namespace choiceless::mostowski;

namespace {

Atom q(const char* text) { return parse_atom(text); }

std::vector<Atom> atoms(std::initializer_list<const char*> texts) {
  std::vector<Atom> out;
  for (const char* t : texts) out.push_back(q(t));
  return out;
}

// Points that see every piece of a set supported inside `pool`: each atom,
// three points per gap, and points beyond both ends.
std::vector<Atom> probe_points(std::vector<Atom> pool) {
  std::sort(pool.begin(), pool.end());
  std::vector<Atom> out;
  if (pool.empty()) return {Atom(-1), Atom(0), Atom(1)};
  for (int k = 1; k <= 3; ++k) out.push_back(pool.front() - k);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.push_back(pool[i]);
    if (i + 1 < pool.size()) {
      const Atom width = pool[i + 1] - pool[i];
      for (int k = 1; k <= 3; ++k) out.push_back(pool[i] + width * k / 4);
    }
  }
  for (int k = 1; k <= 3; ++k) out.push_back(pool.back() + k);
  return out;
}

std::vector<bool> signature(const SymSet& x, const std::vector<Atom>& points) {
  std::vector<bool> out;
  for (const Atom& p : points) out.push_back(member(x, p));
  return out;
}

std::vector<std::vector<Atom>> subsets_up_to(const std::vector<Atom>& pool, std::size_t max_size) {
  std::vector<std::vector<Atom>> out;
  for (std::uint32_t mask = 0; mask < (1u << pool.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_size) continue;
    std::vector<Atom> s;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (mask >> i & 1u) s.push_back(pool[i]);
    }
    out.push_back(s);
  }
  return out;
}

// Every canonical set whose support is exactly `support`, from all raw
// patterns.
std::vector<SymSet> canonical_with_exact_support(const std::vector<Atom>& support) {
  std::vector<SymSet> out;
  const std::size_t len = 2 * support.size() + 1;
  for (std::uint32_t code = 0; code < (1u << len); ++code) {
    Bits bits(len);
    for (std::size_t i = 0; i < len; ++i) bits[i] = code >> (len - 1 - i) & 1u;
    SymSet x(support, bits);
    if (is_canonical(x)) out.push_back(x);
  }
  return out;
}

std::vector<SymSet> family(const std::vector<Atom>& pool, std::size_t max_support) {
  std::vector<SymSet> out;
  for (const auto& s : subsets_up_to(pool, max_support)) {
    for (const auto& x : canonical_with_exact_support(s)) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST(SymSetMembership, Examples) {
  SymSet below_zero({q("0")}, {1, 0, 0});
  EXPECT_TRUE(member(below_zero, q("-1")));
  EXPECT_FALSE(member(below_zero, q("0")));
  EXPECT_FALSE(member(below_zero, q("7/2")));
  EXPECT_THROW(SymSet({q("0")}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(SymSet(atoms({"1", "0"}), {1, 0, 0, 0, 0}), std::invalid_argument);
}

TEST(SymSetMembership, ConstantOnEveryGap) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::set<Atom> chosen;
    const std::size_t n = rng() % 6;
    while (chosen.size() < n) chosen.insert(Atom(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 3)));
    std::vector<Atom> support(chosen.begin(), chosen.end());
    Bits bits(2 * n + 1);
    for (auto& b : bits) b = rng() & 1u;
    SymSet x(support, bits);
    for (std::size_t g = 0; g <= n; ++g) {
      Atom lo = g == 0 ? (n ? support.front() - 10 : Atom(-10)) : support[g - 1];
      Atom hi = g == n ? (n ? support.back() + 10 : Atom(10)) : support[g];
      for (int k = 1; k <= 3; ++k) {
        EXPECT_EQ(member(x, lo + (hi - lo) * k / 4), static_cast<bool>(bits[2 * g]));
      }
    }
  }
}

TEST(Canonicalize, Examples) {
  SymSet everything(atoms({"1", "2"}), {1, 1, 1, 1, 1});
  EXPECT_EQ(canonicalize(everything), SymSet::all());
  SymSet padded(atoms({"0", "5"}), {1, 0, 0, 0, 0});
  EXPECT_EQ(canonicalize(padded), SymSet({q("0")}, {1, 0, 0}));
  for (const Atom& p : probe_points(atoms({"0", "5"}))) EXPECT_EQ(member(padded, p), member(canonicalize(padded), p));
  SymSet canonical({q("0")}, {1, 0, 0});
  EXPECT_EQ(canonicalize(canonical), canonical);
}

TEST(Canonicalize, PreservesMembershipAndIsIdempotent) {
  const auto pool = atoms({"-2", "0", "1/3", "1", "4"});
  const auto points = probe_points(pool);
  for (const auto& s : subsets_up_to(pool, 5)) {
    const std::size_t len = 2 * s.size() + 1;
    for (std::uint32_t code = 0; code < (1u << len); ++code) {
      Bits bits(len);
      for (std::size_t i = 0; i < len; ++i) bits[i] = code >> i & 1u;
      SymSet x(s, bits);
      SymSet c = canonicalize(x);
      ASSERT_EQ(signature(x, points), signature(c, points));
      ASSERT_EQ(canonicalize(c), c);
      ASSERT_TRUE(is_canonical(c));
    }
  }
}

TEST(Canonicalize, LeastSupportIsMinimalAmongSupports) {
  // A set supported by E is supported by every superset; the canonical
  // support must be contained in each raw support that describes it.
  const auto pool = atoms({"0", "1", "2", "3"});
  const auto points = probe_points(pool);
  std::map<std::vector<bool>, std::vector<std::vector<Atom>>> supports_by_set;
  for (const auto& s : subsets_up_to(pool, 4)) {
    const std::size_t len = 2 * s.size() + 1;
    for (std::uint32_t code = 0; code < (1u << len); ++code) {
      Bits bits(len);
      for (std::size_t i = 0; i < len; ++i) bits[i] = code >> i & 1u;
      supports_by_set[signature(SymSet(s, bits), points)].push_back(s);
    }
  }
  for (const auto& [sig, supports] : supports_by_set) {
    // Find the smallest support describing this set and check containment.
    auto smallest = *std::min_element(supports.begin(), supports.end(),
                                      [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (const auto& s : supports) {
      EXPECT_TRUE(std::includes(s.begin(), s.end(), smallest.begin(), smallest.end()));
    }
  }
}

TEST(Enumeration, CountsAndDistinctness) {
  const auto pool = atoms({"-1", "0", "1/2", "3", "7", "8"});
  for (std::size_t m = 0; m <= 6; ++m) {
    std::vector<Atom> e(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    auto list = enumerate_with_support(e);
    ASSERT_EQ(list.size(), std::size_t{1} << (2 * m + 1));
    const auto points = probe_points(e);
    std::set<std::vector<bool>> seen;
    for (const auto& x : list) seen.insert(signature(x, points));
    EXPECT_EQ(seen.size(), list.size());
    for (std::size_t i = 0; i < list.size(); ++i) ASSERT_EQ(rank(list[i], e), i);
  }
  EXPECT_EQ(enumerate_with_support({q("5")}).size(), 8u);
}

TEST(Enumeration, OrderIsColexThenPatternCode) {
  const auto e = atoms({"0", "1", "2", "3"});
  auto list = enumerate_with_support(e);
  auto colex_key = [&](const SymSet& x) {
    unsigned key = 0;
    for (const auto& a : x.support()) key |= 1u << (std::find(e.begin(), e.end(), a) - e.begin());
    return key;
  };
  auto code = [](const SymSet& x) {
    unsigned v = 0;
    for (auto b : x.pattern()) v = v * 2 + b;
    return v;
  };
  std::vector<SymSet> expected;
  for (const auto& s : subsets_up_to(e, 4)) {
    for (const auto& x : canonical_with_exact_support(s)) expected.push_back(x);
  }
  std::sort(expected.begin(), expected.end(), [&](const SymSet& a, const SymSet& b) {
    if (colex_key(a) != colex_key(b)) return colex_key(a) < colex_key(b);
    return code(a) < code(b);
  });
  EXPECT_EQ(list, expected);
}

TEST(Enumeration, EmptyAndFullSetRanks) {
  for (const auto& e : {atoms({}), atoms({"3"}), atoms({"0", "5", "9"})}) {
    EXPECT_EQ(rank(SymSet::empty(), e), 0);
    EXPECT_EQ(rank(SymSet::all(), e), 1);
  }
  EXPECT_THROW(rank(SymSet({q("4")}, {0, 1, 0}), atoms({"3"})), std::invalid_argument);
}

TEST(Enumeration, CoherentUnderLargerAtomExtension) {
  const auto pool = atoms({"-5", "-1", "0", "2/3", "6"});
  for (std::size_t m1 = 0; m1 <= 5; ++m1) {
    std::vector<Atom> e1(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m1));
    for (std::size_t m2 = m1; m2 <= 5; ++m2) {
      std::vector<Atom> e2(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m2));
      for (const auto& x : enumerate_with_support(e1)) ASSERT_EQ(rank(x, e1), rank(x, e2));
    }
  }
  for (const auto& x : enumerate_with_support({q("0")})) EXPECT_EQ(rank(x, {q("0")}), rank(x, atoms({"0", "5"})));
}

TEST(Enumeration, ExtensionBelowTheMaximumIsNotCoherent) {
  // Coherence is only claimed for extensions above max(E); adding a smaller
  // atom shifts ranks.
  SymSet x({q("5")}, {1, 0, 0});
  EXPECT_NE(rank(x, {q("5")}), rank(x, atoms({"0", "5"})));
}

TEST(PatternRank, RoundTripsAndCounts) {
  for (std::size_t n = 0; n <= 6; ++n) {
    std::vector<Atom> s;
    for (std::size_t i = 0; i < n; ++i) s.emplace_back(static_cast<long>(i));
    auto sets = canonical_with_exact_support(s);
    ASSERT_EQ(BigNat(sets.size()), count_exact_support(n));
    for (std::size_t l = 0; l < sets.size(); ++l) {
      ASSERT_EQ(pattern_rank(sets[l].pattern()), l);
      ASSERT_EQ(pattern_unrank(n, l), sets[l].pattern());
    }
  }
  EXPECT_THROW(pattern_rank({1, 1, 1}), std::invalid_argument);
}

TEST(FinMap, Examples) {
  EXPECT_EQ(fin_map({}), SymSet::empty());
  EXPECT_EQ(fin_map({q("4")}), SymSet::all());
  SymSet below_zero({q("0")}, {1, 0, 0});
  const BigNat r = rank(below_zero, {q("0")});
  std::vector<Atom> e = fin_preimage(below_zero);
  EXPECT_EQ(BigNat(e.size()), r);
  EXPECT_EQ(e.front(), q("0"));
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GT(e[i], q("0"));
  EXPECT_EQ(fin_map(e), below_zero);
}

TEST(FinMap, OntoTheFragment) {
  const auto pool = atoms({"-3", "-1", "0", "1/2", "2", "10"});
  std::size_t checked = 0;
  for (const auto& x : family(pool, 3)) {
    auto e = fin_preimage(x);
    ASSERT_EQ(fin_map(e), x);
    ++checked;
  }
  // 2 + 6*6 + 15*18 + 20*54
  EXPECT_EQ(checked, 2u + 36 + 270 + 1080);
}

TEST(SeqBound, ExactComparison) {
  for (std::size_t n = 12; n <= 64; ++n) EXPECT_TRUE(seq_bound_holds(n)) << n;
  EXPECT_TRUE(check_seq_bound(12, 64).ok);
  // The bound already holds at 11 (2^24 = 16777216 < 11! = 39916800); 10 is
  // the largest failure.
  EXPECT_TRUE(seq_bound_holds(11));
  EXPECT_FALSE(seq_bound_holds(10));
  EXPECT_EQ(check_seq_bound(12, 64).details["least_n_from_which_bound_holds"], 11);
}

TEST(SeqA, Examples) {
  const auto a24 = default_a24();
  std::vector<Atom> descending(a24.rbegin(), a24.rend());
  EXPECT_EQ(seq_a(SymSet::empty()), descending);
  std::vector<Atom> second_last = descending;
  std::swap(second_last[22], second_last[23]);
  EXPECT_EQ(seq_a(SymSet::all()), second_last);
  EXPECT_EQ(nth_permutation(a24, factorial(24) - 2), second_last);
  EXPECT_THROW(seq_a(SymSet::empty(), atoms({"0", "1"})), std::invalid_argument);
}

TEST(SeqA, PermutationUnrankMatchesNextPermutation) {
  std::vector<Atom> items = atoms({"0", "1", "2", "3", "4"});
  std::vector<Atom> walk = items;
  for (unsigned i = 0; i < 120; ++i) {
    EXPECT_EQ(nth_permutation(items, i), walk);
    std::next_permutation(walk.begin(), walk.end());
  }
}

TEST(SeqA, InjectiveOnTheExhaustiveFamily) {
  const auto pool = atoms({"-3", "-1", "1/2", "51/2", "30", "100"});
  std::set<std::vector<Atom>> outputs;
  auto fam = family(pool, 3);
  for (const auto& y : fam) {
    auto s = seq_a(y);
    ASSERT_EQ(std::set<Atom>(s.begin(), s.end()).size(), s.size());
    ASSERT_TRUE(outputs.insert(s).second);
  }
  EXPECT_EQ(outputs.size(), fam.size());
}

TEST(SeqA, LargeSupportsUseTheirOwnPermutations) {
  std::vector<Atom> support;
  for (int i = 0; i < 13; ++i) support.emplace_back(100 + i);
  std::set<std::vector<Atom>> outputs;
  for (unsigned l = 0; l < 50; ++l) {
    SymSet y(support, pattern_unrank(13, l));
    auto s = seq_a(y);
    EXPECT_EQ(s, nth_permutation(support, l));
    outputs.insert(s);
  }
  // A 13-atom D from a small support never meets these low indices.
  std::vector<Atom> eleven;
  for (int i = 0; i < 11; ++i) eleven.emplace_back(i);
  SymSet small(eleven, pattern_unrank(11, 0));
  outputs.insert(seq_a(small));
  EXPECT_EQ(outputs.size(), 51u);
}

TEST(Automorphism, Examples) {
  SymSet x({q("0")}, {1, 0, 0});
  EXPECT_EQ(apply_automorphism(PLAutomorphism{}, x), x);
  auto shift = PLAutomorphism::translation(Atom(1));
  EXPECT_EQ(apply_automorphism(shift, x), SymSet({q("1")}, {1, 0, 0}));
  for (const Atom& p : probe_points(atoms({"0", "1"}))) {
    EXPECT_EQ(member(apply_automorphism(shift, x), shift(p)), member(x, p));
  }
  EXPECT_THROW(PLAutomorphism({Piece{Atom(0), Atom(-1), Atom(0)}}), std::invalid_argument);
  EXPECT_THROW(PLAutomorphism({Piece{Atom(0), Atom(1), Atom(0)}, Piece{Atom(1), Atom(2), Atom(0)}}),
               std::invalid_argument);
}

TEST(Automorphism, SeparatingExamples) {
  auto pi = separating_automorphism(atoms({"0", "10"}), q("3"), q("7"));
  EXPECT_EQ(pi(q("0")), q("0"));
  EXPECT_EQ(pi(q("10")), q("10"));
  EXPECT_EQ(pi(q("3")), q("7"));
  EXPECT_EQ(pi(q("-4")), q("-4"));
  EXPECT_EQ(pi(q("12")), q("12"));
  auto t = separating_automorphism({}, q("0"), q("100"));
  EXPECT_EQ(t(q("0")), q("100"));
  EXPECT_EQ(t(q("-5")), q("95"));
  EXPECT_THROW(separating_automorphism({q("5")}, q("3"), q("7")), std::invalid_argument);
  EXPECT_THROW(separating_automorphism({q("5")}, q("5"), q("7")), std::invalid_argument);
  auto left = separating_automorphism({q("5")}, q("-3"), q("4"));
  EXPECT_EQ(left(q("-3")), q("4"));
  EXPECT_EQ(left(q("5")), q("5"));
  auto right = separating_automorphism({q("5")}, q("30"), q("6"));
  EXPECT_EQ(right(q("30")), q("6"));
  EXPECT_EQ(right(q("5")), q("5"));
}

TEST(Automorphism, RandomEquivarianceAndMonotonicity) {
  std::mt19937_64 rng(17);
  auto random_atom = [&] { return Atom(static_cast<long>(rng() % 201) - 100, 1 + static_cast<long>(rng() % 4)); };
  for (int trial = 0; trial < 300; ++trial) {
    std::set<Atom> e_set;
    while (e_set.size() < rng() % 4) e_set.insert(random_atom());
    std::vector<Atom> e(e_set.begin(), e_set.end());
    Atom c = random_atom(), b = random_atom();
    PLAutomorphism pi;
    try {
      pi = separating_automorphism(e, c, b);
    } catch (const std::invalid_argument&) {
      continue;
    }
    EXPECT_EQ(pi(c), b);
    for (const Atom& a : e) EXPECT_EQ(pi(a), a);
    std::set<Atom> support_set;
    while (support_set.size() < rng() % 5) support_set.insert(random_atom());
    Bits bits(2 * support_set.size() + 1);
    for (auto& bit : bits) bit = rng() & 1u;
    SymSet x(std::vector<Atom>(support_set.begin(), support_set.end()), bits);
    SymSet image = apply_automorphism(pi, x);
    for (int k = 0; k < 20; ++k) {
      Atom p = random_atom();
      Atom p2 = random_atom();
      EXPECT_EQ(member(image, pi(p)), member(x, p));
      EXPECT_EQ(pi.inverse(pi(p)), p);
      if (p < p2) EXPECT_LT(pi(p), pi(p2));
    }
  }
}

TEST(Automorphism, FixingTheSupportFixesTheSetAndMovingAGapPointDoesNot) {
  const auto pool = atoms({"0", "10", "20"});
  for (const auto& x : family(pool, 3)) {
    // Fixing supp(x) pointwise fixes x.
    auto pi = separating_automorphism(x.support(), q("25"), q("30"));
    EXPECT_EQ(apply_automorphism(pi, x), x);
  }
  // "Otherwise" argument: with c in x, b outside x and E, and both in one gap
  // of E = {0, 10} where x is not constant, pi(x) != x.
  SymSet x(atoms({"0", "5", "10"}), {0, 0, 1, 1, 0, 0, 0});  // (0, 5] inside
  const auto e = atoms({"0", "10"});
  const Atom c = q("3"), b = q("7");
  ASSERT_TRUE(member(x, c));
  ASSERT_FALSE(member(x, b));
  auto pi = separating_automorphism(e, c, b);
  EXPECT_NE(apply_automorphism(pi, x), x);
}

TEST(Cofinite, Examples) {
  CofinSet finite{{q("1"), q("2")}, false};
  auto d = cofinite_decompose(std::vector<CofinSet>{finite});
  EXPECT_EQ(d.flags, std::vector<bool>{false});
  EXPECT_EQ(d.finite.size(), 2u);
  CofinSet co{{q("1")}, true};
  auto d2 = cofinite_decompose(std::vector<CofinSet>{co});
  EXPECT_EQ(d2.flags, std::vector<bool>{true});
  EXPECT_EQ(d2.finite, (std::set<std::pair<std::size_t, Atom>>{{0, q("1")}}));
  auto d3 = cofinite_decompose(std::vector<CofinSet>{CofinSet{{q("1")}, false}, CofinSet{{q("2")}, true}});
  EXPECT_EQ(d3.flags, (std::vector<bool>{false, true}));
  EXPECT_EQ(d3.finite, (std::set<std::pair<std::size_t, Atom>>{{0, q("1")}, {1, q("2")}}));
  EXPECT_THROW(to_cofin(SymSet({q("0")}, {1, 0, 0})), std::invalid_argument);
  EXPECT_TRUE(to_cofin(SymSet({q("0")}, {1, 0, 1})).cofinite);
}

TEST(Cofinite, RoundTripsOverAnEightAtomPool) {
  std::vector<Atom> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back(i);
  std::vector<CofinSet> rows_pool;
  for (const auto& s : subsets_up_to(pool, 2)) {
    for (bool flag : {false, true}) rows_pool.push_back(CofinSet{std::set<Atom>(s.begin(), s.end()), flag});
  }
  std::function<void(std::vector<CofinSet>&, std::size_t)> rec = [&](std::vector<CofinSet>& rows, std::size_t k) {
    if (rows.size() == k) {
      auto back = cofinite_compose(cofinite_decompose(rows));
      ASSERT_EQ(back.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ASSERT_EQ(back[i].core, rows[i].core);
        ASSERT_EQ(back[i].cofinite, rows[i].cofinite);
        for (const Atom& a : pool) ASSERT_EQ(back[i].contains(a), rows[i].contains(a));
      }
      return;
    }
    for (const auto& r : rows_pool) {
      rows.push_back(r);
      rec(rows, k);
      rows.pop_back();
    }
  };
  for (std::size_t k = 1; k <= 2; ++k) {
    std::vector<CofinSet> rows;
    rec(rows, k);
  }
  // k = 3 over the full pool is 74^3 rows; sample it.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<CofinSet> rows;
    for (int i = 0; i < 3; ++i) rows.push_back(rows_pool[rng() % rows_pool.size()]);
    auto back = cofinite_compose(cofinite_decompose(rows));
    for (std::size_t i = 0; i < 3; ++i) {
      ASSERT_EQ(back[i].core, rows[i].core);
      ASSERT_EQ(back[i].cofinite, rows[i].cofinite);
    }
  }
}

TEST(Json, SymSetAndAutomorphismRoundTrip) {
  SymSet x(atoms({"-1/2", "3"}), {0, 1, 1, 0, 0});
  EXPECT_EQ(to_json(x).dump(), R"({"support":["-1/2","3"],"pattern":"01100"})");
  EXPECT_EQ(symset_from_json(to_json(x)), x);
  auto pi = separating_automorphism(atoms({"0", "10"}), q("3"), q("7"));
  auto back = automorphism_from_json(to_json(pi));
  for (int k = -5; k < 15; ++k) EXPECT_EQ(back(Atom(k)), pi(Atom(k)));
  EXPECT_THROW(parse_atom("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_atom("x"), std::invalid_argument);
  EXPECT_EQ(parse_atom("-6/4"), Atom(-3, 2));
}
