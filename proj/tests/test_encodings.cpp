#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "choiceless/encodings.hpp"

using namespace choiceless;
using namespace choiceless::encodings;
using ordinals::Ordinal;
using ordinals::parse_ordinal;

namespace {

// Visit every list with entries < bound and length <= max_length.
void for_each_list(unsigned bound, std::size_t max_length,
                   const std::function<void(const std::vector<BigNat>&)>& visit) {
  std::vector<BigNat> current;
  std::function<void()> rec = [&]() {
    visit(current);
    if (current.size() == max_length) return;
    for (unsigned v = 0; v < bound; ++v) {
      current.push_back(v);
      rec();
      current.pop_back();
    }
  };
  rec();
}

// Brute-force inverse of inj_reduce: search for the injective sequence of the
// same length whose reduction is b.
std::vector<BigNat> brute_expand(const std::vector<BigNat>& b) {
  std::vector<BigNat> out;
  for (const BigNat& target : b) {
    for (BigNat candidate = 0;; ++candidate) {
      if (std::find(out.begin(), out.end(), candidate) != out.end()) continue;
      BigNat free_below = 0;
      for (BigNat v = 0; v < candidate; ++v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) ++free_below;
      }
      if (free_below == target) {
        out.push_back(candidate);
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST(FinCodec, Examples) {
  EXPECT_TRUE(fin_decode(0).empty());
  EXPECT_EQ(fin_decode(5), (FinSetCode{0, 2}));
  EXPECT_EQ(fin_encode({1, 3}), 10);
  EXPECT_THROW(fin_encode({3, 1}), std::invalid_argument);
}

TEST(FinCodec, MatchesBitEnumerationAndRoundTrips) {
  for (unsigned n = 0; n < 100000; ++n) {
    FinSetCode expected;
    for (unsigned bit = 0; bit < 32; ++bit) {
      if (n >> bit & 1u) expected.push_back(bit);
    }
    FinSetCode decoded = fin_decode(n);
    ASSERT_EQ(decoded, expected);
    unsigned sum = 0;
    for (auto e : decoded) sum += 1u << e;
    ASSERT_EQ(sum, n);
    ASSERT_EQ(fin_encode(decoded), n);
  }
}

TEST(FinCodec, DecodeOfEncodeOnSmallSets) {
  // All subsets of {0..39} with at most 4 elements.
  std::size_t count = 0;
  FinSetCode s;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    ASSERT_EQ(fin_decode(fin_encode(s)), s);
    ++count;
    if (s.size() == 4) return;
    for (std::size_t v = from; v < 40; ++v) {
      s.push_back(v);
      rec(v + 1);
      s.pop_back();
    }
  };
  rec(0);
  EXPECT_EQ(count, 1u + 40 + 780 + 9880 + 91390);
}

TEST(SeqCodec, Examples) {
  EXPECT_EQ(seq_encode({}), 0);
  EXPECT_EQ(seq_encode({0}), 1);
  EXPECT_EQ(seq_decode(seq_encode({4, 4, 0})), (SeqCode{4, 4, 0}));
  // pair(1, 0) + 1 = 2, pair(0, 1) + 1 = 3.
  EXPECT_EQ(seq_encode({0, 0}), 2);
  EXPECT_EQ(seq_encode({1}), 3);
}

TEST(SeqCodec, PairingIsTheCantorDiagonalEnumeration) {
  // Walk the diagonals a + b = d, b increasing, and check the running count.
  BigNat expected = 0;
  for (unsigned d = 0; d < 200; ++d) {
    for (unsigned b = 0; b <= d; ++b) {
      ASSERT_EQ(pair(d - b, b), expected);
      auto [x, y] = unpair(expected);
      ASSERT_EQ(x, d - b);
      ASSERT_EQ(y, b);
      ++expected;
    }
  }
}

TEST(SeqCodec, RoundTrips) {
  for (unsigned n = 0; n < 100000; ++n) ASSERT_EQ(seq_encode(seq_decode(n)), n);
  for_each_list(40, 4, [](const std::vector<BigNat>& s) { ASSERT_EQ(seq_decode(seq_encode(s)), s); });
}

TEST(InjCodec, Examples) {
  EXPECT_EQ(inj_reduce({3, 0, 1}), (SeqCode{3, 0, 0}));
  EXPECT_EQ(inj_expand({3, 0, 0}), (InjSeqCode{3, 0, 1}));
  EXPECT_TRUE(inj_reduce({}).empty());
  try {
    inj_reduce({2, 5, 2, 5});
    FAIL() << "expected not_injective";
  } catch (const not_injective& e) {
    EXPECT_EQ(e.position, 2u);
    EXPECT_EQ(e.value, 2);
  }
}

TEST(InjCodec, ExpandAgreesWithBruteForceAndIsInverse) {
  for_each_list(8, 5, [](const std::vector<BigNat>& b) {
    auto a = inj_expand(b);
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(std::set<BigNat>(a.begin(), a.end()).size(), a.size());
    ASSERT_EQ(a, brute_expand(b));
    ASSERT_EQ(inj_reduce(a), b);
  });
}

TEST(InjCodec, RoundTrips) {
  for (unsigned n = 0; n < 100000; ++n) ASSERT_EQ(inj_encode(inj_decode(n)), n);
  for_each_list(40, 4, [](const std::vector<BigNat>& s) {
    if (std::set<BigNat>(s.begin(), s.end()).size() != s.size()) return;
    ASSERT_EQ(inj_decode(inj_encode(s)), s);
  });
}

TEST(Lift, IdentityRoutingAtOmega) {
  Carrier omega(parse_ordinal("w"));
  auto decoded = omega.fin_decode(parse_ordinal("5"));
  ASSERT_EQ(decoded.size(), 2u);
  EXPECT_EQ(decoded[0], parse_ordinal("0"));
  EXPECT_EQ(decoded[1], parse_ordinal("2"));
  for (unsigned n = 0; n < 200; ++n) {
    Ordinal beta = Ordinal::natural(n);
    EXPECT_EQ(omega.code(beta), n);
    std::vector<Ordinal> expected;
    for (auto e : fin_decode(n)) expected.push_back(Ordinal::natural(e));
    EXPECT_EQ(omega.fin_decode(beta), expected);
  }
}

TEST(Lift, ZeroAnchorAndFiniteRejection) {
  EXPECT_TRUE(Carrier(parse_ordinal("w*2")).fin_decode(Ordinal{}).empty());
  EXPECT_THROW(Carrier(parse_ordinal("5")), std::invalid_argument);
  EXPECT_THROW(Carrier(parse_ordinal("0")), std::invalid_argument);
  EXPECT_THROW(Carrier(parse_ordinal("w")).fin_decode(parse_ordinal("w")), std::out_of_range);
}

TEST(Lift, InjectiveSequencesBelowOmegaSquaredRoundTrip) {
  Carrier carrier(parse_ordinal("w^2"));
  std::set<std::string> images;
  for (unsigned k = 0; k < 1000; ++k) {
    Ordinal beta = carrier.element(k);
    ASSERT_TRUE(beta < carrier.alpha());
    auto seq = carrier.inj_decode(beta);
    for (const auto& x : seq) ASSERT_TRUE(x < carrier.alpha());
    ASSERT_EQ(carrier.inj_encode(seq), beta);
    std::string key;
    for (const auto& x : seq) key += ordinals::to_string(x) + ";";
    ASSERT_TRUE(images.insert(key).second);
  }
}

TEST(Lift, AllStructuresRoundTripOnSeveralCarriers) {
  for (const char* alpha_text : {"w*2", "w^w", "w^2*3 + 5"}) {
    Carrier carrier(parse_ordinal(alpha_text));
    for (unsigned k = 0; k < 300; ++k) {
      Ordinal beta = carrier.element(k);
      ASSERT_EQ(carrier.code(beta), k);
      ASSERT_EQ(carrier.fin_encode(carrier.fin_decode(beta)), beta);
      ASSERT_EQ(carrier.seq_encode(carrier.seq_decode(beta)), beta);
      ASSERT_EQ(carrier.inj_encode(carrier.inj_decode(beta)), beta);
    }
  }
}

TEST(CantorBernstein, IdentityOnTwoPoints) {
  std::vector<int> xs{0, 1};
  auto id = [](int v) { return v; };
  auto h = cantor_bernstein(xs, xs, id, id);
  EXPECT_EQ(h.at(0), 0);
  EXPECT_EQ(h.at(1), 1);
}

TEST(CantorBernstein, EveryInjectionPairOnThreePoints) {
  std::vector<int> xs{0, 1, 2};
  std::vector<char> ys{'a', 'b', 'c'};
  std::vector<int> p{0, 1, 2};
  do {
    std::vector<int> q{0, 1, 2};
    do {
      auto f = [&](int x) { return ys[p[x]]; };
      auto g = [&](char y) { return xs[q[y - 'a']]; };
      auto h = cantor_bernstein(xs, ys, f, g);
      std::set<char> image;
      for (int x : xs) image.insert(h.at(x));
      EXPECT_EQ(image.size(), 3u);
    } while (std::next_permutation(q.begin(), q.end()));
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST(CantorBernstein, RandomInstancesAreBijections) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 64;
    std::vector<unsigned> xs(n), ys(n);
    std::iota(xs.begin(), xs.end(), 0u);
    std::iota(ys.begin(), ys.end(), 1000u);
    std::vector<unsigned> pf = ys, pg = xs;
    std::shuffle(pf.begin(), pf.end(), rng);
    std::shuffle(pg.begin(), pg.end(), rng);
    auto h = cantor_bernstein(xs, ys, [&](unsigned x) { return pf[x]; },
                              [&](unsigned y) { return pg[y - 1000]; });
    std::set<unsigned> image;
    for (unsigned x : xs) {
      ASSERT_TRUE(h.count(x));
      image.insert(h.at(x));
    }
    ASSERT_EQ(image, std::set<unsigned>(ys.begin(), ys.end()));
  }
}

TEST(CantorBernstein, ReportsCollisionsWithThePair) {
  std::vector<int> xs{0, 1, 2};
  std::vector<int> ys{10, 11, 12};
  try {
    cantor_bernstein(xs, ys, [](int x) { return x + 10; }, [](int y) { return y == 12 ? 0 : y - 10; });
    FAIL() << "expected collision";
  } catch (const collision_error& e) {
    EXPECT_EQ(e.function, "g");
    EXPECT_EQ(e.first, 0u);
    EXPECT_EQ(e.second, 2u);
  }
  // Unequal sizes: the larger side cannot inject into the smaller one.
  std::vector<int> small{10, 11};
  EXPECT_THROW(cantor_bernstein(xs, small, [](int x) { return x == 2 ? 10 : x + 10; }, [](int y) { return y - 10; }),
               collision_error);
  EXPECT_THROW(cantor_bernstein(xs, ys, [](int x) { return x + 20; }, [](int y) { return y - 10; }),
               std::invalid_argument);
}

TEST(CantorBernstein, LazyChainsOnNaturalsAndIntegers) {
  // Both maps are n -> n + 1 on N. The backward chain from x ends at 0 on the
  // X side when x is even and on the Y side when x is odd.
  Injections<long, long> shift{
      [](const long& x) { return x + 1; },
      [](const long& y) { return y + 1; },
      [](const long& y) -> std::optional<long> { return y > 0 ? std::optional<long>(y - 1) : std::nullopt; },
      [](const long& x) -> std::optional<long> { return x > 0 ? std::optional<long>(x - 1) : std::nullopt; }};
  std::set<long> image;
  for (long x = 0; x < 200; ++x) {
    long y = cantor_bernstein_at(shift, x, 1000);
    EXPECT_EQ(y, x % 2 == 0 ? x + 1 : x - 1);
    image.insert(y);
  }
  EXPECT_EQ(image.size(), 200u);
  EXPECT_EQ(*image.begin(), 0);
  // On Z every backward chain is infinite.
  Injections<long, long> z_shift{
      [](const long& x) { return x + 1; }, [](const long& y) { return y + 1; },
      [](const long& y) -> std::optional<long> { return y - 1; },
      [](const long& x) -> std::optional<long> { return x - 1; }};
  EXPECT_THROW(cantor_bernstein_at(z_shift, 0L, 500), chain_undecided);
}
