#pragma once

// Bijections between N and the finite subsets, finite sequences and finite
// injective sequences of N, their lift to the carrier of an infinite ordinal
// notation, and a Cantor-Bernstein combinator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/integer.hpp>

#include "choiceless/bignat.hpp"
#include "choiceless/ordinals.hpp"

namespace choiceless::encodings {

using FinSetCode = std::vector<std::size_t>;  // strictly increasing
using SeqCode = std::vector<BigNat>;
using InjSeqCode = std::vector<BigNat>;       // pairwise distinct

/// Thrown by inj_reduce; `position` is the index of the first entry that
/// repeats an earlier one.
class not_injective : public std::invalid_argument {
 public:
  not_injective(std::size_t position, const BigNat& value)
      : std::invalid_argument("not injective: entry " + std::to_string(position) +
                              " repeats value " + value.str()),
        position(position),
        value(value) {}
  std::size_t position;
  BigNat value;
};

// ---------------------------------------------------------------------------
// Finite subsets: binary expansion.

inline BigNat fin_encode(const FinSetCode& s) {
  BigNat code = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && s[i] <= s[i - 1]) throw std::invalid_argument("finite set must be strictly increasing");
    boost::multiprecision::bit_set(code, static_cast<unsigned>(s[i]));
  }
  return code;
}

inline FinSetCode fin_decode(const BigNat& code) {
  if (code < 0) throw std::invalid_argument("negative code");
  FinSetCode out;
  if (code == 0) return out;
  const auto top = boost::multiprecision::msb(code);
  for (std::size_t i = boost::multiprecision::lsb(code); i <= top; ++i) {
    if (boost::multiprecision::bit_test(code, static_cast<unsigned>(i))) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite sequences: code(<>) = 0, code(s ^ a) = pair(code(s), a) + 1.

inline BigNat pair(const BigNat& a, const BigNat& b) { return (a + b) * (a + b + 1) / 2 + b; }

inline std::pair<BigNat, BigNat> unpair(const BigNat& n) {
  if (n < (BigNat(1) << 60)) {
    const auto v = n.convert_to<std::uint64_t>();
    auto w = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(v) + 1.0) - 1.0) / 2.0);
    while (w * (w + 1) / 2 > v) --w;
    while ((w + 1) * (w + 2) / 2 <= v) ++w;
    const std::uint64_t b = v - w * (w + 1) / 2;
    return {BigNat(w - b), BigNat(b)};
  }
  BigNat w = (boost::multiprecision::sqrt(BigNat(8 * n + 1)) - 1) / 2;
  BigNat b = n - w * (w + 1) / 2;
  return {w - b, b};
}

inline BigNat seq_encode(const SeqCode& s) {
  BigNat code = 0;
  for (const BigNat& a : s) {
    if (a < 0) throw std::invalid_argument("negative sequence entry");
    code = pair(code, a) + 1;
  }
  return code;
}

inline SeqCode seq_decode(BigNat code) {
  if (code < 0) throw std::invalid_argument("negative code");
  SeqCode out;
  while (code > 0) {
    auto [rest, last] = unpair(code - 1);
    out.push_back(last);
    code = rest;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Injective sequences <-> arbitrary sequences: b_i counts the naturals below
// a_i that are not among a_1..a_{i-1}.

inline SeqCode inj_reduce(const InjSeqCode& s) {
  SeqCode out;
  out.reserve(s.size());
  std::set<BigNat> earlier;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!earlier.insert(s[i]).second) throw not_injective(i, s[i]);
    const auto below = std::distance(earlier.begin(), earlier.find(s[i]));
    out.push_back(s[i] - below);
  }
  return out;
}

inline InjSeqCode inj_expand(const SeqCode& b) {
  InjSeqCode out;
  out.reserve(b.size());
  std::set<BigNat> earlier;
  for (const BigNat& value : b) {
    if (value < 0) throw std::invalid_argument("negative sequence entry");
    BigNat x = value;
    for (const BigNat& e : earlier) {
      if (e <= x) ++x;
      else break;
    }
    earlier.insert(x);
    out.push_back(x);
  }
  return out;
}

inline BigNat inj_encode(const InjSeqCode& s) { return seq_encode(inj_reduce(s)); }
inline InjSeqCode inj_decode(const BigNat& code) { return inj_expand(seq_decode(code)); }

// ---------------------------------------------------------------------------
// Lift to the notations below an infinite ordinal alpha.

class Carrier {
 public:
  explicit Carrier(ordinals::Ordinal alpha) : alpha_(std::move(alpha)) {
    if (alpha_.is_finite()) {
      throw std::invalid_argument("lift requires an infinite ordinal, got " + ordinals::to_string(alpha_));
    }
  }

  const ordinals::Ordinal& alpha() const { return alpha_; }

  /// Natural number attached to an element beta < alpha.
  BigNat code(const ordinals::Ordinal& beta) const {
    return ordinals::detail::counter().index_below(alpha_, beta);
  }
  ordinals::Ordinal element(const BigNat& code) const {
    return ordinals::detail::counter().at_index_below(alpha_, code);
  }

  std::vector<ordinals::Ordinal> fin_decode(const ordinals::Ordinal& beta) const {
    std::vector<ordinals::Ordinal> out;
    for (std::size_t i : encodings::fin_decode(code(beta))) out.push_back(element(i));
    return out;
  }
  ordinals::Ordinal fin_encode(const std::vector<ordinals::Ordinal>& set) const {
    FinSetCode codes;
    for (const auto& x : set) codes.push_back(to_position(code(x)));
    std::sort(codes.begin(), codes.end());
    if (std::adjacent_find(codes.begin(), codes.end()) != codes.end()) {
      throw std::invalid_argument("finite set has a repeated element");
    }
    return element(encodings::fin_encode(codes));
  }

  std::vector<ordinals::Ordinal> seq_decode(const ordinals::Ordinal& beta) const {
    return elements(encodings::seq_decode(code(beta)));
  }
  ordinals::Ordinal seq_encode(const std::vector<ordinals::Ordinal>& seq) const {
    return element(encodings::seq_encode(codes(seq)));
  }

  std::vector<ordinals::Ordinal> inj_decode(const ordinals::Ordinal& beta) const {
    return elements(encodings::inj_decode(code(beta)));
  }
  ordinals::Ordinal inj_encode(const std::vector<ordinals::Ordinal>& seq) const {
    return element(encodings::inj_encode(codes(seq)));
  }

 private:
  static std::size_t to_position(const BigNat& code) {
    if (code > 1u << 24) throw std::length_error("finite set element code too large to encode");
    return code.convert_to<std::size_t>();
  }
  std::vector<BigNat> codes(const std::vector<ordinals::Ordinal>& xs) const {
    std::vector<BigNat> out;
    for (const auto& x : xs) out.push_back(code(x));
    return out;
  }
  std::vector<ordinals::Ordinal> elements(const std::vector<BigNat>& cs) const {
    std::vector<ordinals::Ordinal> out;
    for (const auto& c : cs) out.push_back(element(c));
    return out;
  }

  ordinals::Ordinal alpha_;
};

// ---------------------------------------------------------------------------
// Cantor-Bernstein.

/// Reported when an input function maps two points of its domain to one
/// value. Indices refer to the listed carrier of that function's domain.
class collision_error : public std::invalid_argument {
 public:
  collision_error(std::string function, std::size_t first, std::size_t second, const std::string& detail)
      : std::invalid_argument(function + " is not injective: domain entries " + std::to_string(first) +
                              " and " + std::to_string(second) + " collide" + detail),
        function(std::move(function)),
        first(first),
        second(second) {}
  std::string function;
  std::size_t first;
  std::size_t second;
};

class chain_undecided : public std::runtime_error {
 public:
  explicit chain_undecided(std::size_t steps)
      : std::runtime_error("chain undecided after " + std::to_string(steps) + " steps"), steps(steps) {}
  std::size_t steps;
};

namespace detail {

template <class A, class B, class F>
std::map<B, std::size_t> image_index(const std::vector<A>& domain, const std::vector<B>& codomain, const F& fn,
                                     const std::string& name) {
  std::set<B> allowed(codomain.begin(), codomain.end());
  std::map<B, std::size_t> hit;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    B value = fn(domain[i]);
    if (!allowed.count(value)) {
      throw std::invalid_argument(name + " maps domain entry " + std::to_string(i) + " outside its codomain");
    }
    auto [it, fresh] = hit.emplace(value, i);
    if (!fresh) {
      std::string detail;
      if (domain.size() > codomain.size()) {
        detail = " (domain has " + std::to_string(domain.size()) + " elements, codomain " +
                 std::to_string(codomain.size()) + ")";
      }
      throw collision_error(name, it->second, i, detail);
    }
  }
  return hit;
}

}  // namespace detail

/// Bijection X -> Y from injections f: X -> Y and g: Y -> X on listed finite
/// carriers. Each x is sent along its backward chain: chains that stop in X,
/// and cycles, use f; chains that stop in Y use the inverse of g.
template <class X, class Y, class F, class G>
std::map<X, Y> cantor_bernstein(const std::vector<X>& xs, const std::vector<Y>& ys, const F& f, const G& g) {
  const auto f_hits = detail::image_index(xs, ys, f, "f");
  const auto g_hits = detail::image_index(ys, xs, g, "g");
  std::map<X, Y> result;
  for (const X& x : xs) {
    X cursor = x;
    bool use_f = true;
    for (std::size_t step = 0; step <= xs.size() + ys.size(); ++step) {
      auto from_y = g_hits.find(cursor);
      if (from_y == g_hits.end()) break;  // stops in X
      const Y& y = ys[from_y->second];
      auto from_x = f_hits.find(y);
      if (from_x == f_hits.end()) {  // stops in Y
        use_f = false;
        break;
      }
      cursor = xs[from_x->second];
      if (cursor == x) break;  // cycle
    }
    result.emplace(x, use_f ? f(x) : ys[g_hits.at(x)]);
  }
  return result;
}

/// Lazy variant for unbounded carriers: decidable preimages drive the chain
/// chase, which gives up after `budget` steps.
template <class X, class Y>
struct Injections {
  std::function<Y(const X&)> f;
  std::function<X(const Y&)> g;
  std::function<std::optional<X>(const Y&)> f_preimage;
  std::function<std::optional<Y>(const X&)> g_preimage;
};

template <class X, class Y>
Y cantor_bernstein_at(const Injections<X, Y>& maps, const X& x, std::size_t budget) {
  X cursor = x;
  for (std::size_t step = 0; step < budget; ++step) {
    std::optional<Y> y = maps.g_preimage(cursor);
    if (!y) return maps.f(x);
    std::optional<X> back = maps.f_preimage(*y);
    if (!back) return *maps.g_preimage(x);
    cursor = *back;
    if (cursor == x) return maps.f(x);
  }
  throw chain_undecided(budget);
}

}  // namespace choiceless::encodings
