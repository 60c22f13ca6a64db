#pragma once

// Finite fragment of the Mostowski permutation model over the rationals.
//
// A symmetric subset of the atoms is stored as an ascending support
// a_1 < ... < a_n and a pattern of 2n+1 bits
//   [I_0, P_1, I_1, ..., P_n, I_n]
// where P_i is membership of a_i and I_i the constant membership on the open
// gap between a_i and a_{i+1} (I_0 and I_n are the unbounded gaps).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "choiceless/bignat.hpp"
#include "choiceless/report.hpp"

namespace choiceless::mostowski {

using Atom = boost::multiprecision::cpp_rational;
using Bits = std::vector<std::uint8_t>;

inline Atom parse_atom(std::string_view text) {
  auto slash = text.find('/');
  auto parse_int = [&](std::string_view part) {
    std::string_view digits = part;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) {
      throw std::invalid_argument("not a rational atom: '" + std::string(text) + "'");
    }
    return boost::multiprecision::cpp_int(std::string(part));
  };
  if (slash == std::string_view::npos) return Atom(parse_int(text));
  auto den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in atom '" + std::string(text) + "'");
  return Atom(parse_int(text.substr(0, slash)), den);
}

inline std::string atom_to_string(const Atom& a) {
  std::string out = boost::multiprecision::numerator(a).str();
  if (boost::multiprecision::denominator(a) != 1) out += "/" + boost::multiprecision::denominator(a).str();
  return out;
}

inline std::string bits_to_string(const Bits& bits) {
  std::string out;
  for (auto b : bits) out += b ? '1' : '0';
  return out;
}

inline Bits bits_from_string(std::string_view text) {
  Bits out;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("pattern must be a bit string");
    out.push_back(ch == '1');
  }
  return out;
}

/// Sorted copy with duplicates rejected.
inline std::vector<Atom> sorted_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end());
  if (std::adjacent_find(atoms.begin(), atoms.end()) != atoms.end()) {
    throw std::invalid_argument("atom set has a repeated element");
  }
  return atoms;
}

class SymSet {
 public:
  SymSet() : pattern_{0} {}
  SymSet(std::vector<Atom> support, Bits pattern) : support_(std::move(support)), pattern_(std::move(pattern)) {
    for (std::size_t i = 1; i < support_.size(); ++i) {
      if (!(support_[i - 1] < support_[i])) throw std::invalid_argument("support must be strictly ascending");
    }
    if (pattern_.size() != 2 * support_.size() + 1) {
      throw std::invalid_argument("pattern length must be 2n+1 for a support of n atoms");
    }
    for (auto b : pattern_) {
      if (b > 1) throw std::invalid_argument("pattern entries must be bits");
    }
  }

  static SymSet empty() { return SymSet({}, {0}); }
  static SymSet all() { return SymSet({}, {1}); }

  const std::vector<Atom>& support() const { return support_; }
  const Bits& pattern() const { return pattern_; }
  std::size_t size() const { return support_.size(); }

  /// Membership bit of the i-th support atom (0-based).
  bool point(std::size_t i) const { return pattern_[2 * i + 1]; }
  /// Membership on gap g (0 = below the first atom).
  bool gap(std::size_t g) const { return pattern_[2 * g]; }

  bool contains(const Atom& q) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), q);
    const auto g = static_cast<std::size_t>(it - support_.begin());
    if (it != support_.end() && *it == q) return point(g);
    return gap(g);
  }

  friend bool operator==(const SymSet& a, const SymSet& b) {
    return a.support_ == b.support_ && a.pattern_ == b.pattern_;
  }
  friend bool operator<(const SymSet& a, const SymSet& b) {
    if (a.support_ != b.support_) return a.support_ < b.support_;
    return a.pattern_ < b.pattern_;
  }

 private:
  std::vector<Atom> support_;
  Bits pattern_;
};

inline bool member(const SymSet& x, const Atom& q) { return x.contains(q); }

/// Atom i (0-based) is removable when its bit equals both neighbouring gaps.
inline bool removable(const SymSet& x, std::size_t i) { return x.point(i) == x.gap(i) && x.gap(i) == x.gap(i + 1); }

/// Drops every removable atom; the result's support is the least support.
inline SymSet canonicalize(const SymSet& x) {
  std::vector<Atom> support;
  Bits pattern{x.gap(0)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (removable(x, i)) continue;
    support.push_back(x.support()[i]);
    pattern.push_back(x.point(i));
    pattern.push_back(x.gap(i + 1));
  }
  return SymSet(std::move(support), std::move(pattern));
}

inline bool is_canonical(const SymSet& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (removable(x, i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Coherent indexing of the sets supported by a finite E.
//
// Order: first by supp(y) as a subset of E in colex order (equivalently by the
// binary number whose bit i says whether the i-th smallest atom of E is in
// supp(y)), then by the canonical pattern read as a binary number, I_0 first.
// Extending E by atoms above max(E) adds only colex-larger supports, so ranks
// of sets already supported by E do not move.

namespace detail {

inline BigNat pow3(std::size_t n) { return boost::multiprecision::pow(BigNat(3), static_cast<unsigned>(n)); }

// Canonical patterns of length 2n+1 extending a valid prefix.
inline BigNat completions(const Bits& prefix, std::size_t n) {
  const std::size_t len = prefix.size();
  if (len == 0) return 2 * pow3(n);
  if (len % 2 == 1) return pow3(n - (len - 1) / 2);
  const std::size_t atom = len / 2;  // 1-based index of the atom whose bit ends the prefix
  const bool forced = prefix[len - 1] == prefix[len - 2];
  return (forced ? 1 : 2) * pow3(n - atom);
}

// Prefix is still extendable: no fully determined atom is removable.
inline bool prefix_valid(const Bits& prefix) {
  for (std::size_t i = 2; i < prefix.size(); i += 2) {
    if (prefix[i - 2] == prefix[i - 1] && prefix[i - 1] == prefix[i]) return false;
  }
  return true;
}

}  // namespace detail

/// Number of canonical sets whose least support is exactly an n-set.
inline BigNat count_exact_support(std::size_t n) { return 2 * detail::pow3(n); }

/// Position of a canonical pattern among all canonical patterns of its length.
inline BigNat pattern_rank(const Bits& pattern) {
  if (pattern.size() % 2 == 0) throw std::invalid_argument("pattern length must be odd");
  const std::size_t n = pattern.size() / 2;
  Bits prefix;
  BigNat rank = 0;
  for (auto bit : pattern) {
    if (bit) {
      prefix.push_back(0);
      if (detail::prefix_valid(prefix)) rank += detail::completions(prefix, n);
      prefix.back() = 1;
    } else {
      prefix.push_back(0);
    }
    if (!detail::prefix_valid(prefix)) throw std::invalid_argument("pattern is not canonical");
  }
  return rank;
}

inline Bits pattern_unrank(std::size_t n, BigNat rank) {
  if (rank < 0 || rank >= count_exact_support(n)) throw std::out_of_range("pattern rank out of range");
  Bits prefix;
  for (std::size_t pos = 0; pos < 2 * n + 1; ++pos) {
    prefix.push_back(0);
    BigNat zero_block = detail::prefix_valid(prefix) ? detail::completions(prefix, n) : BigNat(0);
    if (rank >= zero_block) {
      rank -= zero_block;
      prefix.back() = 1;
    }
  }
  return prefix;
}

/// Rank of x among the sets supported by E. Requires supp(x) to lie in E.
inline BigNat rank(const SymSet& x, const std::vector<Atom>& e_atoms) {
  const std::vector<Atom> e = sorted_atoms(e_atoms);
  const SymSet c = canonicalize(x);
  std::vector<bool> chosen(e.size(), false);
  for (const Atom& a : c.support()) {
    auto it = std::lower_bound(e.begin(), e.end(), a);
    if (it == e.end() || *it != a) {
      throw std::invalid_argument("support atom " + atom_to_string(a) + " is not in E");
    }
    chosen[static_cast<std::size_t>(it - e.begin())] = true;
  }
  BigNat result = 0;
  std::size_t above = 0;
  for (std::size_t i = e.size(); i-- > 0;) {
    if (!chosen[i]) continue;
    result += 2 * detail::pow3(above) * boost::multiprecision::pow(BigNat(4), static_cast<unsigned>(i));
    ++above;
  }
  return result + pattern_rank(c.pattern());
}

/// Inverse of rank for a fixed E.
inline SymSet unrank(const std::vector<Atom>& e_atoms, BigNat r) {
  const std::vector<Atom> e = sorted_atoms(e_atoms);
  const BigNat total = BigNat(2) * boost::multiprecision::pow(BigNat(4), static_cast<unsigned>(e.size()));
  if (r < 0 || r >= total) throw std::out_of_range("rank out of range for this support");
  std::vector<Atom> support;
  std::size_t chosen = 0;
  for (std::size_t i = e.size(); i-- > 0;) {
    BigNat skip = 2 * detail::pow3(chosen) * boost::multiprecision::pow(BigNat(4), static_cast<unsigned>(i));
    if (r >= skip) {
      r -= skip;
      support.push_back(e[i]);
      ++chosen;
    }
  }
  std::reverse(support.begin(), support.end());
  return SymSet(std::move(support), pattern_unrank(chosen, r));
}

/// All 2^{2|E|+1} sets supported by E in rank order.
inline std::vector<SymSet> enumerate_with_support(const std::vector<Atom>& e_atoms) {
  const std::vector<Atom> e = sorted_atoms(e_atoms);
  if (e.size() > 12) throw std::length_error("enumeration limited to supports of at most 12 atoms");
  std::vector<SymSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e.size()); ++mask) {
    std::vector<Atom> support;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (mask >> i & 1u) support.push_back(e[i]);
    }
    const BigNat count = count_exact_support(support.size());
    for (BigNat l = 0; l < count; ++l) out.emplace_back(support, pattern_unrank(support.size(), l));
  }
  return out;
}

/// Fin(E): the |E|-th set supported by E (0-based).
inline SymSet fin_map(const std::vector<Atom>& e) { return unrank(e, BigNat(e.size())); }

/// A finite E with fin_map(E) = x: supp(x) padded with atoms above its maximum
/// until |E| equals the rank of x.
inline std::vector<Atom> fin_preimage(const SymSet& x) {
  const SymSet c = canonicalize(x);
  const BigNat r = rank(c, c.support());
  if (r > 1u << 20) throw std::length_error("padding would exceed 2^20 atoms");
  const auto target = r.convert_to<std::size_t>();
  std::vector<Atom> e = c.support();
  if (target < e.size()) throw std::logic_error("rank below support size");
  Atom next = e.empty() ? Atom(0) : e.back() + 1;
  while (e.size() < target) {
    e.push_back(next);
    next += 1;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Seq_A.

/// The index-th permutation, in lexicographic order, of the given ascending
/// atoms.
inline std::vector<Atom> nth_permutation(std::vector<Atom> items, BigNat index) {
  const std::size_t n = items.size();
  if (index < 0 || index >= factorial(n)) throw std::out_of_range("permutation index out of range");
  std::vector<Atom> out;
  for (std::size_t left = n; left > 0; --left) {
    const BigNat block = factorial(left - 1);
    const auto pick = static_cast<std::size_t>((index / block).convert_to<std::uint64_t>());
    index %= block;
    out.push_back(items[pick]);
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

inline std::vector<Atom> default_a24() {
  std::vector<Atom> out;
  for (int i = 0; i < 24; ++i) out.emplace_back(i);
  return out;
}

/// 2 * 2^{2n+1} < n!, the bound that makes the first branch of seq_a fit.
inline bool seq_bound_holds(std::size_t n) { return 2 * pow2(2 * n + 1) < factorial(n); }

inline Report check_seq_bound(std::size_t lo, std::size_t hi) {
  Report report{"2 * 2^(2n+1) < n!", "n in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
  for (std::size_t n = lo; n <= hi; ++n) {
    if (!seq_bound_holds(n)) report.fail({{"n", n}, {"lhs", (2 * pow2(2 * n + 1)).str()}, {"rhs", factorial(n).str()}});
  }
  std::size_t threshold = 0;
  for (std::size_t n = 0; n < 64; ++n) {
    if (!seq_bound_holds(n)) threshold = n + 1;
  }
  report.details["least_n_from_which_bound_holds"] = threshold;
  return report;
}

/// Every canonical set with support of at most `max_support` atoms of `pool`,
/// from raw patterns (independent of the rank/unrank enumeration).
inline std::vector<SymSet> canonical_family(const std::vector<Atom>& pool, std::size_t max_support) {
  if (pool.size() > 20) throw std::invalid_argument("pool too large to enumerate (at most 20 atoms)");
  std::vector<SymSet> out;
  for (std::uint32_t mask = 0; mask < (1u << pool.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_support) continue;
    std::vector<Atom> support;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (mask >> i & 1u) support.push_back(pool[i]);
    }
    support = sorted_atoms(support);
    const std::size_t len = 2 * support.size() + 1;
    for (std::uint32_t code = 0; code < (1u << len); ++code) {
      Bits bits(len);
      for (std::size_t i = 0; i < len; ++i) bits[i] = code >> i & 1u;
      SymSet x(support, bits);
      if (is_canonical(x)) out.push_back(x);
    }
  }
  return out;
}

/// Injection from symmetric sets to injective atom sequences.
inline std::vector<Atom> seq_a(const SymSet& y, const std::vector<Atom>& a24 = default_a24()) {
  if (a24.size() != 24) throw std::invalid_argument("A24 must have exactly 24 atoms");
  const std::vector<Atom> reference = sorted_atoms(a24);
  const SymSet c = canonicalize(y);
  const BigNat l = pattern_rank(c.pattern());
  if (c.size() >= 12) return nth_permutation(c.support(), l);
  std::vector<Atom> d;
  std::set_symmetric_difference(c.support().begin(), c.support().end(), reference.begin(), reference.end(),
                                std::back_inserter(d));
  return nth_permutation(d, factorial(d.size()) - l - 1);
}

// ---------------------------------------------------------------------------
// Piecewise-linear order automorphisms of Q.

struct Piece {
  Atom from;
  Atom slope;
  Atom offset;
};

/// Piece k acts on [from_k, from_{k+1}); the first piece also covers
/// everything below from_0 and the last everything above.
class PLAutomorphism {
 public:
  PLAutomorphism() : pieces_{Piece{Atom(0), Atom(1), Atom(0)}} {}
  explicit PLAutomorphism(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("automorphism needs at least one piece");
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      if (pieces_[k].slope <= 0) throw std::invalid_argument("piece slopes must be positive");
      if (k == 0) continue;
      const Atom& b = pieces_[k].from;
      if (!(pieces_[k - 1].from < b)) throw std::invalid_argument("breakpoints must be strictly ascending");
      if (pieces_[k - 1].slope * b + pieces_[k - 1].offset != pieces_[k].slope * b + pieces_[k].offset) {
        throw std::invalid_argument("pieces disagree at breakpoint " + atom_to_string(b));
      }
    }
  }

  static PLAutomorphism translation(const Atom& by) { return PLAutomorphism({Piece{Atom(0), Atom(1), by}}); }

  const std::vector<Piece>& pieces() const { return pieces_; }

  Atom operator()(const Atom& q) const {
    const Piece& p = piece_for(q);
    return p.slope * q + p.offset;
  }

  Atom inverse(const Atom& q) const {
    // Images of breakpoints are ascending, so the same search works on them.
    std::size_t k = 0;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if ((*this)(pieces_[i].from) <= q) k = i;
    }
    return (q - pieces_[k].offset) / pieces_[k].slope;
  }

 private:
  const Piece& piece_for(const Atom& q) const {
    std::size_t k = 0;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].from <= q) k = i;
    }
    return pieces_[k];
  }

  std::vector<Piece> pieces_;
};

inline SymSet apply_automorphism(const PLAutomorphism& pi, const SymSet& x) {
  std::vector<Atom> support;
  for (const Atom& a : x.support()) support.push_back(pi(a));
  return SymSet(std::move(support), x.pattern());
}

/// An automorphism fixing E pointwise and sending c to b. Both must avoid E
/// and sit in the same gap of E.
inline PLAutomorphism separating_automorphism(const std::vector<Atom>& e_atoms, const Atom& c, const Atom& b) {
  const std::vector<Atom> e = sorted_atoms(e_atoms);
  auto bounds = [&](const Atom& q) {
    auto it = std::lower_bound(e.begin(), e.end(), q);
    if (it != e.end() && *it == q) throw std::invalid_argument(atom_to_string(q) + " lies in E");
    std::optional<Atom> lo, hi;
    if (it != e.begin()) lo = *(it - 1);
    if (it != e.end()) hi = *it;
    return std::make_pair(lo, hi);
  };
  const auto [lo, hi] = bounds(c);
  if (bounds(b) != std::make_pair(lo, hi)) {
    throw std::invalid_argument(atom_to_string(c) + " and " + atom_to_string(b) +
                                " lie in different gaps of E; no order automorphism fixing E maps one to the other");
  }
  if (c == b) return PLAutomorphism{};
  if (!lo && !hi) return PLAutomorphism::translation(b - c);
  std::vector<Piece> pieces;
  if (lo) {
    pieces.push_back(Piece{*lo - 1, Atom(1), Atom(0)});
    const Atom slope = (b - *lo) / (c - *lo);
    pieces.push_back(Piece{*lo, slope, *lo - slope * *lo});
  } else {
    pieces.push_back(Piece{c - 1, Atom(1), b - c});
  }
  if (hi) {
    const Atom slope = (*hi - b) / (*hi - c);
    pieces.push_back(Piece{c, slope, b - slope * c});
    pieces.push_back(Piece{*hi, Atom(1), Atom(0)});
  } else {
    pieces.push_back(Piece{c, Atom(1), b - c});
  }
  return PLAutomorphism(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Finite / cofinite subsets (basic Fraenkel model).

struct CofinSet {
  std::set<Atom> core;
  bool cofinite = false;

  bool contains(const Atom& a) const { return cofinite != (core.count(a) > 0); }
};

/// The finite or cofinite set denoted by a symmetric set whose gaps agree.
inline CofinSet to_cofin(const SymSet& x) {
  const SymSet c = canonicalize(x);
  const bool outside = c.gap(0);
  for (std::size_t g = 0; g <= c.size(); ++g) {
    if (c.gap(g) != outside) throw std::invalid_argument("row is neither finite nor cofinite");
  }
  CofinSet out;
  out.cofinite = outside;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.point(i) != outside) out.core.insert(c.support()[i]);
  }
  return out;
}

struct Decomposition {
  std::vector<bool> flags;                         // row i cofinite
  std::set<std::pair<std::size_t, Atom>> finite;  // row-wise difference with the flagged full rows
};

inline Decomposition cofinite_decompose(const std::vector<CofinSet>& rows) {
  Decomposition out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.flags.push_back(rows[i].cofinite);
    for (const Atom& a : rows[i].core) out.finite.emplace(i, a);
  }
  return out;
}

inline Decomposition cofinite_decompose(const std::vector<SymSet>& rows) {
  std::vector<CofinSet> converted;
  for (const auto& row : rows) converted.push_back(to_cofin(row));
  return cofinite_decompose(converted);
}

inline std::vector<CofinSet> cofinite_compose(const Decomposition& d) {
  std::vector<CofinSet> rows(d.flags.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].cofinite = d.flags[i];
  for (const auto& [row, atom] : d.finite) {
    if (row >= rows.size()) throw std::invalid_argument("finite part refers to a row beyond k");
    rows[row].core.insert(atom);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// JSON forms.

inline json to_json(const SymSet& x) {
  json support = json::array();
  for (const Atom& a : x.support()) support.push_back(atom_to_string(a));
  return {{"support", support}, {"pattern", bits_to_string(x.pattern())}};
}

inline SymSet symset_from_json(const json& j) {
  std::vector<Atom> support;
  for (const auto& a : j.at("support")) support.push_back(parse_atom(a.get<std::string>()));
  return SymSet(std::move(support), bits_from_string(j.at("pattern").get<std::string>()));
}

inline json to_json(const PLAutomorphism& pi) {
  json out = json::array();
  for (const Piece& p : pi.pieces()) {
    out.push_back({{"from", atom_to_string(p.from)}, {"slope", atom_to_string(p.slope)},
                   {"offset", atom_to_string(p.offset)}});
  }
  return out;
}

inline PLAutomorphism automorphism_from_json(const json& j) {
  std::vector<Piece> pieces;
  for (const auto& p : j) {
    pieces.push_back(Piece{parse_atom(p.at("from").get<std::string>()), parse_atom(p.at("slope").get<std::string>()),
                           parse_atom(p.at("offset").get<std::string>())});
  }
  return PLAutomorphism(std::move(pieces));
}

inline json atoms_to_json(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const Atom& a : atoms) out.push_back(atom_to_string(a));
  return out;
}

inline std::vector<Atom> atoms_from_json(const json& j) {
  std::vector<Atom> out;
  for (const auto& a : j) out.push_back(parse_atom(a.get<std::string>()));
  return out;
}

}  // namespace choiceless::mostowski
