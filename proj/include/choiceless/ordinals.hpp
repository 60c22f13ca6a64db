#pragma once

// Ordinal notations below epsilon-zero in Cantor normal form.
//
// A notation is a list of terms w^e * c with strictly decreasing exponents e
// (themselves notations) and coefficients c >= 1. The empty list is 0.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "choiceless/bignat.hpp"

namespace choiceless::ordinals {

struct Term;

class Ordinal {
 public:
  Ordinal() = default;

  /// Validates the normal-form invariants; throws std::invalid_argument.
  explicit Ordinal(std::vector<Term> terms);

  static Ordinal natural(const BigNat& n);
  static Ordinal omega();
  static Ordinal omega_power(const Ordinal& exponent, const BigNat& coefficient = 1);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  /// True when some term has a nonzero exponent.
  bool is_infinite() const { return !is_finite(); }
  const Term& leading() const;
  /// The notation with the leading term removed.
  Ordinal tail() const;

 private:
  struct Unchecked {};
  Ordinal(std::vector<Term> terms, Unchecked);
  friend Ordinal add(const Ordinal&, const Ordinal&);
  friend class NotationCounter;
  friend Ordinal append_term(const Ordinal&, const Ordinal&, const BigNat&);

  std::vector<Term> terms_;
};

struct Term {
  Ordinal exponent;
  BigNat coefficient;
};

std::strong_ordering compare(const Ordinal& a, const Ordinal& b);

inline bool operator==(const Ordinal& a, const Ordinal& b) {
  return compare(a, b) == std::strong_ordering::equal;
}
inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  return compare(a, b);
}

// ---------------------------------------------------------------------------
// Construction

inline Ordinal::Ordinal(std::vector<Term> terms, Unchecked) : terms_(std::move(terms)) {}

inline Ordinal::Ordinal(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].coefficient < 1) {
      throw std::invalid_argument("coefficient must be at least 1");
    }
    if (i > 0 && !(terms_[i].exponent < terms_[i - 1].exponent)) {
      throw std::invalid_argument("exponents must be strictly decreasing");
    }
  }
}

inline Ordinal Ordinal::natural(const BigNat& n) {
  if (n < 0) throw std::invalid_argument("negative natural");
  if (n == 0) return Ordinal{};
  return Ordinal({Term{Ordinal{}, n}}, Unchecked{});
}

inline Ordinal Ordinal::omega() { return omega_power(natural(1)); }

inline Ordinal Ordinal::omega_power(const Ordinal& exponent, const BigNat& coefficient) {
  if (coefficient < 1) throw std::invalid_argument("coefficient must be at least 1");
  return Ordinal({Term{exponent, coefficient}}, Unchecked{});
}

inline bool Ordinal::is_finite() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.exponent.is_zero(); });
}

inline const Term& Ordinal::leading() const {
  if (terms_.empty()) throw std::logic_error("zero has no leading term");
  return terms_.front();
}

inline Ordinal Ordinal::tail() const {
  if (terms_.empty()) return {};
  return Ordinal(std::vector<Term>(terms_.begin() + 1, terms_.end()), Unchecked{});
}

/// Appends w^exponent * coefficient; the caller guarantees the exponent is
/// below the current last exponent.
inline Ordinal append_term(const Ordinal& prefix, const Ordinal& exponent,
                           const BigNat& coefficient) {
  std::vector<Term> terms = prefix.terms_;
  terms.push_back(Term{exponent, coefficient});
  return Ordinal(std::move(terms), Ordinal::Unchecked{});
}

// ---------------------------------------------------------------------------
// Order and arithmetic

inline std::strong_ordering compare(const Ordinal& a, const Ordinal& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  const std::size_t common = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < common; ++i) {
    auto by_exponent = compare(x[i].exponent, y[i].exponent);
    if (by_exponent != std::strong_ordering::equal) return by_exponent;
    if (x[i].coefficient != y[i].coefficient) {
      return x[i].coefficient < y[i].coefficient ? std::strong_ordering::less
                                                 : std::strong_ordering::greater;
    }
  }
  return x.size() <=> y.size();
}

/// Ordinal sum a + b. Terms of a below the leading exponent of b are absorbed.
inline Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const Term& lead = b.leading();
  std::vector<Term> terms;
  for (const Term& t : a.terms()) {
    auto c = compare(t.exponent, lead.exponent);
    if (c == std::strong_ordering::greater) {
      terms.push_back(t);
    } else if (c == std::strong_ordering::equal) {
      terms.push_back(Term{t.exponent, t.coefficient + lead.coefficient});
      break;
    } else {
      break;
    }
  }
  const bool merged = !terms.empty() && terms.back().exponent == lead.exponent;
  for (std::size_t i = merged ? 1 : 0; i < b.terms().size(); ++i) {
    terms.push_back(b.terms()[i]);
  }
  return Ordinal(std::move(terms), Ordinal::Unchecked{});
}

/// Collapse of the reversed sum: only the leading term w^a0 * k0 survives.
inline Ordinal reverse(const Ordinal& a) {
  if (a.is_zero()) throw std::invalid_argument("reverse of 0 is undefined");
  return Ordinal::omega_power(a.leading().exponent, a.leading().coefficient);
}

// ---------------------------------------------------------------------------
// Text syntax: 0, 5, w, w^2*3 + w + 4, w^(w + 1), w^w^2 (right associative).

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Ordinal parse() {
    Ordinal result = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return result;
  }

 private:
  Ordinal sum() {
    skip_space();
    if (peek() == '0' && !is_digit_at(pos_ + 1)) {
      ++pos_;
      return Ordinal{};
    }
    std::vector<Term> terms;
    terms.push_back(term());
    while (consume('+')) {
      Term next = term();
      if (!(next.exponent < terms.back().exponent)) fail("exponents must strictly decrease");
      terms.push_back(std::move(next));
    }
    return Ordinal(std::move(terms));
  }

  Term term() {
    skip_space();
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      BigNat n = number();
      if (n == 0) fail("zero coefficient");
      return Term{Ordinal{}, n};
    }
    Ordinal exponent = omega_exponent();
    BigNat coefficient = 1;
    if (consume('*')) {
      skip_space();
      coefficient = number();
      if (coefficient == 0) fail("zero coefficient");
    }
    return Term{std::move(exponent), coefficient};
  }

  // Parses "w" or "w^primary" and returns the exponent.
  Ordinal omega_exponent() {
    if (!consume('w')) fail("expected 'w' or a number");
    if (!consume('^')) return Ordinal::natural(1);
    return primary();
  }

  Ordinal primary() {
    skip_space();
    if (consume('(')) {
      Ordinal inner = sum();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(peek()))) return Ordinal::natural(number());
    return Ordinal::omega_power(omega_exponent());
  }

  BigNat number() {
    std::size_t start = pos_;
    while (is_digit_at(pos_)) ++pos_;
    if (start == pos_) fail("expected a number");
    return parse_bignat(text_.substr(start, pos_ - start));
  }

  bool is_digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char ch) {
    if (peek() != ch) return false;
    ++pos_;
    return true;
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("ordinal syntax error at column " + std::to_string(pos_ + 1) +
                                ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Ordinal parse_ordinal(std::string_view text) { return detail::Parser(text).parse(); }

std::string to_string(const Ordinal& a);

namespace detail {

inline bool prints_bare_as_exponent(const Ordinal& e) {
  if (e.is_finite()) return true;
  return e.terms().size() == 1 && e.leading().coefficient == 1 &&
         prints_bare_as_exponent(e.leading().exponent);
}

}  // namespace detail

inline std::string to_string(const Ordinal& a) {
  if (a.is_zero()) return "0";
  std::string out;
  for (const Term& t : a.terms()) {
    if (!out.empty()) out += " + ";
    if (t.exponent.is_zero()) {
      out += t.coefficient.str();
      continue;
    }
    out += "w";
    if (!(t.exponent == Ordinal::natural(1))) {
      out += "^";
      if (detail::prints_bare_as_exponent(t.exponent)) {
        out += to_string(t.exponent);
      } else {
        out += "(" + to_string(t.exponent) + ")";
      }
    }
    if (t.coefficient != 1) out += "*" + t.coefficient.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical enumeration of all notations by the naturals.
//
// Notations are listed by size (|0| = 0, |sum of terms| = sum over terms of
// |exponent| + coefficient), and notations of equal size in increasing ordinal
// order. Every size class is finite, so this is a bijection with N. Ranks are
// computed by counting, never by materializing the list:
//
//   below(e)[t] = #{ b : |b| = t, b < w^e }
//               = [x^t] prod_{f < e} (1 + x^{|f|+1} / (1 - x))
//
// which depends only on how many f < e exist of each size.

class NotationCounter {
 public:
  using Poly = std::vector<BigNat>;

  /// Coefficients above this bound make the counting tables impractically
  /// large; such notations are rejected with std::length_error.
  static constexpr std::size_t kMaxSize = 200000;

  std::size_t size_of(const Ordinal& a) {
    std::size_t total = 0;
    for (const Term& t : a.terms()) {
      if (t.coefficient > kMaxSize) throw std::length_error("notation too large to index");
      total += size_of(t.exponent) + t.coefficient.convert_to<std::size_t>();
      if (total > kMaxSize) throw std::length_error("notation too large to index");
    }
    return total;
  }

  /// Number of notations of size t (the unbounded case of below()).
  BigNat count_of_size(std::size_t t) { return below(nullptr, t)[t]; }

  /// Number of notations b with |b| = t and b < bound.
  BigNat count_below(const Ordinal& bound, std::size_t t) {
    if (bound.is_zero()) return 0;
    const Term& lead = bound.leading();
    const std::size_t lead_size = size_of(lead.exponent);
    const std::size_t coefficient = size_of(Ordinal::natural(lead.coefficient));
    BigNat result;
    {
      const Poly& p = below(&lead.exponent, t);
      result = p[t];
      for (std::size_t c = 1; c < coefficient && lead_size + c <= t; ++c) {
        result += p[t - lead_size - c];
      }
    }
    if (lead_size + coefficient <= t) {
      result += count_below(bound.tail(), t - lead_size - coefficient);
    }
    return result;
  }

  BigNat index_of(const Ordinal& a) {
    const std::size_t s = size_of(a);
    BigNat index;
    {
      const Poly& n = below(nullptr, s);
      for (std::size_t t = 0; t < s; ++t) index += n[t];
    }
    return index + count_below(a, s);
  }

  Ordinal at_index(BigNat index) {
    if (index < 0) throw std::invalid_argument("negative index");
    std::size_t s = 0;
    for (;; ++s) {
      BigNat here = count_of_size(s);
      if (index < here) break;
      index -= here;
    }
    return select_below_power(nullptr, s, index);
  }

  /// Position of b in the enumeration of the notations below alpha (restriction
  /// of the global order to the carrier of alpha).
  BigNat index_below(const Ordinal& alpha, const Ordinal& b) {
    if (!(b < alpha)) throw std::out_of_range(to_string(b) + " is not below " + to_string(alpha));
    if (alpha == Ordinal::omega()) return b.is_zero() ? BigNat(0) : b.leading().coefficient;
    const std::size_t s = size_of(b);
    BigNat index;
    for (std::size_t t = 0; t < s; ++t) index += count_below(alpha, t);
    return index + count_below(b, s);
  }

  Ordinal at_index_below(const Ordinal& alpha, BigNat index) {
    if (index < 0) throw std::invalid_argument("negative index");
    if (alpha == Ordinal::omega()) return Ordinal::natural(index);
    if (alpha.is_finite() && index >= alpha.leading().coefficient) {
      throw std::out_of_range("index beyond the finite carrier");
    }
    std::size_t s = 0;
    for (;; ++s) {
      BigNat here = count_below(alpha, s);
      if (index < here) break;
      index -= here;
    }
    return select_below(alpha, s, index);
  }

 private:
  // below(e)[0..T]; e == nullptr means no bound (all notations).
  const Poly& below(const Ordinal* bound, std::size_t degree) {
    Poly& entry = bound ? cache_[*bound] : unbounded_;
    if (entry.size() > degree) return entry;
    const std::size_t cap = std::max(degree + 1, 2 * entry.size());
    Poly p(cap);
    p[0] = 1;
    for (std::size_t m = 0; m + 1 < cap; ++m) {
      // Factors for sizes >= m only touch degrees > m, so p[m] is final here.
      BigNat exponents_of_size = bound ? count_below(*bound, m) : p[m];
      if (exponents_of_size != 0) multiply_factor(p, m, exponents_of_size);
    }
    entry = std::move(p);
    return entry;
  }

  // p <- p * (1 + y)^k with y = x^{m+1} / (1 - x), truncated to p.size().
  static void multiply_factor(Poly& p, std::size_t m, const BigNat& k) {
    const std::size_t cap = p.size();
    const std::size_t max_j = (cap - 1) / (m + 1);
    auto times_y = [&](const Poly& q) {
      Poly out(cap);
      BigNat running = 0;
      for (std::size_t d = 0; d + m + 1 < cap; ++d) {
        running += q[d];
        out[d + m + 1] = running;
      }
      return out;
    };
    if (k <= max_j) {
      const auto reps = k.convert_to<std::size_t>();
      for (std::size_t r = 0; r < reps; ++r) {
        Poly shifted = times_y(p);
        for (std::size_t d = 0; d < cap; ++d) p[d] += shifted[d];
      }
      return;
    }
    Poly result = p;
    Poly power = p;
    BigNat binomial = 1;
    for (std::size_t j = 1; j <= max_j; ++j) {
      power = times_y(power);
      binomial = binomial * (k - (j - 1)) / j;
      for (std::size_t d = 0; d < cap; ++d) result[d] += binomial * power[d];
    }
    p = std::move(result);
  }

  // k-th (0-based) notation of size s that is below w^bound (bound == nullptr:
  // unbounded), in increasing order.
  Ordinal select_below_power(const Ordinal* bound, std::size_t s, BigNat k) {
    if (s == 0) return Ordinal{};
    std::optional<Ordinal> limit;
    if (bound) limit = *bound;
    auto fewer_than_k = [&](const Ordinal& f) {
      if (limit && !(f < *limit)) return false;
      return below(&f, s)[s] <= k;
    };
    Ordinal f = largest_satisfying(fewer_than_k, s - 1);
    const std::size_t f_size = size_of(f);
    k -= below(&f, s)[s];
    for (std::size_t c = 1; f_size + c <= s; ++c) {
      const std::size_t rest = s - f_size - c;
      BigNat block = below(&f, rest)[rest];
      if (k < block) {
        Ordinal tail = select_below_power(&f, rest, k);
        std::vector<Term> terms{Term{f, c}};
        terms.insert(terms.end(), tail.terms().begin(), tail.terms().end());
        return Ordinal(std::move(terms), Ordinal::Unchecked{});
      }
      k -= block;
    }
    throw std::logic_error("notation selection out of range");
  }

  Ordinal select_below(const Ordinal& bound, std::size_t s, BigNat k) {
    if (bound.is_zero()) throw std::logic_error("nothing below 0");
    const Term& lead = bound.leading();
    const std::size_t lead_size = size_of(lead.exponent);
    const std::size_t coefficient = size_of(Ordinal::natural(lead.coefficient));
    BigNat first_block = below(&lead.exponent, s)[s];
    if (k < first_block) return select_below_power(&lead.exponent, s, k);
    k -= first_block;
    for (std::size_t c = 1; c < coefficient && lead_size + c <= s; ++c) {
      const std::size_t rest = s - lead_size - c;
      BigNat block = below(&lead.exponent, rest)[rest];
      if (k < block) {
        return prepend(lead.exponent, c, select_below_power(&lead.exponent, rest, k));
      }
      k -= block;
    }
    if (lead_size + coefficient > s) throw std::logic_error("notation selection out of range");
    return prepend(lead.exponent, lead.coefficient,
                   select_below(bound.tail(), s - lead_size - coefficient, k));
  }

  static Ordinal prepend(const Ordinal& exponent, const BigNat& coefficient, const Ordinal& rest) {
    std::vector<Term> terms{Term{exponent, coefficient}};
    terms.insert(terms.end(), rest.terms().begin(), rest.terms().end());
    return Ordinal(std::move(terms), Ordinal::Unchecked{});
  }

  // Largest notation f with |f| <= budget satisfying a predicate that holds at
  // 0 and is closed downward. Built term by term: a larger next term beats any
  // choice of later terms.
  Ordinal largest_satisfying(const std::function<bool(const Ordinal&)>& holds,
                             std::size_t budget) {
    Ordinal prefix;
    std::optional<Ordinal> exponent_limit;
    while (budget > 0) {
      if (exponent_limit && exponent_limit->is_zero()) break;
      if (!holds(append_term(prefix, Ordinal{}, 1))) break;
      auto exponent_holds = [&](const Ordinal& h) {
        if (exponent_limit && !(h < *exponent_limit)) return false;
        return holds(append_term(prefix, h, 1));
      };
      Ordinal g = largest_satisfying(exponent_holds, budget - 1);
      const std::size_t g_size = size_of(g);
      std::size_t lo = 1;
      std::size_t hi = budget - g_size;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (holds(append_term(prefix, g, mid))) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      prefix = append_term(prefix, g, lo);
      budget -= g_size + lo;
      exponent_limit = g;
    }
    return prefix;
  }

  struct Less {
    bool operator()(const Ordinal& a, const Ordinal& b) const { return a < b; }
  };
  std::map<Ordinal, Poly, Less> cache_;
  Poly unbounded_;
};

namespace detail {
inline NotationCounter& counter() {
  thread_local NotationCounter instance;
  return instance;
}
}  // namespace detail

inline BigNat nat_index(const Ordinal& a) { return detail::counter().index_of(a); }
inline Ordinal unindex(const BigNat& n) { return detail::counter().at_index(n); }
inline std::size_t notation_size(const Ordinal& a) { return detail::counter().size_of(a); }

}  // namespace choiceless::ordinals
