#pragma once

// n* = number of injective sequences (the empty one included) over an n-set
//    = sum_{i=0}^{n} n!/i!,   0* = 1,   n* = n * (n-1)* + 1.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "choiceless/bignat.hpp"
#include "choiceless/parallel.hpp"
#include "choiceless/report.hpp"

namespace choiceless::starcount {

inline BigNat star(std::size_t n) {
  BigNat value = 1;
  for (std::size_t m = 1; m <= n; ++m) value = value * m + 1;
  return value;
}

/// n* straight from the factorial sum; used to validate the recurrence.
inline BigNat star_by_sum(std::size_t n) {
  BigNat total = 0;
  BigNat falling = 1;  // n!/i! for i running down from n
  for (std::size_t i = n + 1; i-- > 0;) {
    total += falling;
    falling *= i;
  }
  return total;
}

/// 0*, 1*, ..., n*.
inline std::vector<BigNat> star_table(std::size_t n) {
  std::vector<BigNat> out{1};
  for (std::size_t m = 1; m <= n; ++m) out.push_back(out.back() * m + 1);
  return out;
}

/// n* mod 2^64 by wrapping arithmetic.
inline std::uint64_t star_mod_2_64(std::size_t n) {
  std::uint64_t value = 1;
  for (std::size_t m = 1; m <= n; ++m) value = value * static_cast<std::uint64_t>(m) + 1;
  return value;
}

/// n* mod modulus, where modulus must be a power of two 2^r with r >= 1.
/// Streams the recurrence; no factorial is formed.
inline BigNat star_mod(std::size_t n, const BigNat& modulus) {
  if (modulus < 2 || !is_power_of_two(modulus)) {
    throw std::invalid_argument("modulus must be a power of two 2^r with r >= 1, got " + modulus.str());
  }
  const std::size_t r = log2_exact(modulus);
  if (r <= 64) {
    const std::uint64_t mask = r == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
    return BigNat(star_mod_2_64(n) & mask);
  }
  const BigNat mask = modulus - 1;
  BigNat value = 1;
  for (std::size_t m = 1; m <= n; ++m) value = (value * m + 1) & mask;
  return value;
}

namespace detail {

inline std::vector<std::uint64_t> residues_2_64(std::size_t n) {
  std::vector<std::uint64_t> out(n + 1);
  std::uint64_t value = 1;
  out[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) out[m] = value = value * static_cast<std::uint64_t>(m) + 1;
  return out;
}

inline std::string interval(std::size_t lo, std::size_t hi) {
  return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
}

}  // namespace detail

/// n even <=> n* odd, for n <= limit.
inline Report check_parity_law(std::size_t limit) {
  Report report{"n even <=> n* odd", "n in " + detail::interval(0, limit)};
  const auto residues = detail::residues_2_64(limit);
  for (std::size_t n = 0; n <= limit; ++n) {
    const bool n_even = n % 2 == 0;
    const bool star_odd = residues[n] % 2 == 1;
    if (n_even != star_odd) {
      report.fail({{"n", n}, {"star_mod_2", residues[n] % 2}});
      break;
    }
  }
  return report;
}

/// For 1 <= r <= 4 and every n <= limit with 2^r | n*: 2^r | (n + 2^r)* and
/// 2^r does not divide (n + t)* for 0 < t < 2^r.
inline Report check_divisibility_lemma(unsigned r, std::size_t limit) {
  if (r < 1 || r > 4) throw std::invalid_argument("r must lie in 1..4");
  const std::uint64_t m = std::uint64_t{1} << r;
  Report report{"2^" + std::to_string(r) + " | n* implies 2^" + std::to_string(r) + " | (n+" + std::to_string(m) +
                    ")* and 2^" + std::to_string(r) + " does not divide (n+t)* for 0 < t < " + std::to_string(m),
                "n in " + detail::interval(0, limit)};
  const auto residues = detail::residues_2_64(limit + m);
  json premise = json::array();
  for (std::size_t n = 0; n <= limit; ++n) {
    if (residues[n] % m != 0) continue;
    premise.push_back(n);
    if (residues[n + m] % m != 0) report.fail({{"n", n}, {"fails", "2^r | (n+2^r)*"}});
    for (std::size_t t = 1; t < m; ++t) {
      if (residues[n + t] % m == 0) report.fail({{"n", n}, {"t", t}, {"fails", "2^r does not divide (n+t)*"}});
    }
  }
  report.details["premise_holds_at"] = premise;
  return report;
}

/// T(n) = sum_{j=0}^{n-1} sum_{i=j+1}^{n} n!/(i * j!), as partial sums per j.
inline std::vector<BigNat> t_partial_sums(std::size_t n) {
  std::vector<BigNat> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    BigNat falling = 1;  // n!/j!
    for (std::size_t m = j + 1; m <= n; ++m) falling *= m;
    BigNat sum = 0;
    for (std::size_t i = j + 1; i <= n; ++i) sum += falling / i;
    out[j] = sum;
  }
  return out;
}

inline BigNat t_value(std::size_t n) {
  BigNat total = 0;
  for (const auto& s : t_partial_sums(n)) total += s;
  return total;
}

/// (n + 2^k)* == 2^k * T(n) + n*  (mod 2^{k+1}), evaluated exactly.
inline Report check_identity_2(std::size_t n, std::size_t k) {
  if (n < 2 || k < 2) throw std::invalid_argument("the congruence identity needs n >= 2 and k >= 2");
  Report report{"(n+2^k)* == 2^k T(n) + n* (mod 2^(k+1))",
                "n = " + std::to_string(n) + ", k = " + std::to_string(k)};
  const BigNat modulus = pow2(k + 1);
  const BigNat lhs = star(n + (std::size_t{1} << k)) % modulus;
  const BigNat rhs = (pow2(k) * t_value(n) + star(n)) % modulus;
  report.details = {{"lhs_residue", lhs.str()}, {"rhs_residue", rhs.str()}};
  if (lhs != rhs) report.fail({{"n", n}, {"k", k}, {"lhs", lhs.str()}, {"rhs", rhs.str()}});
  return report;
}

inline Report check_identity_2_range(std::size_t n_max, std::size_t k_max) {
  Report report{"(n+2^k)* == 2^k T(n) + n* (mod 2^(k+1))",
                "n in " + detail::interval(2, n_max) + ", k in " + detail::interval(2, k_max)};
  if (n_max < 2 || k_max < 2) return report;
  const std::size_t ks = k_max - 1;
  auto cells = parallel_map((n_max - 1) * ks, [&](std::size_t cell) {
    return check_identity_2(2 + cell / ks, 2 + cell % ks);
  });
  std::size_t checked = 0;
  for (const auto& cell : cells) {
    ++checked;
    if (!cell.ok) report.fail(cell.counterexample);
  }
  report.details["cases"] = checked;
  return report;
}

/// For odd n >= 3: the j-th partial sum of T(n) is odd exactly for
/// j in {n-1, n-2, n-3}, so T(n) is odd.
inline Report check_t_parity(std::size_t n) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("T parity check needs odd n >= 3");
  Report report{"T(n) odd; partial sum j odd iff j >= n-3", "n = " + std::to_string(n)};
  const auto sums = t_partial_sums(n);
  json parities = json::array();
  BigNat total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool odd = boost::multiprecision::bit_test(sums[j], 0);
    parities.push_back(odd ? 1 : 0);
    const bool expected_odd = j + 3 >= n;
    if (odd != expected_odd) report.fail({{"n", n}, {"j", j}, {"partial_sum_parity", odd ? 1 : 0}});
    total += sums[j];
  }
  const bool total_odd = boost::multiprecision::bit_test(total, 0);
  if (!total_odd) report.fail({{"n", n}, {"T_parity", 0}});
  report.details = {{"partial_sum_parities", parities}, {"T_parity", total_odd ? 1 : 0}};
  return report;
}

inline Report check_t_parity_range(std::size_t n_max) {
  Report report{"T(n) odd for odd n", "odd n in " + detail::interval(3, n_max)};
  for (std::size_t n = 3; n <= n_max; n += 2) {
    Report one = check_t_parity(n);
    if (!one.ok) report.fail(one.counterexample);
  }
  return report;
}

/// All n <= limit with n* a power of two. While n* fits in 64 bits the word is
/// exact. Past that, a power of two at least 2^64 must vanish mod 2^64, so only
/// a zero residue sends n to the exact test.
inline std::vector<std::size_t> scan_pow2(std::size_t limit) {
  std::vector<std::size_t> hits;
  std::uint64_t value = 1;
  bool exact = true;
  for (std::size_t n = 0; n <= limit; ++n) {
    if (n > 0) {
      std::uint64_t product;
      if (__builtin_mul_overflow(value, static_cast<std::uint64_t>(n), &product) ||
          product == ~std::uint64_t{0}) {
        exact = false;
      }
      value = value * static_cast<std::uint64_t>(n) + 1;
    }
    if (exact) {
      if ((value & (value - 1)) == 0) hits.push_back(n);
    } else if (value == 0 && is_power_of_two(star(n))) {
      hits.push_back(n);
    }
  }
  return hits;
}

/// Same scan with an exact single-bit test at every n. Quadratic; for
/// cross-checking the residue filter.
inline std::vector<std::size_t> scan_pow2_exhaustive(std::size_t limit) {
  std::vector<std::size_t> hits;
  BigNat value = 1;
  for (std::size_t n = 0; n <= limit; ++n) {
    if (n > 0) value = value * n + 1;
    if (is_power_of_two(value)) hits.push_back(n);
  }
  return hits;
}

/// If n* = 2^k and (n+t)* is a power of two, then 2^k | t.
inline Report check_star_gap(std::size_t n, std::size_t t) {
  const BigNat base = star(n);
  if (!is_power_of_two(base)) {
    throw std::invalid_argument("precondition violated: " + std::to_string(n) + "* = " + base.str() +
                                " is not a power of two");
  }
  const std::size_t k = log2_exact(base);
  Report report{"n* = 2^k and (n+t)* a power of two imply 2^k | t",
                "n = " + std::to_string(n) + ", t = " + std::to_string(t)};
  const bool premise = is_power_of_two(star(n + t));
  const bool divides = k >= 64 ? t == 0 : t % (std::uint64_t{1} << k) == 0;
  report.details = {{"k", k}, {"premise", premise}, {"outcome", premise ? "confirmed" : "vacuous"}};
  if (premise && !divides) report.fail({{"n", n}, {"t", t}, {"k", k}});
  return report;
}

inline Report check_star_gap_range(std::size_t n, std::size_t t_max) {
  const BigNat base = star(n);
  if (!is_power_of_two(base)) {
    throw std::invalid_argument("precondition violated: " + std::to_string(n) + "* = " + base.str() +
                                " is not a power of two");
  }
  const std::size_t k = log2_exact(base);
  Report report{"n* = 2^k and (n+t)* a power of two imply 2^k | t",
                "n = " + std::to_string(n) + ", t in " + detail::interval(1, t_max)};
  json premise_at = json::array();
  BigNat value = base;
  for (std::size_t t = 1; t <= t_max; ++t) {
    value = value * (n + t) + 1;
    if (!is_power_of_two(value)) continue;
    premise_at.push_back(t);
    const bool divides = k >= 64 ? false : t % (std::uint64_t{1} << k) == 0;
    if (!divides) report.fail({{"n", n}, {"t", t}, {"k", k}});
  }
  report.details = {{"k", k},
                    {"premise_holds_at", premise_at},
                    {"outcome", premise_at.empty() ? "vacuous" : "confirmed"}};
  return report;
}

}  // namespace choiceless::starcount
