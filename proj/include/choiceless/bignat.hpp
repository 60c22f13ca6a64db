#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace choiceless {

/// Arbitrary-precision natural number. Only non-negative values are produced
/// by this library; the signed backend keeps subtraction in intermediate
/// expressions well-defined.
using BigNat = boost::multiprecision::cpp_int;

inline BigNat parse_bignat(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty natural number");
  for (char ch : text) {
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("not a natural number: '" + std::string(text) + "'");
    }
  }
  return BigNat(std::string(text));
}

inline std::string to_decimal(const BigNat& value) { return value.str(); }

inline BigNat pow2(std::size_t exponent) { return BigNat(1) << exponent; }

inline bool is_power_of_two(const BigNat& value) {
  if (value <= 0) return false;
  return boost::multiprecision::msb(value) == boost::multiprecision::lsb(value);
}

/// Index of the single set bit. Precondition: is_power_of_two(value).
inline std::size_t log2_exact(const BigNat& value) {
  return static_cast<std::size_t>(boost::multiprecision::msb(value));
}

inline BigNat factorial(std::size_t n) {
  BigNat result = 1;
  for (std::size_t i = 2; i <= n; ++i) result *= i;
  return result;
}

/// Conversion with a range check; throws std::out_of_range when the value does
/// not fit.
inline std::uint64_t to_u64(const BigNat& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) {
    throw std::out_of_range("natural number does not fit in 64 bits: " + value.str());
  }
  return value.convert_to<std::uint64_t>();
}

}  // namespace choiceless
