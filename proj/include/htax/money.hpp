#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "htax/errors.hpp"

namespace htax {

using u128 = unsigned __int128;

constexpr u128 u128_max() { return ~u128{0}; }

inline u128 checked_add_u128(u128 a, u128 b) {
  u128 r = a + b;
  if (r < a) fail(Errc::Overflow, "u128 addition overflow");
  return r;
}

inline u128 checked_sub_u128(u128 a, u128 b) {
  if (b > a) fail(Errc::Underflow, "u128 subtraction below zero");
  return a - b;
}

inline u128 checked_mul_u128(u128 a, u128 b) {
  if (a != 0 && b > u128_max() / a) fail(Errc::Overflow, "u128 multiplication overflow");
  return a * b;
}

std::string u128_to_string(u128 v);
u128 u128_from_string(std::string_view text);  // ParseError on non-digits or overflow

/// Amount of the accounting token in minor units. Never negative; every
/// arithmetic step is overflow-checked.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(u128 minor) : minor_(minor) {}

  static constexpr Money from_u64(std::uint64_t v) { return Money(u128{v}); }
  static Money parse(std::string_view text) { return Money(u128_from_string(text)); }

  constexpr u128 raw() const { return minor_; }
  constexpr bool is_zero() const { return minor_ == 0; }
  std::string to_string() const { return u128_to_string(minor_); }

  Money operator+(Money o) const { return Money(checked_add_u128(minor_, o.minor_)); }
  Money operator-(Money o) const { return Money(checked_sub_u128(minor_, o.minor_)); }
  Money& operator+=(Money o) { minor_ = checked_add_u128(minor_, o.minor_); return *this; }
  Money& operator-=(Money o) { minor_ = checked_sub_u128(minor_, o.minor_); return *this; }

  friend constexpr bool operator==(Money, Money) = default;
  friend constexpr auto operator<=>(Money a, Money b) { return a.minor_ <=> b.minor_; }

 private:
  u128 minor_ = 0;
};

/// floor(amount * numerator / denominator), exact in 128-bit integers.
Money mul_div_floor(Money amount, u128 numerator, u128 denominator);

/// floor(amount * bps / 10000)
inline Money bps_of(Money amount, std::uint32_t bps) { return mul_div_floor(amount, bps, 10000); }

}  // namespace htax
