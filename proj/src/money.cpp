#include "htax/money.hpp"

#include <algorithm>

namespace htax {

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

u128 u128_from_string(std::string_view text) {
  if (text.empty()) fail(Errc::ParseError, "empty integer literal");
  u128 v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') fail(Errc::ParseError, "invalid digit in integer literal '" + std::string(text) + "'");
    u128 digit = static_cast<u128>(c - '0');
    v = checked_add_u128(checked_mul_u128(v, 10), digit);
  }
  return v;
}

Money mul_div_floor(Money amount, u128 numerator, u128 denominator) {
  if (denominator == 0) fail(Errc::Overflow, "division by zero");
  return Money(checked_mul_u128(amount.raw(), numerator) / denominator);
}

}  // namespace htax
