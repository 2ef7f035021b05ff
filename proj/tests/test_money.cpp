#include "doctest.h"

#include "htax/market.hpp"
#include "htax/money.hpp"
#include "test_helpers.hpp"

using namespace htax;
using test::reference_params;

TEST_CASE("u128 decimal round trip") {
  CHECK(u128_to_string(0) == "0");
  CHECK(u128_to_string(u128{1} << 100) == "1267650600228229401496703205376");
  CHECK(u128_from_string("1267650600228229401496703205376") == u128{1} << 100);
  CHECK(u128_to_string(u128_max()) == "340282366920938463463374607431768211455");
  CHECK(u128_from_string(u128_to_string(u128_max())) == u128_max());
  CHECK_THROWS_AS(u128_from_string(""), Error);
  CHECK_THROWS_AS(u128_from_string("12x"), Error);
  CHECK_THROWS_AS(u128_from_string("-5"), Error);
  CHECK_THROWS_AS(u128_from_string("340282366920938463463374607431768211456"), Error);
}

TEST_CASE("checked arithmetic rejects overflow and negative results") {
  Money a = Money::from_u64(5);
  Money b = Money::from_u64(3);
  CHECK((a + b).raw() == 8);
  CHECK((a - b).raw() == 2);
  CHECK_THROWS_AS(b - a, Error);
  CHECK_THROWS_AS(Money(u128_max()) + Money::from_u64(1), Error);
  CHECK_THROWS_AS(checked_mul_u128(u128{1} << 64, u128{1} << 64), Error);
  CHECK(checked_mul_u128(u128{1} << 63, 2) == u128{1} << 64);
}

TEST_CASE("mul_div_floor") {
  CHECK(mul_div_floor(Money::from_u64(150), 200, 10000).raw() == 3);
  CHECK(mul_div_floor(Money::from_u64(150), 100, 10000).raw() == 1);
  CHECK(mul_div_floor(Money::from_u64(7), 1, 2).raw() == 3);
  CHECK(bps_of(Money::from_u64(150), 200).raw() == 3);
}

TEST_CASE("accrued_tax pro-rates the per-period rate over the span") {
  MarketParams p = reference_params();  // 10% per 100 s
  CHECK(accrued_tax(Money::from_u64(1000), 0, p).raw() == 0);
  CHECK(accrued_tax(Money::from_u64(1000), 100, p).raw() == 100);
  CHECK(accrued_tax(Money::from_u64(1000), 50, p).raw() == 50);
  CHECK(accrued_tax(Money::from_u64(1000), 33, p).raw() == 33);
  CHECK(accrued_tax(Money::from_u64(999), 33, p).raw() == 32);  // floor(999*1000*33/1e6)
  CHECK(accrued_tax(Money::from_u64(1000), 250, p).raw() == 250);  // spans may exceed one period
}

TEST_CASE("max_tax covers the span until trading close") {
  MarketParams p = reference_params();
  CHECK(max_tax(Money::from_u64(1000), 1100, 1200, p).raw() == 100);
  CHECK(max_tax(Money::from_u64(1000), 1150, 1200, p).raw() == 50);
  CHECK(max_tax(Money::from_u64(1000), 1200, 1200, p).raw() == 0);
  CHECK_THROWS_AS(max_tax(Money::from_u64(1000), 1201, 1200, p), Error);
  try {
    max_tax(Money::from_u64(1000), 1201, 1200, p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PurchaseAfterClose);
  }
}

TEST_CASE("tax floor never overcharges") {
  MarketParams p = reference_params();
  // floor-rounded per-span charges stay at or below the exact pro-rata value
  for (std::uint64_t price : {1ull, 7ull, 999ull, 123456789ull}) {
    for (Duration span : {0, 1, 33, 99, 100, 101, 1000}) {
      u128 exact_numerator = u128{price} * p.tax_bps * static_cast<u128>(span);
      u128 denominator = u128{10000} * static_cast<u128>(p.period);
      u128 charged = accrued_tax(Money::from_u64(price), span, p).raw();
      CHECK(charged * denominator <= exact_numerator);
      CHECK((charged + 1) * denominator > exact_numerator);
    }
  }
}
