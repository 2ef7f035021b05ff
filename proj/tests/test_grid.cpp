#include "doctest.h"

#include "htax/grid.hpp"
#include "htax/market.hpp"
#include "test_helpers.hpp"

using namespace htax;
using test::reference_params;

TEST_CASE("frame_of_time maps instants to frames") {
  MarketParams p = reference_params();
  CHECK(frame_of_time(1000, p).n == 0);  // debut boundary
  CHECK(frame_of_time(1150, p).n == 1);
  CHECK(frame_of_time(1099, p).n == 0);
  CHECK(frame_of_time(1100, p).n == 1);
  CHECK_THROWS_AS(frame_of_time(999, p), Error);
  try {
    frame_of_time(999, p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TimeBeforeMarketDebut);
  }
}

TEST_CASE("frame_bounds") {
  MarketParams p = reference_params();
  CHECK(frame_bounds(FrameIndex{0}, p).k_start == 1000);
  CHECK(frame_bounds(FrameIndex{0}, p).k_end == 1100);
  CHECK(frame_bounds(FrameIndex{2}, p).k_start == 1200);
  CHECK(frame_bounds(FrameIndex{2}, p).k_end == 1300);

  MarketParams daily = reference_params();
  daily.initial_timestamp = 0;
  daily.period = 86400;
  CHECK(frame_bounds(FrameIndex{10}, daily).k_start == 864000);
  CHECK(frame_bounds(FrameIndex{10}, daily).k_end == 950400);
}

TEST_CASE("frame round trip") {
  MarketParams p = reference_params();
  for (std::uint64_t n = 0; n < 500; ++n) {
    FrameBounds b = frame_bounds(FrameIndex{n}, p);
    CHECK(frame_of_time(b.k_start, p).n == n);
    CHECK(frame_of_time(b.k_end - 1, p).n == n);
    CHECK(frame_of_time(b.k_end, p).n == n + 1);
  }
}

TEST_CASE("bin_of_rate quantizes with boundary to the upper bin") {
  MarketParams p = reference_params();
  CHECK(bin_of_rate(0, p).m == 0);
  CHECK(bin_of_rate(25, p).m == 2);
  CHECK(bin_of_rate(30, p).m == 3);  // 30 is not inside bin 2: the upper bound is exclusive
  CHECK(bin_of_rate(29, p).m == 2);
  CHECK_THROWS_AS(bin_of_rate(-1, p), Error);
  try {
    bin_of_rate(-1, p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NegativeRate);
  }
}

TEST_CASE("bin bounds round trip") {
  MarketParams p = reference_params();
  for (std::uint64_t m = 0; m < 300; ++m) {
    BinBounds b = bin_bounds(BinIndex{m}, p);
    CHECK(bin_of_rate(b.lo, p).m == m);
    CHECK(bin_of_rate(b.hi, p).m == m + 1);
  }
}

TEST_CASE("is_valid_purchase_frame requires a strictly later frame start") {
  MarketParams p = reference_params();
  CHECK(is_valid_purchase_frame(FrameIndex{1}, 1050, p));
  CHECK_FALSE(is_valid_purchase_frame(FrameIndex{0}, 1050, p));
  CHECK_FALSE(is_valid_purchase_frame(FrameIndex{1}, 1100, p));  // boundary: k_start == now
  CHECK(is_valid_purchase_frame(FrameIndex{2}, 1100, p));
}

TEST_CASE("trading close and maturity bracket the frame") {
  MarketParams p = reference_params();
  CHECK(trading_close(FrameIndex{2}, p) == 1200);
  CHECK(maturity(FrameIndex{2}, p) == 1300);
  for (std::uint64_t n = 0; n < 50; ++n)
    CHECK(maturity(FrameIndex{n}, p) - trading_close(FrameIndex{n}, p) == p.period);
}

TEST_CASE("exactly one frame is Closed at any instant, later ones Opened") {
  MarketParams p = reference_params();
  Market market{p};
  for (Timestamp now : {1000, 1001, 1099, 1100, 1250, 1999}) {
    int closed = 0;
    bool seen_closed = false;
    for (std::uint64_t n = 0; n < 30; ++n) {
      ContractState s = market.contract_state(FrameIndex{n}, now);
      if (s == ContractState::Closed) {
        ++closed;
        seen_closed = true;
      } else if (seen_closed) {
        CHECK(s == ContractState::Opened);
      } else {
        CHECK(s == ContractState::Matured);
      }
      CHECK(is_valid_purchase_frame(FrameIndex{n}, now, p) == (s == ContractState::Opened));
    }
    CHECK(closed == 1);
  }
}

TEST_CASE("contract_state follows the clock") {
  Market market{reference_params()};
  CHECK(market.contract_state(FrameIndex{2}, 1150) == ContractState::Opened);
  CHECK(market.contract_state(FrameIndex{1}, 1150) == ContractState::Closed);
  CHECK(market.contract_state(FrameIndex{0}, 1150) == ContractState::Matured);
}

TEST_CASE("parameter validation") {
  MarketParams p = reference_params();
  CHECK_NOTHROW(p.validate());

  MarketParams bad = p;
  bad.period = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = p;
  bad.granularity = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = p;
  bad.reporting_interval = bad.period;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = p;
  bad.reporting_interval = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = p;
  bad.tax_bps = 10001;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = p;
  bad.market_fee_bps = 6000;
  bad.protocol_fee_bps = 5000;
  CHECK_THROWS_AS(bad.validate(), Error);
}
