#include <random>

#include "doctest.h"

#include "htax/amm.hpp"
#include "htax/market.hpp"
#include "test_helpers.hpp"

using namespace htax;
using test::reference_params;

TEST_CASE("set_spot_rate integrates the previous segment") {
  AmmPair pair;
  pair.set_spot_rate(0, 5);
  CHECK(pair.cumulative_at(0) == 0);
  pair.set_spot_rate(100, 7);
  CHECK(pair.cumulative_at(100) == 500);
  CHECK_THROWS_AS(pair.set_spot_rate(100, 9), Error);
  CHECK_THROWS_AS(pair.set_spot_rate(99, 9), Error);
  CHECK_THROWS_AS(pair.set_spot_rate(200, -1), Error);
}

TEST_CASE("cumulative_at interpolates the accumulator") {
  AmmPair pair;
  pair.set_spot_rate(0, 5);
  CHECK(pair.cumulative_at(0) == 0);
  CHECK(pair.cumulative_at(100) == 500);
  pair.set_spot_rate(100, 7);
  CHECK(pair.cumulative_at(150) == 850);
  CHECK(pair.spot_rate_at(99) == 5);
  CHECK(pair.spot_rate_at(100) == 7);
  CHECK_THROWS_AS(pair.cumulative_at(-1), Error);
  AmmPair fresh;
  CHECK_THROWS_AS(fresh.cumulative_at(0), Error);
}

TEST_CASE("twap arithmetic") {
  CHECK(twap(0, 0, 500, 100) == 5);
  CHECK(twap(500, 100, 850, 150) == 7);
  CHECK(twap(0, 0, 999, 100) == 9);  // floor
  CHECK_THROWS_AS(twap(0, 100, 0, 100), Error);
  CHECK_THROWS_AS(twap(0, 100, 0, 99), Error);
  CHECK_THROWS_AS(twap(500, 0, 400, 100), Error);
  try {
    twap(0, 100, 0, 100);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroInterval);
  }
}

namespace {

// Time-weighted mean over [t1, t2] summed segment by segment, floored; the
// independent route the cumulative accumulator must agree with.
Rate brute_force_twap(const std::vector<std::pair<Timestamp, Rate>>& path, Timestamp t1,
                      Timestamp t2) {
  u128 weighted = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    Timestamp seg_start = path[i].first;
    Timestamp seg_end = i + 1 < path.size() ? path[i + 1].first : t2;
    Timestamp lo = std::max(seg_start, t1);
    Timestamp hi = std::min(seg_end, t2);
    if (hi > lo) weighted += static_cast<u128>(path[i].second) * static_cast<u128>(hi - lo);
  }
  return static_cast<Rate>(weighted / static_cast<u128>(t2 - t1));
}

}  // namespace

TEST_CASE("twap equals the brute-force time-weighted mean") {
  std::mt19937_64 rng(20240811);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::pair<Timestamp, Rate>> path;
    AmmPair pair;
    Timestamp t = static_cast<Timestamp>(rng() % 1000);
    int segments = 1 + static_cast<int>(rng() % 20);
    for (int s = 0; s < segments; ++s) {
      Rate rate = static_cast<Rate>(rng() % 10000);
      path.emplace_back(t, rate);
      pair.set_spot_rate(t, rate);
      t += 1 + static_cast<Timestamp>(rng() % 500);
    }
    Timestamp first = path.front().first;
    Timestamp t1 = first + static_cast<Timestamp>(rng() % 1000);
    Timestamp t2 = t1 + 1 + static_cast<Timestamp>(rng() % 1000);
    Rate via_cumulative = twap(pair.cumulative_at(t1), t1, pair.cumulative_at(t2), t2);
    CHECK(via_cumulative == brute_force_twap(path, t1, t2));
  }
}

TEST_CASE("constant path means TWAP equals the constant for any timing") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 100; ++round) {
    Rate rate = static_cast<Rate>(rng() % 100000);
    AmmPair pair;
    pair.set_spot_rate(0, rate);
    Timestamp t1 = static_cast<Timestamp>(rng() % 10000);
    Timestamp t2 = t1 + 1 + static_cast<Timestamp>(rng() % 10000);
    CHECK(twap(pair.cumulative_at(t1), t1, pair.cumulative_at(t2), t2) == rate);
  }
}

namespace {

/// Market with one purchased lot in frame 1 ([1100, 1200), t_rep 30) so the
/// frame record exists and snapshots may land.
Market market_with_frame1() {
  Market market{reference_params()};
  market.deposit("A", Money::from_u64(1000), 900);
  market.buy_lot(LotId{FrameIndex{1}, BinIndex{0}}, "A", Money::from_u64(100), 1050);
  return market;
}

}  // namespace

TEST_CASE("report_snapshot window placement") {
  Market market = market_with_frame1();
  market.amm().set_spot_rate(0, 5);

  // frame 1: window1 = [1100, 1170], window2 = (1170, 1200]
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::Window1);
  CHECK(market.report_snapshot(FrameIndex{1}, 1170) == SnapshotOutcome::Window1);
  CHECK(market.report_snapshot(FrameIndex{1}, 1171) == SnapshotOutcome::Window2);
  CHECK(market.report_snapshot(FrameIndex{1}, 1200) == SnapshotOutcome::Window2);
  CHECK(market.report_snapshot(FrameIndex{1}, 1099) == SnapshotOutcome::None);
  CHECK(market.report_snapshot(FrameIndex{1}, 1201) == SnapshotOutcome::None);
  // no record for frame 7: silent no-op
  CHECK(market.report_snapshot(FrameIndex{7}, 1150) == SnapshotOutcome::None);
}

TEST_CASE("later snapshots overwrite earlier ones within a window") {
  Market market = market_with_frame1();
  market.amm().set_spot_rate(0, 5);
  CHECK(market.report_snapshot(FrameIndex{1}, 1120) == SnapshotOutcome::Window1);
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::Window1);
  const FrameRecord* rec = market.frame(FrameIndex{1});
  REQUIRE(rec);
  REQUIRE(rec->reporting.window1.has_value());
  CHECK(rec->reporting.window1->taken_at == 1150);
  CHECK_FALSE(rec->reporting.window2.has_value());
}

TEST_CASE("report_snapshot without an observable rate is a no-op") {
  Market market = market_with_frame1();  // empty price path
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::None);
  market.amm().set_spot_rate(1160, 5);
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::None);  // before path
  CHECK(market.report_snapshot(FrameIndex{1}, 1165) == SnapshotOutcome::Window1);
}

TEST_CASE("report_snapshot touches only the reporting state of frame n") {
  Market market = market_with_frame1();
  market.deposit("B", Money::from_u64(1000), 900);
  market.buy_lot(LotId{FrameIndex{2}, BinIndex{3}}, "B", Money::from_u64(100), 1050);
  market.amm().set_spot_rate(0, 5);

  auto balances_before = market.balances();
  Money pool1 = market.pool_balance(FrameIndex{1});
  Money pool2 = market.pool_balance(FrameIndex{2});
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::Window1);
  CHECK(market.balances() == balances_before);
  CHECK(market.pool_balance(FrameIndex{1}) == pool1);
  CHECK(market.pool_balance(FrameIndex{2}) == pool2);
  CHECK_FALSE(market.frame(FrameIndex{2})->reporting.window1.has_value());
}

TEST_CASE("reported_rate divides by the actual snapshot spacing") {
  Market market = market_with_frame1();
  market.amm().set_spot_rate(0, 5);
  market.amm().set_spot_rate(1150, 6);
  // cum(1150) = 5*1150 = 5750, cum(1185) = 5750 + 6*35 = 5960
  CHECK(market.report_snapshot(FrameIndex{1}, 1150) == SnapshotOutcome::Window1);
  CHECK(market.report_snapshot(FrameIndex{1}, 1185) == SnapshotOutcome::Window2);
  CHECK(market.reported_rate(FrameIndex{1}) == 6);  // (5960-5750)/35
}

TEST_CASE("reported_rate names the missing window") {
  Market market = market_with_frame1();
  market.amm().set_spot_rate(0, 5);
  CHECK_THROWS_AS(market.reported_rate(FrameIndex{1}), Error);
  market.report_snapshot(FrameIndex{1}, 1150);
  try {
    market.reported_rate(FrameIndex{1});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingSnapshot);
    CHECK(std::string(e.what()).find("window2") != std::string::npos);
  }
}

TEST_CASE("reported_rate stays within the spot range of the interval") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 50; ++round) {
    Market market = market_with_frame1();
    Rate lo_seen = -1, hi_seen = -1;
    Timestamp t = 1000;
    market.amm().set_spot_rate(900, static_cast<Rate>(rng() % 1000));
    Timestamp t1 = 1100 + static_cast<Timestamp>(rng() % 71);
    Timestamp t2 = 1171 + static_cast<Timestamp>(rng() % 30);
    while (t < 1250) {
      market.amm().set_spot_rate(t, static_cast<Rate>(rng() % 1000));
      t += 1 + static_cast<Timestamp>(rng() % 40);
    }
    market.report_snapshot(FrameIndex{1}, t1);
    market.report_snapshot(FrameIndex{1}, t2);
    Rate reported = market.reported_rate(FrameIndex{1});
    for (Timestamp q = t1; q <= t2; ++q) {
      Rate s = market.amm().spot_rate_at(q);
      if (lo_seen < 0 || s < lo_seen) lo_seen = s;
      if (s > hi_seen) hi_seen = s;
    }
    CHECK(reported >= lo_seen);
    CHECK(reported <= hi_seen);
  }
}
