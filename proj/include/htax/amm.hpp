#pragma once

#include <vector>

#include "htax/money.hpp"
#include "htax/types.hpp"

namespace htax {

/// Simulated exchange pair: a piecewise-constant spot-rate path with an exact
/// cumulative accumulator, the observable interface a TWAP consumer needs.
/// Reserve mechanics are not modeled.
class AmmPair {
 public:
  struct Point {
    Timestamp t = 0;
    Rate rate = 0;
    u128 cumulative = 0;  // integral of the rate up to t
  };

  /// Append a change-point. t must be strictly after the previous one
  /// (NonMonotonicTime) and rate non-negative (NegativeRate).
  void set_spot_rate(Timestamp t, Rate rate);

  /// Integral of the spot rate over [first change-point, t].
  /// Throws TimeBeforePath if the path is empty or starts after t.
  u128 cumulative_at(Timestamp t) const;

  /// Spot rate in force at t (the last change-point at or before t).
  Rate spot_rate_at(Timestamp t) const;

  bool empty() const { return points_.empty(); }
  const std::vector<Point>& path() const { return points_; }

 private:
  const Point& segment_at(Timestamp t) const;
  std::vector<Point> points_;
};

/// floor((cum2 - cum1) / (t2 - t1)). Throws ZeroInterval when t2 <= t1 and
/// NonMonotonicCumulative when cum2 < cum1.
Rate twap(u128 cum1, Timestamp t1, u128 cum2, Timestamp t2);

}  // namespace htax
