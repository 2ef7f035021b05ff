#pragma once

#include "htax/types.hpp"

namespace htax {

struct FrameBounds {
  Timestamp k_start = 0;
  Timestamp k_end = 0;  // k_start + period
};

struct BinBounds {
  Rate lo = 0;  // inclusive
  Rate hi = 0;  // exclusive
};

/// Frame containing t, i.e. n with k_n <= t < k_n + period.
/// Throws TimeBeforeMarketDebut for t before the market debut.
FrameIndex frame_of_time(Timestamp t, const MarketParams& params);

FrameBounds frame_bounds(FrameIndex n, const MarketParams& params);

/// Bin containing the rate: m with m*Δo <= rate < (m+1)*Δo.
/// Boundary values belong to the upper bin. Throws NegativeRate.
BinIndex bin_of_rate(Rate rate, const MarketParams& params);

BinBounds bin_bounds(BinIndex m, const MarketParams& params);

/// Last instant the frame's lots can change hands is just before k_start;
/// tax spans end here.
Timestamp trading_close(FrameIndex n, const MarketParams& params);

/// End of the frame interval; the outcome becomes observable here.
Timestamp maturity(FrameIndex n, const MarketParams& params);

/// Purchases are allowed only into frames that start strictly after now.
bool is_valid_purchase_frame(FrameIndex n, Timestamp now, const MarketParams& params);

}  // namespace htax
