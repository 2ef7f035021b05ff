#include "htax/amm.hpp"

#include <algorithm>
#include <limits>

namespace htax {

void AmmPair::set_spot_rate(Timestamp t, Rate rate) {
  if (rate < 0) fail(Errc::NegativeRate, "rate=" + std::to_string(rate));
  u128 cum = 0;
  if (!points_.empty()) {
    const Point& last = points_.back();
    if (t <= last.t)
      fail(Errc::NonMonotonicTime, "t=" + std::to_string(t) + " not after last change-point " +
                                       std::to_string(last.t));
    u128 span = static_cast<u128>(t - last.t);
    cum = checked_add_u128(last.cumulative, checked_mul_u128(static_cast<u128>(last.rate), span));
  }
  points_.push_back(Point{t, rate, cum});
}

const AmmPair::Point& AmmPair::segment_at(Timestamp t) const {
  if (points_.empty() || t < points_.front().t)
    fail(Errc::TimeBeforePath, "no rate observable at t=" + std::to_string(t));
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](Timestamp lhs, const Point& p) { return lhs < p.t; });
  return *std::prev(it);
}

u128 AmmPair::cumulative_at(Timestamp t) const {
  const Point& seg = segment_at(t);
  u128 span = static_cast<u128>(t - seg.t);
  return checked_add_u128(seg.cumulative, checked_mul_u128(static_cast<u128>(seg.rate), span));
}

Rate AmmPair::spot_rate_at(Timestamp t) const { return segment_at(t).rate; }

Rate twap(u128 cum1, Timestamp t1, u128 cum2, Timestamp t2) {
  if (t2 <= t1) fail(Errc::ZeroInterval, "snapshot interval [" + std::to_string(t1) + ", " +
                                             std::to_string(t2) + "] has no positive length");
  if (cum2 < cum1) fail(Errc::NonMonotonicCumulative, "cumulative rate decreased");
  u128 mean = (cum2 - cum1) / static_cast<u128>(t2 - t1);
  if (mean > static_cast<u128>(std::numeric_limits<Rate>::max()))
    fail(Errc::Overflow, "TWAP beyond rate range");
  return static_cast<Rate>(mean);
}

}  // namespace htax
