#include "htax/grid.hpp"

#include <limits>

#include "htax/money.hpp"

namespace htax {

namespace {

using i128 = __int128;

Timestamp narrow_time(i128 v, const char* what) {
  if (v > std::numeric_limits<Timestamp>::max() || v < std::numeric_limits<Timestamp>::min())
    fail(Errc::Overflow, what);
  return static_cast<Timestamp>(v);
}

}  // namespace

const char* contract_state_name(ContractState state) noexcept {
  switch (state) {
    case ContractState::Created: return "Created";
    case ContractState::Opened: return "Opened";
    case ContractState::Closed: return "Closed";
    case ContractState::Matured: return "Matured";
    case ContractState::Reported: return "Reported";
    case ContractState::Resolved: return "Resolved";
    case ContractState::Settled: return "Settled";
    case ContractState::Invalid: return "Invalid";
  }
  return "?";
}

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::TimeBeforeMarketDebut: return "TimeBeforeMarketDebut";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::Overflow: return "Overflow";
    case Errc::Underflow: return "Underflow";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::InsufficientBalance: return "InsufficientBalance";
    case Errc::PurchaseAfterClose: return "PurchaseAfterClose";
    case Errc::FrameStillOpen: return "FrameStillOpen";
    case Errc::AlreadyFinalized: return "AlreadyFinalized";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::TimeBeforePath: return "TimeBeforePath";
    case Errc::ZeroInterval: return "ZeroInterval";
    case Errc::NonMonotonicCumulative: return "NonMonotonicCumulative";
    case Errc::MissingSnapshot: return "MissingSnapshot";
    case Errc::NotMatured: return "NotMatured";
    case Errc::AlreadyResolved: return "AlreadyResolved";
    case Errc::NotResolved: return "NotResolved";
    case Errc::NothingToClaim: return "NothingToClaim";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "?";
}

void MarketParams::validate() const {
  if (period <= 0) fail(Errc::ValidationError, "period must be > 0");
  if (granularity <= 0) fail(Errc::ValidationError, "granularity must be > 0");
  if (reporting_interval <= 0) fail(Errc::ValidationError, "reporting_interval must be > 0");
  if (reporting_interval >= period) fail(Errc::ValidationError, "reporting_interval must be < period");
  if (tax_bps > 10000) fail(Errc::ValidationError, "tax_bps must be <= 10000");
  if (market_fee_bps + protocol_fee_bps > 10000)
    fail(Errc::ValidationError, "market_fee_bps + protocol_fee_bps must be <= 10000");
  if (rate_scale < 0 || rate_scale > 38) fail(Errc::ValidationError, "rate_scale must be in [0, 38]");
}

FrameIndex frame_of_time(Timestamp t, const MarketParams& params) {
  if (t < params.initial_timestamp)
    fail(Errc::TimeBeforeMarketDebut, "t=" + std::to_string(t) + " precedes market debut " +
                                          std::to_string(params.initial_timestamp));
  i128 offset = i128{t} - i128{params.initial_timestamp};
  return FrameIndex{static_cast<std::uint64_t>(offset / params.period)};
}

FrameBounds frame_bounds(FrameIndex n, const MarketParams& params) {
  i128 start = i128{params.initial_timestamp} + i128{params.period} * static_cast<i128>(n.n);
  return FrameBounds{narrow_time(start, "frame start beyond time range"),
                     narrow_time(start + params.period, "frame end beyond time range")};
}

BinIndex bin_of_rate(Rate rate, const MarketParams& params) {
  if (rate < 0) fail(Errc::NegativeRate, "rate=" + std::to_string(rate));
  return BinIndex{static_cast<std::uint64_t>(rate / params.granularity)};
}

BinBounds bin_bounds(BinIndex m, const MarketParams& params) {
  i128 lo = i128{params.granularity} * static_cast<i128>(m.m);
  i128 hi = lo + params.granularity;
  if (hi > std::numeric_limits<Rate>::max()) fail(Errc::Overflow, "bin bound beyond rate range");
  return BinBounds{static_cast<Rate>(lo), static_cast<Rate>(hi)};
}

Timestamp trading_close(FrameIndex n, const MarketParams& params) {
  return frame_bounds(n, params).k_start;
}

Timestamp maturity(FrameIndex n, const MarketParams& params) {
  return frame_bounds(n, params).k_end;
}

bool is_valid_purchase_frame(FrameIndex n, Timestamp now, const MarketParams& params) {
  return frame_bounds(n, params).k_start > now;
}

}  // namespace htax
