#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "htax/errors.hpp"

namespace htax {

using Timestamp = std::int64_t;  // Unix seconds
using Duration = std::int64_t;   // seconds
using Rate = std::int64_t;       // scaled rate units, non-negative by invariant
using AccountId = std::string;

/// Time slice n of the lot grid; the frame interval is [k_n, k_n + period).
struct FrameIndex {
  std::uint64_t n = 0;
  friend constexpr bool operator==(FrameIndex, FrameIndex) = default;
  friend constexpr auto operator<=>(FrameIndex a, FrameIndex b) { return a.n <=> b.n; }
};

/// Outcome slice m of width `granularity`; the bin interval is [m*Δo, (m+1)*Δo).
struct BinIndex {
  std::uint64_t m = 0;
  friend constexpr bool operator==(BinIndex, BinIndex) = default;
  friend constexpr auto operator<=>(BinIndex a, BinIndex b) { return a.m <=> b.m; }
};

/// One tradable cell of the (time x outcome) grid.
struct LotId {
  FrameIndex frame;
  BinIndex bin;
  friend constexpr bool operator==(LotId, LotId) = default;
};

enum class ContractState {
  Created,
  Opened,
  Closed,
  Matured,
  Reported,
  Resolved,
  Settled,
  Invalid,
};

const char* contract_state_name(ContractState state) noexcept;

/// Market configuration. Rates are integers pre-scaled by 10^rate_scale;
/// money amounts are minor units of the accounting token.
struct MarketParams {
  Timestamp initial_timestamp = 0;       // market debut
  Duration period = 0;                   // frame length, seconds
  Rate granularity = 0;                  // bin width in scaled rate units
  std::int32_t rate_scale = 0;           // power-of-ten exponent of rate values
  std::uint32_t tax_bps = 0;             // tax per full period of ownership, basis points
  std::uint32_t market_fee_bps = 0;      // pool share for the market operator
  std::uint32_t protocol_fee_bps = 0;    // pool share for the platform
  Duration reporting_interval = 0;       // TWAP window, 0 < t_rep < period
  std::uint32_t accounting_decimals = 0; // minor-unit exponent, display only
  AccountId fee_recipient_market;        // optional labels for the fee buckets
  AccountId fee_recipient_protocol;

  /// Throws Error(ValidationError) naming the offending field.
  void validate() const;
};

}  // namespace htax
