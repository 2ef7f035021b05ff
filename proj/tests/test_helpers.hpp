#pragma once

#include <cstdlib>
#include <string>

#include "htax/types.hpp"

namespace htax::test {

/// initial=1000, period=100, Δo=10, 10%/period tax, 2%+1% fees, t_rep=30.
/// Most worked examples in the test suite use this market.
inline MarketParams reference_params() {
  MarketParams p;
  p.initial_timestamp = 1000;
  p.period = 100;
  p.granularity = 10;
  p.rate_scale = 0;
  p.tax_bps = 1000;
  p.market_fee_bps = 200;
  p.protocol_fee_bps = 100;
  p.reporting_interval = 30;
  p.accounting_decimals = 6;
  return p;
}

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

inline std::string scenario_dir() { return env_or("HTAX_SCENARIOS", "scenarios"); }

}  // namespace htax::test
