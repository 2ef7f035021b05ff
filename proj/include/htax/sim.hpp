#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "htax/market.hpp"
#include "htax/scenario.hpp"

namespace htax {

/// An action the market refused; the refusal left no trace on the ledger.
struct RejectedAction {
  std::size_t index = 0;  // position in the scenario's action list
  Timestamp t = 0;
  AccountId actor;
  std::string op;
  std::string error;   // Errc name
  std::string detail;
};

/// Immutable outcome of one scenario run: the final market plus the list of
/// rejected actions. Serializes to a canonical machine report.
struct SimReport {
  std::string scenario_name;
  Market market;
  std::vector<RejectedAction> rejections;
  Timestamp as_of = 0;  // last scenario timestamp; frame states are reported at this instant

  nlohmann::json to_json() const;
  std::string to_json_text() const;  // canonical: sorted keys, 2-space indent, trailing newline
};

/// Execute the scenario: price-path points and actions interleave in global
/// time order, path points first at equal timestamps. Operation errors are
/// recorded as rejections; the run itself never aborts.
SimReport run_scenario(const Scenario& scenario);

/// Canonical machine report for an arbitrary market state.
nlohmann::json market_report_json(const Market& market, Timestamp as_of,
                                  const std::string& scenario_name = {},
                                  const std::vector<RejectedAction>& rejections = {});

struct Violation {
  std::string check;  // "conservation" | "pool_identity" | "full_distribution" | "report_format"
  std::string detail;
};

struct CheckSummary {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-audit a machine report from its own event log: replays every posting
/// against the reported final balances, recomputes each finalized pool from
/// the recorded purchase history and checks that every resolution
/// distributed its pool exactly. Violations are data, not errors.
CheckSummary verify_report(const nlohmann::json& report);

CheckSummary verify_report_text(const std::string& report_text);

/// Human-readable rendering of a machine report (balances, frames, event
/// log one record per line).
std::string render_table(const nlohmann::json& report);

}  // namespace htax
