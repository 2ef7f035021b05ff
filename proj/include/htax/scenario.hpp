#pragma once

#include <string>
#include <utility>
#include <vector>

#include "htax/money.hpp"
#include "htax/types.hpp"

namespace htax {

enum class ActionKind { Deposit, Buy, Report, Resolve, Settle, Withdraw };

const char* action_kind_name(ActionKind kind) noexcept;

struct Action {
  Timestamp t = 0;
  AccountId actor;
  ActionKind kind = ActionKind::Deposit;
  Money amount;             // deposit
  std::uint64_t frame = 0;  // buy / resolve / settle
  std::uint64_t bin = 0;    // buy
  Money price;              // buy
};

/// A declarative, fully deterministic script: market parameters, the pair's
/// spot-rate path and timestamped participant actions.
struct Scenario {
  std::string name;
  MarketParams market;
  std::vector<std::pair<Timestamp, Rate>> price_path;  // strictly increasing timestamps
  std::vector<Action> actions;                         // non-decreasing timestamps
};

/// Parse and validate a scenario document (JSON). Throws ParseError with the
/// offending location or ValidationError naming the field.
Scenario load_scenario(const std::string& text);

/// Same, reading from a file. I/O failures raise std::runtime_error.
Scenario load_scenario_file(const std::string& path);

}  // namespace htax
