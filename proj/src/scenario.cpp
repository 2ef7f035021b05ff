#include "htax/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace htax {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& where, const std::string& why) {
  fail(Errc::ValidationError, where + ": " + why);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_field(where, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) bad_field(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& where) {
  std::int64_t i = as_int(v, where);
  if (i < 0) bad_field(where, "expected a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

Money as_money(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return Money::from_u64(v.get<std::uint64_t>());
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) bad_field(where, "money amounts cannot be negative");
    return Money::from_u64(static_cast<std::uint64_t>(v.get<std::int64_t>()));
  }
  if (v.is_string()) {
    try {
      return Money::parse(v.get<std::string>());
    } catch (const Error&) {
      bad_field(where, "expected a decimal integer string");
    }
  }
  bad_field(where, "expected an integer or decimal string");
}

MarketParams parse_market(const json& m) {
  if (!m.is_object()) bad_field("market", "expected an object");
  MarketParams p;
  p.initial_timestamp = as_int(require(m, "initial_timestamp", "market"), "market.initial_timestamp");
  p.period = as_int(require(m, "period", "market"), "market.period");
  p.granularity = as_int(require(m, "granularity", "market"), "market.granularity");
  p.reporting_interval =
      as_int(require(m, "reporting_interval", "market"), "market.reporting_interval");
  p.tax_bps = static_cast<std::uint32_t>(as_uint(require(m, "tax_bps", "market"), "market.tax_bps"));
  if (m.contains("rate_scale")) p.rate_scale = static_cast<std::int32_t>(as_int(m["rate_scale"], "market.rate_scale"));
  if (m.contains("market_fee_bps"))
    p.market_fee_bps = static_cast<std::uint32_t>(as_uint(m["market_fee_bps"], "market.market_fee_bps"));
  if (m.contains("protocol_fee_bps"))
    p.protocol_fee_bps = static_cast<std::uint32_t>(as_uint(m["protocol_fee_bps"], "market.protocol_fee_bps"));
  if (m.contains("accounting_decimals"))
    p.accounting_decimals =
        static_cast<std::uint32_t>(as_uint(m["accounting_decimals"], "market.accounting_decimals"));
  if (m.contains("fee_recipient_market")) p.fee_recipient_market = m["fee_recipient_market"].get<std::string>();
  if (m.contains("fee_recipient_protocol"))
    p.fee_recipient_protocol = m["fee_recipient_protocol"].get<std::string>();
  p.validate();
  return p;
}

ActionKind parse_op(const std::string& op, const std::string& where) {
  if (op == "deposit") return ActionKind::Deposit;
  if (op == "buy") return ActionKind::Buy;
  if (op == "report") return ActionKind::Report;
  if (op == "resolve") return ActionKind::Resolve;
  if (op == "settle") return ActionKind::Settle;
  if (op == "withdraw") return ActionKind::Withdraw;
  bad_field(where, "unknown op '" + op + "'");
}

}  // namespace

const char* action_kind_name(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::Deposit: return "deposit";
    case ActionKind::Buy: return "buy";
    case ActionKind::Report: return "report";
    case ActionKind::Resolve: return "resolve";
    case ActionKind::Settle: return "settle";
    case ActionKind::Withdraw: return "withdraw";
  }
  return "?";
}

Scenario load_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::ParseError, e.what());
  }
  if (!doc.is_object()) fail(Errc::ParseError, "top level must be an object");

  Scenario sc;
  if (doc.contains("name")) sc.name = doc["name"].get<std::string>();
  sc.market = parse_market(require(doc, "market", "document"));

  if (doc.contains("price_path")) {
    const json& path = doc["price_path"];
    if (!path.is_array()) bad_field("price_path", "expected an array of [t, rate] pairs");
    Timestamp last = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      std::string where = "price_path[" + std::to_string(i) + "]";
      const json& pt = path[i];
      if (!pt.is_array() || pt.size() != 2) bad_field(where, "expected a [t, rate] pair");
      Timestamp t = as_int(pt[0], where + ".t");
      Rate rate = as_int(pt[1], where + ".rate");
      if (rate < 0) bad_field(where + ".rate", "rates cannot be negative");
      if (i > 0 && t <= last) bad_field(where + ".t", "price path timestamps must be strictly increasing");
      last = t;
      sc.price_path.emplace_back(t, rate);
    }
  }

  if (doc.contains("actions")) {
    const json& actions = doc["actions"];
    if (!actions.is_array()) bad_field("actions", "expected an array");
    Timestamp last = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      std::string where = "actions[" + std::to_string(i) + "]";
      const json& a = actions[i];
      if (!a.is_object()) bad_field(where, "expected an object");
      Action act;
      act.t = as_int(require(a, "t", where), where + ".t");
      if (i > 0 && act.t < last) bad_field(where + ".t", "action timestamps must be non-decreasing");
      last = act.t;
      act.actor = require(a, "actor", where).get<std::string>();
      if (act.actor.empty()) bad_field(where + ".actor", "actor cannot be empty");
      act.kind = parse_op(require(a, "op", where).get<std::string>(), where + ".op");
      switch (act.kind) {
        case ActionKind::Deposit:
          act.amount = as_money(require(a, "amount", where), where + ".amount");
          break;
        case ActionKind::Buy:
          act.frame = as_uint(require(a, "frame", where), where + ".frame");
          act.bin = as_uint(require(a, "bin", where), where + ".bin");
          act.price = as_money(require(a, "price", where), where + ".price");
          break;
        case ActionKind::Resolve:
        case ActionKind::Settle:
          act.frame = as_uint(require(a, "frame", where), where + ".frame");
          break;
        case ActionKind::Report:
        case ActionKind::Withdraw:
          break;
      }
      sc.actions.push_back(std::move(act));
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

}  // namespace htax
