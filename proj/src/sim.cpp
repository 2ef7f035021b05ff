#include "htax/sim.hpp"

#include <algorithm>

namespace htax {

using nlohmann::json;

namespace {

json money_json(Money m) { return m.to_string(); }

json event_json(const LedgerEvent& ev) {
  json e;
  e["seq"] = ev.seq;
  e["t"] = ev.t;
  e["kind"] = event_kind_name(ev.kind);
  if (!ev.from_bucket.empty()) {
    e["from"] = ev.from_bucket;
    e["to"] = ev.to_bucket;
    e["amount"] = money_json(ev.amount);
  }
  if (!ev.account.empty()) e["account"] = ev.account;
  if (ev.frame) e["frame"] = *ev.frame;
  if (ev.bin) e["bin"] = *ev.bin;
  if (ev.price) e["price"] = money_json(*ev.price);
  if (ev.escrow) e["escrow"] = money_json(*ev.escrow);
  if (ev.acquisition) e["acquisition"] = money_json(*ev.acquisition);
  if (ev.rate) e["rate"] = *ev.rate;
  if (ev.cumulative) e["cumulative"] = u128_to_string(*ev.cumulative);
  if (!ev.note.empty()) e["note"] = ev.note;
  return e;
}

json params_json(const MarketParams& p) {
  json m;
  m["initial_timestamp"] = p.initial_timestamp;
  m["period"] = p.period;
  m["granularity"] = p.granularity;
  m["rate_scale"] = p.rate_scale;
  m["tax_bps"] = p.tax_bps;
  m["market_fee_bps"] = p.market_fee_bps;
  m["protocol_fee_bps"] = p.protocol_fee_bps;
  m["reporting_interval"] = p.reporting_interval;
  m["accounting_decimals"] = p.accounting_decimals;
  if (!p.fee_recipient_market.empty()) m["fee_recipient_market"] = p.fee_recipient_market;
  if (!p.fee_recipient_protocol.empty()) m["fee_recipient_protocol"] = p.fee_recipient_protocol;
  return m;
}

json resolution_json(const Resolution& r) {
  json res;
  res["pool"] = money_json(r.pool);
  res["reward"] = money_json(r.reward);
  res["fee_market"] = money_json(r.fee_market);
  res["fee_protocol"] = money_json(r.fee_protocol);
  res["dust"] = money_json(r.dust);
  res["resolved_at"] = r.resolved_at;
  if (r.reported_rate) res["reported_rate"] = *r.reported_rate;
  if (r.winning_bin) res["winning_bin"] = r.winning_bin->m;
  if (r.winner) res["winner"] = *r.winner;
  if (r.invalid_reason) res["invalid_reason"] = invalid_reason_name(*r.invalid_reason);
  return res;
}

json frame_json(const FrameRecord& rec, const Market& market, Timestamp as_of) {
  const MarketParams& params = market.params();
  FrameBounds bounds = frame_bounds(rec.frame, params);
  json f;
  f["frame"] = rec.frame.n;
  f["k_start"] = bounds.k_start;
  f["k_end"] = bounds.k_end;
  f["pool_remaining"] = money_json(rec.pool);
  f["finalized"] = rec.taxes_finalized;
  f["state"] = contract_state_name(market.contract_state(rec.frame, as_of));

  json lots = json::array();
  for (const auto& [bin, owned] : rec.ownerships) {
    json o;
    o["bin"] = bin;
    o["owner"] = owned.owner;
    o["price"] = money_json(owned.price);
    o["acquired_at"] = owned.acquired_at;
    o["escrow"] = money_json(owned.escrowed_max_tax);
    lots.push_back(std::move(o));
  }
  f["ownerships"] = std::move(lots);

  json taxes = json::object();
  for (const auto& [account, paid] : rec.tax_paid) taxes[account] = money_json(paid);
  f["tax_paid"] = std::move(taxes);

  json reporting = json::object();
  auto snap_json = [](const Snapshot& s) {
    json v;
    v["t"] = s.taken_at;
    v["cumulative"] = u128_to_string(s.cumulative);
    return v;
  };
  if (rec.reporting.window1) reporting["window1"] = snap_json(*rec.reporting.window1);
  if (rec.reporting.window2) reporting["window2"] = snap_json(*rec.reporting.window2);
  f["reporting"] = std::move(reporting);

  if (rec.resolution) f["resolution"] = resolution_json(*rec.resolution);

  json settlements = json::array();
  for (const auto& [account, entry] : rec.settlements) {
    json s;
    s["account"] = account;
    s["claimable"] = money_json(entry.claimable);
    s["claimed"] = entry.claimed;
    settlements.push_back(std::move(s));
  }
  f["settlements"] = std::move(settlements);
  return f;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

json market_report_json(const Market& market, Timestamp as_of, const std::string& scenario_name,
                        const std::vector<RejectedAction>& rejections) {
  json doc;
  doc["format"] = "htax-report-v1";
  if (!scenario_name.empty()) doc["scenario"] = scenario_name;
  doc["as_of"] = as_of;
  doc["params"] = params_json(market.params());

  json balances = json::object();
  for (const auto& [account, free] : market.balances()) balances[account] = money_json(free);
  doc["balances"] = std::move(balances);

  LedgerTotals t = market.totals();
  json totals;
  totals["deposited"] = money_json(t.total_deposited);
  totals["withdrawn"] = money_json(t.total_withdrawn);
  totals["custody"] = money_json(t.custody);
  totals["fee_market"] = money_json(t.fee_market);
  totals["fee_protocol"] = money_json(t.fee_protocol);
  totals["pool_sum"] = money_json(t.pool_sum);
  totals["free_sum"] = money_json(t.free_sum);
  totals["conservation_ok"] = market.conservation_holds();
  doc["totals"] = std::move(totals);

  json frames = json::array();
  for (const auto& [n, rec] : market.frames()) frames.push_back(frame_json(rec, market, as_of));
  doc["frames"] = std::move(frames);

  json events = json::array();
  for (const LedgerEvent& ev : market.events()) events.push_back(event_json(ev));
  std::string events_text = events.dump();
  doc["events"] = std::move(events);
  doc["checksum"] = "fnv1a:" + hex64(fnv1a64(events_text));

  json rejected = json::array();
  for (const RejectedAction& r : rejections) {
    json v;
    v["index"] = r.index;
    v["t"] = r.t;
    v["actor"] = r.actor;
    v["op"] = r.op;
    v["error"] = r.error;
    v["detail"] = r.detail;
    rejected.push_back(std::move(v));
  }
  doc["rejections"] = std::move(rejected);
  return doc;
}

json SimReport::to_json() const { return market_report_json(market, as_of, scenario_name, rejections); }

std::string SimReport::to_json_text() const { return to_json().dump(2) + "\n"; }

SimReport run_scenario(const Scenario& scenario) {
  SimReport report{scenario.name, Market(scenario.market), {}, scenario.market.initial_timestamp};
  Market& market = report.market;

  if (!scenario.price_path.empty())
    report.as_of = std::max(report.as_of, scenario.price_path.back().first);
  if (!scenario.actions.empty())
    report.as_of = std::max(report.as_of, scenario.actions.back().t);

  std::size_t next_point = 0;
  auto advance_amm_to = [&](Timestamp t) {
    while (next_point < scenario.price_path.size() && scenario.price_path[next_point].first <= t) {
      auto [pt, rate] = scenario.price_path[next_point];
      market.amm().set_spot_rate(pt, rate);
      ++next_point;
    }
  };

  for (std::size_t i = 0; i < scenario.actions.size(); ++i) {
    const Action& a = scenario.actions[i];
    advance_amm_to(a.t);
    try {
      switch (a.kind) {
        case ActionKind::Deposit:
          market.deposit(a.actor, a.amount, a.t);
          break;
        case ActionKind::Buy:
          market.buy_lot(LotId{FrameIndex{a.frame}, BinIndex{a.bin}}, a.actor, a.price, a.t);
          break;
        case ActionKind::Report:
          market.report_at(a.t);
          break;
        case ActionKind::Resolve:
          market.resolve(FrameIndex{a.frame}, a.t);
          break;
        case ActionKind::Settle:
          market.settle(FrameIndex{a.frame}, a.actor, a.t);
          break;
        case ActionKind::Withdraw:
          market.withdraw(a.actor, a.t);
          break;
      }
    } catch (const Error& e) {
      report.rejections.push_back(RejectedAction{i, a.t, a.actor, action_kind_name(a.kind),
                                                 errc_name(e.code()), e.what()});
    }
  }
  advance_amm_to(report.as_of);
  return report;
}

}  // namespace htax
