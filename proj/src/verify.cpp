#include <iomanip>
#include <map>
#include <sstream>

#include "htax/sim.hpp"

namespace htax {

using nlohmann::json;

namespace {

bool parse_amount(const json& v, u128& out) {
  try {
    if (v.is_string()) {
      out = u128_from_string(v.get<std::string>());
      return true;
    }
    if (v.is_number_unsigned()) {
      out = u128{v.get<std::uint64_t>()};
      return true;
    }
  } catch (const Error&) {
  }
  return false;
}

u128 accrued_from_log(u128 price, std::uint64_t tax_bps, std::int64_t span, std::int64_t period) {
  return checked_mul_u128(checked_mul_u128(price, u128{tax_bps}), static_cast<u128>(span)) /
         (u128{10000} * static_cast<u128>(period));
}

struct PurchasePoint {
  Timestamp t;
  u128 price;
};

}  // namespace

CheckSummary verify_report(const json& report) {
  CheckSummary summary;
  auto violate = [&](const char* check, const std::string& detail) {
    summary.violations.push_back(Violation{check, detail});
  };

  if (!report.is_object() || !report.contains("events") || !report.contains("balances") ||
      !report.contains("totals") || !report.contains("frames") || !report.contains("params")) {
    violate("report_format", "missing required report sections");
    return summary;
  }
  const json& events = report["events"];
  const json& totals = report["totals"];
  const json& params = report["params"];
  if (!events.is_array() || !report["frames"].is_array()) {
    violate("report_format", "events and frames must be arrays");
    return summary;
  }

  // ---- conservation: replay every posting, then compare with the reported
  // final balances. No bucket may ever go negative.
  std::map<std::string, u128> buckets;
  u128 deposited = 0;
  u128 withdrawn = 0;
  for (const json& ev : events) {
    if (!ev.contains("from")) continue;  // informational marker
    u128 amount = 0;
    if (!ev.contains("to") || !ev.contains("amount") || !parse_amount(ev["amount"], amount)) {
      violate("report_format", "posting with missing or malformed legs at seq " +
                                   (ev.contains("seq") ? ev["seq"].dump() : "?"));
      continue;
    }
    std::string from = ev["from"].get<std::string>();
    std::string to = ev["to"].get<std::string>();
    if (from == "external") {
      deposited = checked_add_u128(deposited, amount);
    } else {
      u128& b = buckets[from];
      if (b < amount) {
        violate("conservation", "bucket '" + from + "' overdrawn at seq " + ev["seq"].dump());
        b = 0;
      } else {
        b -= amount;
      }
    }
    if (to == "external")
      withdrawn = checked_add_u128(withdrawn, amount);
    else
      buckets[to] = checked_add_u128(buckets[to], amount);
  }

  auto expect_equal = [&](const char* check, const std::string& what, u128 computed,
                          const json& reported) {
    u128 stated = 0;
    if (!parse_amount(reported, stated)) {
      violate("report_format", what + " is not a money value");
      return;
    }
    if (stated != computed)
      violate(check, what + ": events replay to " + u128_to_string(computed) + " but report says " +
                         u128_to_string(stated));
  };

  for (const auto& [account, stated] : report["balances"].items())
    expect_equal("conservation", "balance of '" + account + "'", buckets["free:" + account], stated);
  for (const auto& [bucket, value] : buckets) {
    if (bucket.rfind("free:", 0) == 0 && value != 0 &&
        !report["balances"].contains(bucket.substr(5)))
      violate("conservation", "bucket '" + bucket + "' missing from reported balances");
  }
  expect_equal("conservation", "custody", buckets["custody"], totals["custody"]);
  expect_equal("conservation", "fee_market", buckets["fee_market"], totals["fee_market"]);
  expect_equal("conservation", "fee_protocol", buckets["fee_protocol"], totals["fee_protocol"]);
  expect_equal("conservation", "total deposited", deposited, totals["deposited"]);
  expect_equal("conservation", "total withdrawn", withdrawn, totals["withdrawn"]);

  // ---- pool identity and full distribution, per frame
  std::int64_t period = params.value("period", std::int64_t{0});
  std::int64_t initial = params.value("initial_timestamp", std::int64_t{0});
  std::uint64_t tax_bps = params.value("tax_bps", std::uint64_t{0});
  if (period <= 0) {
    violate("report_format", "params.period must be positive");
    return summary;
  }

  for (const json& f : report["frames"]) {
    std::uint64_t n = f.value("frame", std::uint64_t{0});
    std::string pool_bucket = "pool:" + std::to_string(n);
    expect_equal("conservation", "remaining pool of frame " + std::to_string(n),
                 buckets[pool_bucket], f["pool_remaining"]);

    if (f.value("finalized", false)) {
      // Rebuild each lot's ownership history from the purchase log and
      // re-derive the taxes owed, independently of the charged postings.
      std::map<std::uint64_t, std::vector<PurchasePoint>> history;
      for (const json& ev : events) {
        if (ev.value("kind", "") != "purchase" || ev.value("frame", std::uint64_t(~0ull)) != n)
          continue;
        u128 price = 0;
        if (!ev.contains("price") || !parse_amount(ev["price"], price) || !ev.contains("bin")) {
          violate("report_format", "purchase event without bin/price at seq " + ev["seq"].dump());
          continue;
        }
        history[ev["bin"].get<std::uint64_t>()].push_back(
            PurchasePoint{ev.value("t", std::int64_t{0}), price});
      }
      Timestamp close = initial + static_cast<std::int64_t>(n) * period;
      u128 expected = 0;
      for (const auto& [bin, points] : history) {
        for (std::size_t i = 0; i < points.size(); ++i) {
          Timestamp end = i + 1 < points.size() ? points[i + 1].t : close;
          expected = checked_add_u128(
              expected, accrued_from_log(points[i].price, tax_bps, end - points[i].t, period));
        }
      }
      u128 charged = 0;
      for (const json& ev : events) {
        std::string kind = ev.value("kind", "");
        if ((kind == "tax_charge" || kind == "pool_credit") &&
            ev.value("to", "") == pool_bucket) {
          u128 amount = 0;
          parse_amount(ev["amount"], amount);
          charged = checked_add_u128(charged, amount);
        }
      }
      if (expected != charged)
        violate("pool_identity", "frame " + std::to_string(n) + ": ownership log implies pool " +
                                     u128_to_string(expected) + " but postings credit " +
                                     u128_to_string(charged));
      if (f.contains("resolution")) {
        u128 stated_pool = 0;
        if (parse_amount(f["resolution"]["pool"], stated_pool) && stated_pool != charged)
          violate("pool_identity", "frame " + std::to_string(n) + ": resolution pool " +
                                       u128_to_string(stated_pool) + " != credited " +
                                       u128_to_string(charged));
      }
    }

    if (f.contains("resolution")) {
      const json& res = f["resolution"];
      u128 pool = 0, reward = 0, fee_m = 0, fee_p = 0, dust = 0;
      if (!parse_amount(res["pool"], pool) || !parse_amount(res["reward"], reward) ||
          !parse_amount(res["fee_market"], fee_m) || !parse_amount(res["fee_protocol"], fee_p) ||
          !parse_amount(res["dust"], dust)) {
        violate("report_format", "resolution of frame " + std::to_string(n) + " malformed");
        continue;
      }
      bool valid = res.contains("winner");
      if (valid) {
        if (checked_add_u128(checked_add_u128(reward, fee_m), fee_p) != pool || dust != 0)
          violate("full_distribution", "frame " + std::to_string(n) +
                                           ": reward + fees != pool for valid resolution");
      } else {
        u128 refunds = 0;
        std::size_t recipients = 0;
        for (const json& s : f["settlements"]) {
          u128 claim = 0;
          parse_amount(s["claimable"], claim);
          refunds = checked_add_u128(refunds, claim);
          ++recipients;
        }
        u128 total = checked_add_u128(checked_add_u128(refunds, fee_m),
                                      checked_add_u128(fee_p, dust));
        if (total != pool)
          violate("full_distribution", "frame " + std::to_string(n) +
                                           ": refunds + fees + dust != pool for invalid resolution");
        if (recipients == 0 ? dust != 0 : dust >= u128{recipients})
          violate("full_distribution", "frame " + std::to_string(n) + ": dust " +
                                           u128_to_string(dust) + " too large for " +
                                           std::to_string(recipients) + " recipients");
      }
    }
  }
  return summary;
}

CheckSummary verify_report_text(const std::string& report_text) {
  json doc;
  try {
    doc = json::parse(report_text);
  } catch (const json::parse_error& e) {
    CheckSummary s;
    s.violations.push_back(Violation{"report_format", e.what()});
    return s;
  }
  return verify_report(doc);
}

std::string render_table(const json& report) {
  std::ostringstream out;
  out << "scenario: " << report.value("scenario", "(unnamed)") << "\n";
  out << "as of t=" << report.value("as_of", std::int64_t{0}) << "\n\n";

  out << "balances\n";
  for (const auto& [account, value] : report["balances"].items())
    out << "  " << std::left << std::setw(16) << account << std::right << std::setw(20)
        << value.get<std::string>() << "\n";
  const json& totals = report["totals"];
  out << "  " << std::left << std::setw(16) << "custody" << std::right << std::setw(20)
      << totals["custody"].get<std::string>() << "\n";
  out << "  " << std::left << std::setw(16) << "fee_market" << std::right << std::setw(20)
      << totals["fee_market"].get<std::string>() << "\n";
  out << "  " << std::left << std::setw(16) << "fee_protocol" << std::right << std::setw(20)
      << totals["fee_protocol"].get<std::string>() << "\n";
  out << "  conservation: " << (totals["conservation_ok"].get<bool>() ? "ok" : "BROKEN") << "\n\n";

  out << "frames\n";
  for (const json& f : report["frames"]) {
    out << "  frame " << f["frame"].get<std::uint64_t>() << " [" << f["k_start"].get<std::int64_t>()
        << ", " << f["k_end"].get<std::int64_t>() << ")  state=" << f["state"].get<std::string>();
    if (f.contains("resolution")) {
      const json& r = f["resolution"];
      out << "  pool=" << r["pool"].get<std::string>();
      if (r.contains("winner"))
        out << "  winner=" << r["winner"].get<std::string>()
            << "  reward=" << r["reward"].get<std::string>();
      else if (r.contains("invalid_reason"))
        out << "  invalid=" << r["invalid_reason"].get<std::string>();
      out << "  fees=" << r["fee_market"].get<std::string>() << "+"
          << r["fee_protocol"].get<std::string>();
    } else {
      out << "  pool=" << f["pool_remaining"].get<std::string>();
    }
    out << "\n";
    for (const json& o : f["ownerships"])
      out << "    bin " << std::setw(6) << o["bin"].get<std::uint64_t>() << "  owner="
          << o["owner"].get<std::string>() << "  price=" << o["price"].get<std::string>() << "\n";
    for (const json& s : f["settlements"])
      out << "    claim " << s["account"].get<std::string>() << "  " << s["claimable"].get<std::string>()
          << (s["claimed"].get<bool>() ? "  (claimed)" : "  (open)") << "\n";
  }

  const json& rejections = report["rejections"];
  if (!rejections.empty()) {
    out << "\nrejected actions\n";
    for (const json& r : rejections)
      out << "  #" << r["index"].get<std::size_t>() << " t=" << r["t"].get<std::int64_t>() << " "
          << r["actor"].get<std::string>() << " " << r["op"].get<std::string>() << ": "
          << r["error"].get<std::string>() << "\n";
  }

  out << "\nevents\n";
  for (const json& ev : report["events"]) out << "  " << ev.dump() << "\n";
  return out.str();
}

}  // namespace htax
