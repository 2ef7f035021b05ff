#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "htax/sim.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int cmd_validate(const std::string& scenario_path) {
  try {
    htax::Scenario sc = htax::load_scenario_file(scenario_path);
    std::cout << "ok: " << (sc.name.empty() ? scenario_path : sc.name) << " ("
              << sc.actions.size() << " actions, " << sc.price_path.size()
              << " price points)" << std::endl;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "invalid scenario: " << e.what() << std::endl;
    return kExitIo;
  }
}

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            const std::string& format, bool quiet) {
  std::optional<htax::SimReport> report;
  try {
    htax::Scenario sc = htax::load_scenario_file(scenario_path);
    report.emplace(htax::run_scenario(sc));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitIo;
  }
  json doc = report->to_json();
  std::string machine = doc.dump(2) + "\n";

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'" << std::endl;
      return kExitIo;
    }
    out << machine;
  }
  if (!quiet) {
    if (format == "table")
      std::cout << htax::render_table(doc);
    else if (out_path.empty())
      std::cout << machine;
  }

  htax::CheckSummary checks = htax::verify_report(doc);
  for (const htax::Violation& v : checks.violations)
    std::cerr << "violation [" << v.check << "] " << v.detail << std::endl;
  if (!quiet && !report->rejections.empty())
    std::cerr << report->rejections.size() << " action(s) rejected (see report)" << std::endl;
  return checks.ok() ? kExitOk : kExitVerification;
}

int cmd_inspect(const std::string& report_path, std::int64_t frame_query, bool has_frame,
                const std::string& account_query) {
  json doc;
  try {
    std::ifstream in(report_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report file '" + report_path + "'");
    doc = json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitIo;
  }

  try {
    if (has_frame) {
      for (const json& f : doc["frames"]) {
        if (f["frame"].get<std::int64_t>() != frame_query) continue;
        std::cout << f.dump(2) << std::endl;
        return kExitOk;
      }
      std::cerr << "error: no record for frame " << frame_query << std::endl;
      return kExitUsage;
    }
    if (!account_query.empty()) {
      const json& balances = doc["balances"];
      if (!balances.contains(account_query)) {
        std::cerr << "error: unknown account '" << account_query << "'" << std::endl;
        return kExitUsage;
      }
      json view;
      view["account"] = account_query;
      view["free_balance"] = balances[account_query];
      json claims = json::array();
      for (const json& f : doc["frames"])
        for (const json& s : f["settlements"])
          if (s["account"] == account_query) {
            json c = s;
            c["frame"] = f["frame"];
            claims.push_back(std::move(c));
          }
      view["claims"] = std::move(claims);
      std::cout << view.dump(2) << std::endl;
      return kExitOk;
    }
    std::cout << htax::render_table(doc);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: malformed report: " << e.what() << std::endl;
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harberger-tax prediction market simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string format = "machine";
  std::string report_path;
  std::string account_query;
  std::int64_t frame_query = 0;
  bool quiet = false;

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* run = app.add_subcommand("run", "Run a scenario and verify the report");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_path, "write the machine report here");
  run->add_option("--format", format, "stdout format")
      ->check(CLI::IsMember({"machine", "table"}));
  run->add_flag("--quiet", quiet, "suppress stdout output");

  CLI::App* inspect = app.add_subcommand("inspect", "Query a report file");
  inspect->add_option("report", report_path, "machine report file")->required();
  CLI::Option* frame_opt = inspect->add_option("--frame", frame_query, "show one frame record");
  inspect->add_option("--account", account_query, "show one account's balance and claims");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (validate->parsed()) return cmd_validate(scenario_path);
  if (run->parsed()) return cmd_run(scenario_path, out_path, format, quiet);
  if (inspect->parsed())
    return cmd_inspect(report_path, frame_query, frame_opt->count() > 0, account_query);
  return kExitUsage;
}
