// Batch front-end: run scenarios across seeds and ablation arms, validate
// scenario files, dump the default configuration.
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "twinmarket/json_io.hpp"
#include "twinmarket/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// "1,2,5-8" -> {1,2,5,6,7,8}
std::optional<std::vector<std::uint64_t>> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) return std::nullopt;
    try {
      const std::size_t dash = token.find('-');
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(token));
      } else {
        const std::uint64_t lo = std::stoull(token.substr(0, dash));
        const std::uint64_t hi = std::stoull(token.substr(dash + 1));
        if (hi < lo) return std::nullopt;
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (seeds.empty()) return std::nullopt;
  return seeds;
}

std::optional<std::vector<twinmarket::Arm>> parse_arm_list(const std::string& text) {
  if (text == "all") return twinmarket::all_arms();
  std::vector<twinmarket::Arm> arms;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    pos = comma + 1;
    auto arm = twinmarket::arm_from_name(token);
    if (!arm) return std::nullopt;
    arms.push_back(*arm);
  }
  if (arms.empty()) return std::nullopt;
  return arms;
}

int command_run(const std::string& scenario_path, const std::string& out_dir,
                const std::string& seeds_text, const std::string& arms_text,
                const std::string& format_text, bool episode_logs) {
  auto parsed = twinmarket::load_config_file(scenario_path);
  if (!parsed.config) {
    for (const auto& d : parsed.diagnostics) std::cerr << "error: " << d << "\n";
    return kExitConfig;
  }

  twinmarket::RunManifest manifest;
  manifest.scenario = *parsed.config;
  manifest.out_dir = out_dir;
  manifest.episode_logs = episode_logs;

  auto seeds = parse_seed_list(seeds_text);
  if (!seeds) {
    std::cerr << "error: --seeds expects a comma list of nonnegative integers or ranges, "
                 "e.g. \"1,2,5-8\"\n";
    return kExitConfig;
  }
  manifest.seeds = *seeds;

  auto arms = parse_arm_list(arms_text);
  if (!arms) {
    std::cerr << "error: --arms expects \"all\" or a comma list of: no-reputation, "
                 "no-reputation-unfiltered, reputation-unfiltered, reputation-filtered\n";
    return kExitConfig;
  }
  manifest.arms = *arms;

  if (format_text == "records") {
    manifest.format = twinmarket::ReportFormat::Records;
  } else if (format_text == "table") {
    manifest.format = twinmarket::ReportFormat::Table;
  } else {
    std::cerr << "error: --format must be \"table\" or \"records\"\n";
    return kExitConfig;
  }

  const auto outcome = twinmarket::run_manifest(manifest);
  for (const auto& d : outcome.diagnostics) std::cerr << "error: " << d << "\n";
  if (outcome.exit_code == 0) {
    std::cout << "wrote " << outcome.files.size() << " files to " << out_dir << "\n";
  }
  return outcome.exit_code;
}

int command_validate(const std::string& scenario_path) {
  auto parsed = twinmarket::load_config_file(scenario_path);
  if (!parsed.config) {
    for (const auto& d : parsed.diagnostics) std::cerr << scenario_path << ": " << d << "\n";
    return kExitConfig;
  }
  std::cout << scenario_path << ": ok\n";
  return kExitOk;
}

int command_dump_defaults(const std::string& out_path) {
  const std::string text = twinmarket::default_config_text();
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot open for writing: " << out_path << "\n";
    return kExitRuntime;
  }
  out << text;
  return out ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for a reputation-gated semantic data market"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, dump_path;
  std::string seeds_text = "1";
  std::string arms_text = "no-reputation,reputation-unfiltered,reputation-filtered";
  std::string format_text = "records";
  bool episode_logs = false;

  auto* run = app.add_subcommand("run", "Run a scenario across seeds and ablation arms");
  run->add_option("--scenario", scenario_path, "Scenario config file (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory for reports and aggregates")->required();
  run->add_option("--seeds", seeds_text, "Seed list, e.g. \"1,2,5-8\" (default: 1)");
  run->add_option("--arms", arms_text, "Arm list or \"all\" (default: the three study arms)");
  run->add_option("--format", format_text, "Per-run report format: records|table");
  run->add_flag("--episode-logs", episode_logs, "Also write per-step logs (JSONL)");

  auto* validate = app.add_subcommand("validate", "Check a scenario config and report every problem");
  validate->add_option("--scenario", scenario_path, "Scenario config file (JSON)")->required();

  auto* dump = app.add_subcommand("dump-defaults", "Print the default scenario config");
  dump->add_option("--out", dump_path, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed())
      return command_run(scenario_path, out_dir, seeds_text, arms_text, format_text, episode_logs);
    if (validate->parsed()) return command_validate(scenario_path);
    return command_dump_defaults(dump_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
