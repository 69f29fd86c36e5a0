#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twinmarket/json_io.hpp"
#include "twinmarket/sim.hpp"

namespace twinmarket {

/// Ablation arms: the three study configurations plus the remaining corner
/// of the reputation x filtering cross for completeness.
enum class Arm { NoReputation, NoReputationUnfiltered, ReputationUnfiltered, ReputationFiltered };

inline const char* arm_name(Arm arm) {
  switch (arm) {
    case Arm::NoReputation: return "no-reputation";
    case Arm::NoReputationUnfiltered: return "no-reputation-unfiltered";
    case Arm::ReputationUnfiltered: return "reputation-unfiltered";
    default: return "reputation-filtered";
  }
}

inline std::optional<Arm> arm_from_name(std::string_view name) {
  if (name == "no-reputation") return Arm::NoReputation;
  if (name == "no-reputation-unfiltered") return Arm::NoReputationUnfiltered;
  if (name == "reputation-unfiltered") return Arm::ReputationUnfiltered;
  if (name == "reputation-filtered") return Arm::ReputationFiltered;
  return std::nullopt;
}

inline std::vector<Arm> default_arms() {
  return {Arm::NoReputation, Arm::ReputationUnfiltered, Arm::ReputationFiltered};
}

inline std::vector<Arm> all_arms() {
  return {Arm::NoReputation, Arm::NoReputationUnfiltered, Arm::ReputationUnfiltered,
          Arm::ReputationFiltered};
}

inline void apply_arm(ScenarioConfig& config, Arm arm) {
  switch (arm) {
    case Arm::NoReputation:
      config.simulation.reputation_enabled = false;
      config.simulation.filtering_enabled = true;
      break;
    case Arm::NoReputationUnfiltered:
      config.simulation.reputation_enabled = false;
      config.simulation.filtering_enabled = false;
      break;
    case Arm::ReputationUnfiltered:
      config.simulation.reputation_enabled = true;
      config.simulation.filtering_enabled = false;
      break;
    case Arm::ReputationFiltered:
      config.simulation.reputation_enabled = true;
      config.simulation.filtering_enabled = true;
      break;
  }
}

enum class ReportFormat { Records, Table };

/// A batch run: one scenario fanned out over seeds and ablation arms.
struct RunManifest {
  ScenarioConfig scenario;
  std::string out_dir;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Arm> arms = default_arms();
  ReportFormat format = ReportFormat::Records;
  bool episode_logs = false;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config error, 3 runtime failure
  std::vector<std::string> files;
  std::vector<std::string> diagnostics;
};

namespace detail {

struct SeriesStats {
  double mean = 0.0;
  double sample_std = 0.0;  // 0 for a single observation
};

inline SeriesStats series_stats(const std::vector<double>& values) {
  SeriesStats stats;
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.sample_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stats;
}

inline bool write_file(const std::filesystem::path& path, const std::string& text,
                       std::vector<std::string>& diagnostics) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    diagnostics.push_back("cannot open for writing: " + path.string());
    return false;
  }
  out << text;
  out.flush();
  if (!out) {
    diagnostics.push_back("write failed: " + path.string());
    return false;
  }
  return true;
}

}  // namespace detail

/// Runs every (arm, seed) combination, writing one report file each, then the
/// two aggregate plot-data tables (acceptance per type, welfare + attack rate;
/// seed mean and sample std per arm). Any failure aborts before the
/// aggregates are written, so partial runs never look complete.
inline RunOutcome run_manifest(const RunManifest& manifest) {
  RunOutcome outcome;
  if (manifest.seeds.empty()) {
    outcome.diagnostics.push_back("manifest needs at least one seed");
    outcome.exit_code = 2;
    return outcome;
  }
  if (manifest.arms.empty()) {
    outcome.diagnostics.push_back("manifest needs at least one arm");
    outcome.exit_code = 2;
    return outcome;
  }
  {
    auto problems = validate_config(manifest.scenario);
    if (!problems.empty()) {
      outcome.diagnostics = std::move(problems);
      outcome.exit_code = 2;
      return outcome;
    }
  }

  namespace fs = std::filesystem;
  const fs::path out_dir(manifest.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    outcome.diagnostics.push_back("cannot create output directory: " + out_dir.string() + " (" +
                                  ec.message() + ")");
    outcome.exit_code = 3;
    return outcome;
  }

  std::map<Arm, std::vector<MetricsReport>> collected;
  for (Arm arm : manifest.arms) {
    for (std::uint64_t seed : manifest.seeds) {
      ScenarioConfig config = manifest.scenario;
      apply_arm(config, arm);
      config.simulation.master_seed = seed;
      ScenarioResult result;
      try {
        result = run_scenario(config);
      } catch (const std::exception& e) {
        outcome.diagnostics.push_back(std::string("run failed (") + arm_name(arm) + ", seed " +
                                      std::to_string(seed) + "): " + e.what());
        outcome.exit_code = 3;
        return outcome;
      }

      const std::string stem =
          "report_" + std::string(arm_name(arm)) + "_seed" + std::to_string(seed);
      const bool records = manifest.format == ReportFormat::Records;
      const fs::path report_path = out_dir / (stem + (records ? ".json" : ".csv"));
      const std::string payload =
          records ? report_to_json(result.metrics, config, arm_name(arm), seed).dump(2) + "\n"
                  : report_to_table(result.metrics, arm_name(arm), seed);
      if (!detail::write_file(report_path, payload, outcome.diagnostics)) {
        outcome.exit_code = 3;
        return outcome;
      }
      outcome.files.push_back(report_path.string());

      if (manifest.episode_logs) {
        const fs::path log_path = out_dir / (stem + "_episodes.jsonl");
        if (!detail::write_file(log_path, episode_logs_to_jsonl(result.logs),
                                outcome.diagnostics)) {
          outcome.exit_code = 3;
          return outcome;
        }
        outcome.files.push_back(log_path.string());
      }
      collected[arm].push_back(std::move(result.metrics));
    }
  }

  // aggregates: pure functions of the per-run reports collected above
  std::ostringstream acceptance;
  acceptance << "arm,device_type,mean,std\n";
  std::ostringstream welfare;
  welfare << "arm,metric,mean,std\n";
  for (Arm arm : manifest.arms) {
    const auto& reports = collected[arm];
    auto column = [&reports](auto getter) {
      std::vector<double> values;
      values.reserve(reports.size());
      for (const auto& r : reports) values.push_back(getter(r));
      return detail::series_stats(values);
    };
    const auto t1 = column([](const MetricsReport& r) { return r.acceptance_rate.type1; });
    const auto t2 = column([](const MetricsReport& r) { return r.acceptance_rate.type2; });
    const auto t3 = column([](const MetricsReport& r) { return r.acceptance_rate.type3; });
    acceptance << arm_name(arm) << ",type1," << format_double(t1.mean) << ","
               << format_double(t1.sample_std) << "\n";
    acceptance << arm_name(arm) << ",type2," << format_double(t2.mean) << ","
               << format_double(t2.sample_std) << "\n";
    acceptance << arm_name(arm) << ",type3," << format_double(t3.mean) << ","
               << format_double(t3.sample_std) << "\n";
    const auto sw = column([](const MetricsReport& r) { return r.average_social_welfare; });
    const auto ar = column([](const MetricsReport& r) { return r.successful_attack_rate; });
    welfare << arm_name(arm) << ",average_social_welfare," << format_double(sw.mean) << ","
            << format_double(sw.sample_std) << "\n";
    welfare << arm_name(arm) << ",successful_attack_rate," << format_double(ar.mean) << ","
            << format_double(ar.sample_std) << "\n";
  }
  const fs::path acceptance_path = out_dir / "acceptance_by_type.csv";
  const fs::path welfare_path = out_dir / "welfare_attack.csv";
  if (!detail::write_file(acceptance_path, acceptance.str(), outcome.diagnostics) ||
      !detail::write_file(welfare_path, welfare.str(), outcome.diagnostics)) {
    outcome.exit_code = 3;
    return outcome;
  }
  outcome.files.push_back(acceptance_path.string());
  outcome.files.push_back(welfare_path.string());
  return outcome;
}

}  // namespace twinmarket
