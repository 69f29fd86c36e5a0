#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "twinmarket/agents.hpp"
#include "twinmarket/auction.hpp"
#include "twinmarket/opinion.hpp"
#include "twinmarket/scene.hpp"

namespace twinmarket {

struct SimulationConfig {
  int n_devices = 20;
  int episodes = 10;
  int steps_per_episode = 50;
  int vmu_count = 10;
  std::uint64_t master_seed = 1;
  bool reputation_enabled = true;
  bool filtering_enabled = true;
};

struct GridConfig {
  int cube_count = 28;
  int coverage_min = 3;  ///< devices covering each cube, lower bound
  int coverage_max = 5;
  int object_classes = 5;
  int position_cells = 27;
  int objects_per_cube_min = 1;
  int objects_per_cube_max = 4;
  double scene_churn_prob = 0.3;

  SceneParams scene_params() const {
    return SceneParams{cube_count,          object_classes,      position_cells,
                       objects_per_cube_min, objects_per_cube_max, scene_churn_prob};
  }
};

struct DevicesConfig {
  // -1,-1,-1 means: split n_devices evenly, remainder to the earlier types
  // (20 devices -> 7/7/6).
  std::array<int, 3> type_counts{-1, -1, -1};
  double type1_step_attack_prob = 0.05;
  double type2_step_attack_prob = 0.5;
  double type3_episode_attack_prob = 0.5;
  double cost_min = 1.8;
  double cost_max = 2.2;
  double stale_cost_discount = 0.5;
  int stale_lag = 5;
  AttackKindWeights attack_kind_weights{};
  double bid_markup = 0.0;
  // Channel demand: a device needing payload_kbps of semantic throughput over
  // channels of channel_rate_kbps capacity requests ceil(payload/rate).
  double payload_kbps_min = 10.0;
  double payload_kbps_max = 20.0;
  double channel_rate_kbps = 10.0;
  double descriptor_dropout_prob = 0.0;
};

struct FeedbackConfig {
  double detection_prob = 1.0;  ///< chance VMUs notice a tampered cube
};

/// Full experiment definition. The defaults are the reference scenario:
/// 20 devices in a 7/7/6 type mix, 10 episodes of 50 steps, 10 VMUs.
struct ScenarioConfig {
  SimulationConfig simulation;
  GridConfig grid;
  ReputationParams reputation;
  AuctionConfig auction;
  DevicesConfig devices;
  ValuationConfig valuation;
  FeedbackConfig feedback;
};

inline bool type_counts_automatic(const DevicesConfig& devices) {
  return devices.type_counts[0] == -1 && devices.type_counts[1] == -1 &&
         devices.type_counts[2] == -1;
}

/// Devices per type. Automatic mode splits evenly with the remainder going
/// to the earlier types.
inline std::array<int, 3> resolved_type_counts(const ScenarioConfig& config) {
  if (!type_counts_automatic(config.devices)) return config.devices.type_counts;
  const int n = config.simulation.n_devices;
  std::array<int, 3> counts{n / 3, n / 3, n / 3};
  for (int i = 0; i < n % 3; ++i) ++counts[static_cast<std::size_t>(i)];
  return counts;
}

/// Checks every scenario invariant and reports all violations, not just the
/// first one found.
inline std::vector<std::string> validate_config(const ScenarioConfig& config) {
  std::vector<std::string> problems;
  auto require = [&problems](bool ok, const char* message) {
    if (!ok) problems.emplace_back(message);
  };
  const auto& sim = config.simulation;
  require(sim.n_devices >= 1, "simulation.n_devices must be >= 1");
  require(sim.episodes >= 1, "simulation.episodes must be >= 1");
  require(sim.steps_per_episode >= 1, "simulation.steps_per_episode must be >= 1");
  require(sim.vmu_count >= 1, "simulation.vmu_count must be >= 1");

  const auto& grid = config.grid;
  require(grid.cube_count >= 1, "grid.cube_count must be >= 1");
  require(grid.coverage_min >= 1, "grid.coverage_min must be >= 1");
  require(grid.coverage_max >= grid.coverage_min, "grid.coverage_max must be >= grid.coverage_min");
  require(grid.coverage_max <= sim.n_devices || sim.n_devices < 1,
          "grid.coverage_max must not exceed simulation.n_devices");
  require(grid.object_classes >= 1, "grid.object_classes must be >= 1");
  require(grid.position_cells >= 2, "grid.position_cells must be >= 2");
  require(grid.objects_per_cube_min >= 0, "grid.objects_per_cube_min must be >= 0");
  require(grid.objects_per_cube_max >= grid.objects_per_cube_min,
          "grid.objects_per_cube_max must be >= grid.objects_per_cube_min");
  require(grid.objects_per_cube_max <= grid.object_classes * grid.position_cells,
          "grid.objects_per_cube_max must fit the descriptor space");
  require(grid.scene_churn_prob >= 0.0 && grid.scene_churn_prob <= 1.0,
          "grid.scene_churn_prob must lie in [0,1]");

  for (auto& problem : config.reputation.check()) problems.push_back(problem);
  for (auto& problem : config.auction.check()) problems.push_back(problem);

  const auto& dev = config.devices;
  if (!type_counts_automatic(dev)) {
    bool counts_ok = true;
    int total = 0;
    for (int c : dev.type_counts) {
      if (c < 0) counts_ok = false;
      total += c;
    }
    require(counts_ok, "devices.type_counts entries must be >= 0 (or null for an even split)");
    require(!counts_ok || total == sim.n_devices,
            "devices.type_counts must sum to simulation.n_devices");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(in_unit(dev.type1_step_attack_prob), "devices.type1_step_attack_prob must lie in [0,1]");
  require(in_unit(dev.type2_step_attack_prob), "devices.type2_step_attack_prob must lie in [0,1]");
  require(in_unit(dev.type3_episode_attack_prob),
          "devices.type3_episode_attack_prob must lie in [0,1]");
  require(dev.cost_min > 0.0, "devices.cost_min must be > 0");
  require(dev.cost_max >= dev.cost_min, "devices.cost_max must be >= devices.cost_min");
  require(in_unit(dev.stale_cost_discount), "devices.stale_cost_discount must lie in [0,1]");
  require(dev.stale_lag >= 1, "devices.stale_lag must be >= 1");
  const auto& kinds = dev.attack_kind_weights;
  require(kinds.stale >= 0.0 && kinds.tamper >= 0.0 && kinds.mitm >= 0.0,
          "devices.attack_kind_weights entries must be >= 0");
  require(kinds.total() > 0.0, "devices.attack_kind_weights must have a positive total");
  require(dev.bid_markup >= 0.0, "devices.bid_markup must be >= 0");
  require(dev.payload_kbps_min > 0.0, "devices.payload_kbps_min must be > 0");
  require(dev.payload_kbps_max >= dev.payload_kbps_min,
          "devices.payload_kbps_max must be >= devices.payload_kbps_min");
  require(dev.channel_rate_kbps > 0.0, "devices.channel_rate_kbps must be > 0");
  require(dev.descriptor_dropout_prob >= 0.0 && dev.descriptor_dropout_prob < 1.0,
          "devices.descriptor_dropout_prob must lie in [0,1)");

  const auto& val = config.valuation;
  require(val.semantic_value_min >= 0.0, "valuation.semantic_value_min must be >= 0");
  require(val.semantic_value_max >= val.semantic_value_min,
          "valuation.semantic_value_max must be >= valuation.semantic_value_min");
  require(val.weather_multiplier > 0.0, "valuation.weather_multiplier must be > 0");

  require(in_unit(config.feedback.detection_prob), "feedback.detection_prob must lie in [0,1]");
  return problems;
}

}  // namespace twinmarket
