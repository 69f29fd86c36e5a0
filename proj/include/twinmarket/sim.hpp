#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twinmarket/agents.hpp"
#include "twinmarket/auction.hpp"
#include "twinmarket/grid.hpp"
#include "twinmarket/ledger.hpp"
#include "twinmarket/scenario.hpp"
#include "twinmarket/scene.hpp"

namespace twinmarket {

/// Everything observable about one timestep. Together with the device types
/// carried by the episode log, these entries fully determine the metrics.
struct StepLog {
  int episode = 0;
  int step = 0;  // within the episode
  std::int64_t global_step = 0;
  std::vector<int> gated;    // device ids admitted to winner determination
  std::vector<int> winners;  // ascending
  std::vector<std::optional<AttackKind>> attacks;  // per device; nullopt = honest this step
  std::set<int> flagged_cubes;
  std::set<int> blamed;
  std::vector<double> reputations;  // snapshot used for gating, per device
  double social_welfare = 0.0;
  bool attack_success = false;  // an attacking winner's delivery deviated from truth
  int noop_perturbations = 0;
};

struct EpisodeLog {
  int episode = 0;
  std::vector<DeviceType> device_types;
  std::vector<StepLog> steps;
};

struct TypeMetrics {
  double type1 = 0.0;
  double type2 = 0.0;
  double type3 = 0.0;

  double& by(DeviceType t) {
    switch (t) {
      case DeviceType::Type1: return type1;
      case DeviceType::Type2: return type2;
      default: return type3;
    }
  }
  double by(DeviceType t) const {
    switch (t) {
      case DeviceType::Type1: return type1;
      case DeviceType::Type2: return type2;
      default: return type3;
    }
  }
};

struct EpisodeMetrics {
  int episode = 0;
  TypeMetrics acceptance_rate;
  double average_social_welfare = 0.0;
  double successful_attack_rate = 0.0;
};

struct MetricsReport {
  TypeMetrics acceptance_rate;  // auction wins over participations, per type
  double average_social_welfare = 0.0;
  double successful_attack_rate = 0.0;
  std::vector<EpisodeMetrics> episodes;
};

struct ScenarioResult {
  MetricsReport metrics;
  std::vector<EpisodeLog> logs;
};

/// Builds the device population: types by the resolved counts in id order,
/// per-device costs and channel demands drawn from device-local streams so a
/// device's static traits never depend on the rest of the population.
inline std::vector<DeviceProfile> build_population(const ScenarioConfig& config) {
  const auto counts = resolved_type_counts(config);
  const auto& dev = config.devices;
  std::vector<DeviceProfile> population;
  population.reserve(static_cast<std::size_t>(config.simulation.n_devices));
  for (int id = 0; id < config.simulation.n_devices; ++id) {
    DeviceProfile profile;
    profile.device_id = id;
    if (id < counts[0])
      profile.type = DeviceType::Type1;
    else if (id < counts[0] + counts[1])
      profile.type = DeviceType::Type2;
    else
      profile.type = DeviceType::Type3;
    profile.per_step_attack_prob = profile.type == DeviceType::Type1
                                       ? dev.type1_step_attack_prob
                                       : dev.type2_step_attack_prob;
    profile.per_episode_attack_prob = dev.type3_episode_attack_prob;
    Rng setup = derive_stream(config.simulation.master_seed, "device-setup",
                              static_cast<std::uint64_t>(id));
    profile.honest_cost = setup.uniform_real(dev.cost_min, dev.cost_max);
    const double payload = setup.uniform_real(dev.payload_kbps_min, dev.payload_kbps_max);
    profile.channels = std::max(1, static_cast<int>(std::ceil(payload / dev.channel_rate_kbps)));
    profile.stale_cost_discount = dev.stale_cost_discount;
    profile.stale_lag = dev.stale_lag;
    profile.alpha = config.reputation.alpha_default;
    profile.bid_markup = dev.bid_markup;
    profile.descriptor_dropout_prob = dev.descriptor_dropout_prob;
    population.push_back(std::move(profile));
  }
  return population;
}

/// Assigns 3-5 (configurable) covering devices to every cube, then patches
/// devices left without any cube. Fixed for the whole scenario.
inline CubeGrid build_coverage(const ScenarioConfig& config,
                               std::vector<DeviceProfile>& population) {
  CubeGrid grid;
  grid.cube_count = config.grid.cube_count;
  Rng rng = derive_stream(config.simulation.master_seed, "coverage");
  const int n = config.simulation.n_devices;
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;

  for (int cube = 0; cube < grid.cube_count; ++cube) {
    const int coverers = rng.uniform_int(config.grid.coverage_min,
                                         std::min(config.grid.coverage_max, n));
    // partial Fisher-Yates over the id pool
    for (int k = 0; k < coverers; ++k) {
      const int j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - k)));
      std::swap(ids[static_cast<std::size_t>(k)], ids[static_cast<std::size_t>(j)]);
    }
    std::vector<int> chosen(ids.begin(), ids.begin() + coverers);
    std::sort(chosen.begin(), chosen.end());
    grid.coverage[cube] = std::move(chosen);
  }

  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  for (const auto& [cube, devices] : grid.coverage)
    for (int id : devices) covered[static_cast<std::size_t>(id)] = true;
  for (int id = 0; id < n; ++id) {
    if (covered[static_cast<std::size_t>(id)]) continue;
    auto& devices = grid.coverage[rng.uniform_int(0, grid.cube_count - 1)];
    devices.insert(std::lower_bound(devices.begin(), devices.end(), id), id);
  }

  for (auto& profile : population) profile.covered_cubes.clear();
  for (const auto& [cube, devices] : grid.coverage)
    for (int id : devices) population[static_cast<std::size_t>(id)].covered_cubes.push_back(cube);
  return grid;
}

/// Pure recomputation of the headline metrics from the run logs.
/// Acceptance is wins over participations (every device bids every step);
/// welfare is the per-step mean; the attack rate is the fraction of steps in
/// which at least one poisoned delivery entered the digital twin.
inline MetricsReport compute_metrics(const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) throw std::invalid_argument("compute_metrics requires at least one episode");
  MetricsReport report;
  TypeMetrics total_wins, total_bids;
  double welfare_sum = 0.0;
  std::int64_t attack_steps = 0, steps = 0;

  for (const auto& episode : logs) {
    EpisodeMetrics em;
    em.episode = episode.episode;
    TypeMetrics wins, bids;
    double ep_welfare = 0.0;
    std::int64_t ep_attacks = 0;
    for (const auto& step : episode.steps) {
      for (DeviceType t : episode.device_types) {
        bids.by(t) += 1.0;
        total_bids.by(t) += 1.0;
      }
      for (int winner : step.winners) {
        const DeviceType t = episode.device_types.at(static_cast<std::size_t>(winner));
        wins.by(t) += 1.0;
        total_wins.by(t) += 1.0;
      }
      ep_welfare += step.social_welfare;
      welfare_sum += step.social_welfare;
      if (step.attack_success) {
        ++ep_attacks;
        ++attack_steps;
      }
    }
    const auto rate = [](double w, double b) { return b > 0.0 ? w / b : 0.0; };
    em.acceptance_rate.type1 = rate(wins.type1, bids.type1);
    em.acceptance_rate.type2 = rate(wins.type2, bids.type2);
    em.acceptance_rate.type3 = rate(wins.type3, bids.type3);
    const auto n_steps = static_cast<double>(episode.steps.size());
    em.average_social_welfare = n_steps > 0.0 ? ep_welfare / n_steps : 0.0;
    em.successful_attack_rate = n_steps > 0.0 ? static_cast<double>(ep_attacks) / n_steps : 0.0;
    steps += static_cast<std::int64_t>(episode.steps.size());
    report.episodes.push_back(em);
  }

  const auto rate = [](double w, double b) { return b > 0.0 ? w / b : 0.0; };
  report.acceptance_rate.type1 = rate(total_wins.type1, total_bids.type1);
  report.acceptance_rate.type2 = rate(total_wins.type2, total_bids.type2);
  report.acceptance_rate.type3 = rate(total_wins.type3, total_bids.type3);
  report.average_social_welfare = steps > 0 ? welfare_sum / static_cast<double>(steps) : 0.0;
  report.successful_attack_rate =
      steps > 0 ? static_cast<double>(attack_steps) / static_cast<double>(steps) : 0.0;
  return report;
}

namespace detail {

/// The closed per-timestep loop: bid, gate, solve, deliver, collect feedback,
/// attribute blame, update the ledger.
class SimEngine {
 public:
  explicit SimEngine(const ScenarioConfig& config)
      : config_(config),
        population_(build_population(config)),
        grid_(build_coverage(config, population_)),
        ledger_(config.reputation),
        feedback_rng_(derive_stream(config.simulation.master_seed, "feedback")) {
    for (const auto& profile : population_) {
      policy_rngs_.push_back(derive_stream(config.simulation.master_seed, "policy",
                                           static_cast<std::uint64_t>(profile.device_id)));
      bid_rngs_.push_back(derive_stream(config.simulation.master_seed, "bid",
                                        static_cast<std::uint64_t>(profile.device_id)));
      content_rngs_.push_back(derive_stream(config.simulation.master_seed, "content",
                                            static_cast<std::uint64_t>(profile.device_id)));
      ledger_.set_alpha(profile.device_id, profile.alpha);
    }
  }

  ScenarioResult run() {
    const auto& sim = config_.simulation;
    std::vector<EpisodeLog> logs;
    logs.reserve(static_cast<std::size_t>(sim.episodes));
    std::vector<DeviceType> types;
    for (const auto& profile : population_) types.push_back(profile.type);

    std::int64_t global_step = 0;
    for (int episode = 0; episode < sim.episodes; ++episode) {
      Rng scene_rng = derive_stream(sim.master_seed, "scene", static_cast<std::uint64_t>(episode));
      SceneHistory scene(config_.grid.scene_params(), scene_rng);
      std::vector<bool> episode_attacks;
      for (std::size_t i = 0; i < population_.size(); ++i)
        episode_attacks.push_back(draw_episode_attack(population_[i], policy_rngs_[i]));

      EpisodeLog episode_log;
      episode_log.episode = episode;
      episode_log.device_types = types;
      for (int step = 0; step < sim.steps_per_episode; ++step) {
        episode_log.steps.push_back(
            run_step(episode, step, global_step, scene, episode_attacks));
        ++global_step;
        if (step + 1 < sim.steps_per_episode) scene.advance(scene_rng);
      }
      logs.push_back(std::move(episode_log));
    }
    return ScenarioResult{compute_metrics(logs), std::move(logs)};
  }

 private:
  StepLog run_step(int episode, int step, std::int64_t t, SceneHistory& scene,
                   const std::vector<bool>& episode_attacks) {
    const auto& sim = config_.simulation;
    StepLog log;
    log.episode = episode;
    log.step = step;
    log.global_step = t;

    // 1. reputation snapshot (ledger state as of the previous step)
    std::map<int, double> reputations;
    for (const auto& profile : population_) {
      const double r = ledger_.reputation(profile.device_id, t);
      reputations.emplace(profile.device_id, r);
      log.reputations.push_back(r);
    }

    // 2. every device bids, every step
    std::vector<Bid> bids;
    for (std::size_t i = 0; i < population_.size(); ++i)
      bids.push_back(sample_bid(population_[i], config_.valuation, bid_rngs_[i]));

    // 3. attack decisions are drawn for everyone (fixed draw schedule);
    //    only winners' decisions take effect below
    std::vector<AttackDecision> decisions;
    for (std::size_t i = 0; i < population_.size(); ++i) {
      decisions.push_back(decide_attack(population_[i], episode_attacks[i],
                                        config_.devices.attack_kind_weights, policy_rngs_[i]));
      log.attacks.push_back(decisions.back().attack ? std::optional(decisions.back().kind)
                                                    : std::nullopt);
    }

    // 4. gate and solve
    const std::vector<Bid> admitted =
        sim.reputation_enabled ? gate_by_reputation(bids, reputations, config_.auction) : bids;
    for (const auto& bid : admitted) log.gated.push_back(bid.device_id);
    const Allocation alloc = solve_winner_determination(admitted, config_.auction);
    log.winners = alloc.winners;
    log.social_welfare = alloc.social_welfare;

    // 5. winners deliver, honest or poisoned
    const CubeContent& truth = scene.current();
    DeliveredContent delivered;
    bool attacked_delivery_entered = false;
    for (int id : alloc.winners) {
      const auto idx = static_cast<std::size_t>(id);
      const AttackDecision& decision = decisions[idx];
      GeneratedContent content = generate_content(population_[idx], scene, decision.attack,
                                                  decision.kind, content_rngs_[idx]);
      log.noop_perturbations += content.noop_perturbations;
      if (decision.attack) {
        for (const auto& [cube, objs] : content.delivery) {
          auto truth_it = truth.find(cube);
          if (truth_it == truth.end() || objs != truth_it->second) {
            attacked_delivery_entered = true;
            break;
          }
        }
      }
      delivered.emplace(id, std::move(content.delivery));
    }
    log.attack_success = attacked_delivery_entered;

    // 6. VMU feedback on the assembled twin
    const FeedbackBatch batch = generate_vmu_feedback(delivered, truth,
                                                      config_.feedback.detection_prob,
                                                      sim.vmu_count, feedback_rng_);
    log.flagged_cubes = batch.flagged_cubes;

    // 7. blame: similarity filter, or every deliverer of a flagged cube when
    //    the filter is ablated
    std::set<int> blamed;
    if (sim.filtering_enabled) {
      blamed = filter_feedback(grid_, delivered, batch).negative_devices;
    } else {
      for (int cube : batch.flagged_cubes)
        for (const auto& [device, content] : delivered)
          if (content.count(cube)) blamed.insert(device);
    }
    log.blamed = blamed;

    // 8. ledger update: one outcome per delivering winner, mirrored to every
    //    VMU rater (homogeneous raters); losers record nothing
    for (int id : alloc.winners) {
      const Outcome outcome = blamed.count(id) ? Outcome::Negative : Outcome::Positive;
      for (int rater = 0; rater < sim.vmu_count; ++rater)
        ledger_.record_interaction(id, rater, t, outcome);
    }
    return log;
  }

  ScenarioConfig config_;
  std::vector<DeviceProfile> population_;
  CubeGrid grid_;
  ReputationLedger ledger_;
  Rng feedback_rng_;
  std::vector<Rng> policy_rngs_, bid_rngs_, content_rngs_;
};

}  // namespace detail

/// Runs the full scenario: episodes x steps of the closed market loop, fully
/// deterministic in the master seed. The reputation ledger persists across
/// episodes; the scene ground truth regenerates each episode. Invalid
/// configs are rejected before any stepping. Each call owns all of its
/// state, so independent scenarios (seed sweeps, ablation arms) can run
/// concurrently.
inline ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto problems = validate_config(config);
  if (!problems.empty()) {
    std::string joined = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) joined += "; " + problems[i];
    throw std::invalid_argument(joined);
  }
  detail::SimEngine engine(config);
  return engine.run();
}

}  // namespace twinmarket
