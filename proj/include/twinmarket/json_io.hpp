#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "twinmarket/scenario.hpp"
#include "twinmarket/sim.hpp"

namespace twinmarket {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; keeps emitted tables byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["simulation"] = {{"n_devices", c.simulation.n_devices},
                     {"episodes", c.simulation.episodes},
                     {"steps_per_episode", c.simulation.steps_per_episode},
                     {"vmu_count", c.simulation.vmu_count},
                     {"master_seed", c.simulation.master_seed},
                     {"reputation_enabled", c.simulation.reputation_enabled},
                     {"filtering_enabled", c.simulation.filtering_enabled}};
  j["grid"] = {{"cube_count", c.grid.cube_count},
               {"coverage_min", c.grid.coverage_min},
               {"coverage_max", c.grid.coverage_max},
               {"object_classes", c.grid.object_classes},
               {"position_cells", c.grid.position_cells},
               {"objects_per_cube_min", c.grid.objects_per_cube_min},
               {"objects_per_cube_max", c.grid.objects_per_cube_max},
               {"scene_churn_prob", c.grid.scene_churn_prob}};
  j["reputation"] = {{"omega1", c.reputation.omega1},
                     {"omega2", c.reputation.omega2},
                     {"kappa", c.reputation.kappa},
                     {"fading_z", c.reputation.fading_z},
                     {"horizon_windows", c.reputation.horizon_windows},
                     {"alpha_default", c.reputation.alpha_default}};
  j["auction"] = {{"channel_budget", c.auction.channel_budget},
                  {"vsp_channel_cost", c.auction.vsp_channel_cost},
                  {"reputation_threshold", c.auction.reputation_threshold},
                  {"payment_rule", "pay-as-bid"}};
  ordered_json devices;
  if (type_counts_automatic(c.devices))
    devices["type_counts"] = nullptr;
  else
    devices["type_counts"] = c.devices.type_counts;
  devices["type1_step_attack_prob"] = c.devices.type1_step_attack_prob;
  devices["type2_step_attack_prob"] = c.devices.type2_step_attack_prob;
  devices["type3_episode_attack_prob"] = c.devices.type3_episode_attack_prob;
  devices["cost_min"] = c.devices.cost_min;
  devices["cost_max"] = c.devices.cost_max;
  devices["stale_cost_discount"] = c.devices.stale_cost_discount;
  devices["stale_lag"] = c.devices.stale_lag;
  devices["attack_kind_weights"] = {{"stale", c.devices.attack_kind_weights.stale},
                                    {"tamper", c.devices.attack_kind_weights.tamper},
                                    {"mitm", c.devices.attack_kind_weights.mitm}};
  devices["bid_markup"] = c.devices.bid_markup;
  devices["payload_kbps_min"] = c.devices.payload_kbps_min;
  devices["payload_kbps_max"] = c.devices.payload_kbps_max;
  devices["channel_rate_kbps"] = c.devices.channel_rate_kbps;
  devices["descriptor_dropout_prob"] = c.devices.descriptor_dropout_prob;
  j["devices"] = std::move(devices);
  j["valuation"] = {{"semantic_value_min", c.valuation.semantic_value_min},
                    {"semantic_value_max", c.valuation.semantic_value_max},
                    {"weather_multiplier", c.valuation.weather_multiplier}};
  j["feedback"] = {{"detection_prob", c.feedback.detection_prob}};
  return j;
}

inline std::string default_config_text() { return config_to_json(ScenarioConfig{}).dump(2) + "\n"; }

namespace detail {

/// Field-by-field extraction that records diagnostics (wrong type, unknown
/// key) instead of throwing, so validate can report every problem at once.
class JsonReader {
 public:
  explicit JsonReader(std::vector<std::string>& diagnostics) : diagnostics_(diagnostics) {}

  const ordered_json* section(const ordered_json& root, const char* name) {
    auto it = root.find(name);
    if (it == root.end()) return nullptr;
    if (!it->is_object()) {
      fail(std::string(name) + " must be an object");
      return nullptr;
    }
    return &*it;
  }

  void check_keys(const ordered_json& obj, std::string_view path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* key : allowed)
        if (it.key() == key) {
          known = true;
          break;
        }
      if (!known)
        fail(std::string(path) + "." + it.key() + " is not a recognized setting");
    }
  }

  template <typename T>
  void read_int(const ordered_json& obj, std::string_view path, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer())
      fail(std::string(path) + "." + key + " must be an integer");
    else
      out = it->get<T>();
  }

  void read_double(const ordered_json& obj, std::string_view path, const char* key, double& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number())
      fail(std::string(path) + "." + key + " must be a number");
    else
      out = it->get<double>();
  }

  void read_bool(const ordered_json& obj, std::string_view path, const char* key, bool& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean())
      fail(std::string(path) + "." + key + " must be a boolean");
    else
      out = it->get<bool>();
  }

  void fail(std::string message) { diagnostics_.push_back(std::move(message)); }

 private:
  std::vector<std::string>& diagnostics_;
};

}  // namespace detail

struct ConfigParseResult {
  std::optional<ScenarioConfig> config;  // present only when diagnostics is empty
  std::vector<std::string> diagnostics;
};

/// Decodes a scenario config from JSON, collecting schema diagnostics
/// (unknown keys, wrong types) and then every invariant violation.
inline ConfigParseResult config_from_json(const ordered_json& root) {
  ConfigParseResult result;
  detail::JsonReader r(result.diagnostics);
  ScenarioConfig c;

  if (!root.is_object()) {
    r.fail("top level must be an object");
    return result;
  }
  r.check_keys(root, "config",
               {"simulation", "grid", "reputation", "auction", "devices", "valuation", "feedback"});

  if (const auto* sec = r.section(root, "simulation")) {
    r.check_keys(*sec, "simulation",
                 {"n_devices", "episodes", "steps_per_episode", "vmu_count", "master_seed",
                  "reputation_enabled", "filtering_enabled"});
    r.read_int(*sec, "simulation", "n_devices", c.simulation.n_devices);
    r.read_int(*sec, "simulation", "episodes", c.simulation.episodes);
    r.read_int(*sec, "simulation", "steps_per_episode", c.simulation.steps_per_episode);
    r.read_int(*sec, "simulation", "vmu_count", c.simulation.vmu_count);
    r.read_int(*sec, "simulation", "master_seed", c.simulation.master_seed);
    r.read_bool(*sec, "simulation", "reputation_enabled", c.simulation.reputation_enabled);
    r.read_bool(*sec, "simulation", "filtering_enabled", c.simulation.filtering_enabled);
  }
  if (const auto* sec = r.section(root, "grid")) {
    r.check_keys(*sec, "grid",
                 {"cube_count", "coverage_min", "coverage_max", "object_classes", "position_cells",
                  "objects_per_cube_min", "objects_per_cube_max", "scene_churn_prob"});
    r.read_int(*sec, "grid", "cube_count", c.grid.cube_count);
    r.read_int(*sec, "grid", "coverage_min", c.grid.coverage_min);
    r.read_int(*sec, "grid", "coverage_max", c.grid.coverage_max);
    r.read_int(*sec, "grid", "object_classes", c.grid.object_classes);
    r.read_int(*sec, "grid", "position_cells", c.grid.position_cells);
    r.read_int(*sec, "grid", "objects_per_cube_min", c.grid.objects_per_cube_min);
    r.read_int(*sec, "grid", "objects_per_cube_max", c.grid.objects_per_cube_max);
    r.read_double(*sec, "grid", "scene_churn_prob", c.grid.scene_churn_prob);
  }
  if (const auto* sec = r.section(root, "reputation")) {
    r.check_keys(*sec, "reputation",
                 {"omega1", "omega2", "kappa", "fading_z", "horizon_windows", "alpha_default"});
    r.read_double(*sec, "reputation", "omega1", c.reputation.omega1);
    r.read_double(*sec, "reputation", "omega2", c.reputation.omega2);
    r.read_double(*sec, "reputation", "kappa", c.reputation.kappa);
    r.read_double(*sec, "reputation", "fading_z", c.reputation.fading_z);
    r.read_int(*sec, "reputation", "horizon_windows", c.reputation.horizon_windows);
    r.read_double(*sec, "reputation", "alpha_default", c.reputation.alpha_default);
  }
  if (const auto* sec = r.section(root, "auction")) {
    r.check_keys(*sec, "auction",
                 {"channel_budget", "vsp_channel_cost", "reputation_threshold", "payment_rule"});
    r.read_int(*sec, "auction", "channel_budget", c.auction.channel_budget);
    r.read_double(*sec, "auction", "vsp_channel_cost", c.auction.vsp_channel_cost);
    r.read_double(*sec, "auction", "reputation_threshold", c.auction.reputation_threshold);
    if (auto it = sec->find("payment_rule"); it != sec->end()) {
      if (!it->is_string() || it->get<std::string>() != "pay-as-bid")
        r.fail("auction.payment_rule must be \"pay-as-bid\"");
      else
        c.auction.payment_rule = PaymentRule::PayAsBid;
    }
  }
  if (const auto* sec = r.section(root, "devices")) {
    r.check_keys(*sec, "devices",
                 {"type_counts", "type1_step_attack_prob", "type2_step_attack_prob",
                  "type3_episode_attack_prob", "cost_min", "cost_max", "stale_cost_discount",
                  "stale_lag", "attack_kind_weights", "bid_markup", "payload_kbps_min",
                  "payload_kbps_max", "channel_rate_kbps", "descriptor_dropout_prob"});
    if (auto it = sec->find("type_counts"); it != sec->end()) {
      if (it->is_null()) {
        c.devices.type_counts = {-1, -1, -1};
      } else if (it->is_array() && it->size() == 3 && (*it)[0].is_number_integer() &&
                 (*it)[1].is_number_integer() && (*it)[2].is_number_integer()) {
        c.devices.type_counts = {(*it)[0].get<int>(), (*it)[1].get<int>(), (*it)[2].get<int>()};
      } else {
        r.fail("devices.type_counts must be null or an array of three integers");
      }
    }
    r.read_double(*sec, "devices", "type1_step_attack_prob", c.devices.type1_step_attack_prob);
    r.read_double(*sec, "devices", "type2_step_attack_prob", c.devices.type2_step_attack_prob);
    r.read_double(*sec, "devices", "type3_episode_attack_prob",
                  c.devices.type3_episode_attack_prob);
    r.read_double(*sec, "devices", "cost_min", c.devices.cost_min);
    r.read_double(*sec, "devices", "cost_max", c.devices.cost_max);
    r.read_double(*sec, "devices", "stale_cost_discount", c.devices.stale_cost_discount);
    r.read_int(*sec, "devices", "stale_lag", c.devices.stale_lag);
    if (auto it = sec->find("attack_kind_weights"); it != sec->end()) {
      if (!it->is_object()) {
        r.fail("devices.attack_kind_weights must be an object");
      } else {
        r.check_keys(*it, "devices.attack_kind_weights", {"stale", "tamper", "mitm"});
        r.read_double(*it, "devices.attack_kind_weights", "stale",
                      c.devices.attack_kind_weights.stale);
        r.read_double(*it, "devices.attack_kind_weights", "tamper",
                      c.devices.attack_kind_weights.tamper);
        r.read_double(*it, "devices.attack_kind_weights", "mitm",
                      c.devices.attack_kind_weights.mitm);
      }
    }
    r.read_double(*sec, "devices", "bid_markup", c.devices.bid_markup);
    r.read_double(*sec, "devices", "payload_kbps_min", c.devices.payload_kbps_min);
    r.read_double(*sec, "devices", "payload_kbps_max", c.devices.payload_kbps_max);
    r.read_double(*sec, "devices", "channel_rate_kbps", c.devices.channel_rate_kbps);
    r.read_double(*sec, "devices", "descriptor_dropout_prob",
                  c.devices.descriptor_dropout_prob);
  }
  if (const auto* sec = r.section(root, "valuation")) {
    r.check_keys(*sec, "valuation",
                 {"semantic_value_min", "semantic_value_max", "weather_multiplier"});
    r.read_double(*sec, "valuation", "semantic_value_min", c.valuation.semantic_value_min);
    r.read_double(*sec, "valuation", "semantic_value_max", c.valuation.semantic_value_max);
    r.read_double(*sec, "valuation", "weather_multiplier", c.valuation.weather_multiplier);
  }
  if (const auto* sec = r.section(root, "feedback")) {
    r.check_keys(*sec, "feedback", {"detection_prob"});
    r.read_double(*sec, "feedback", "detection_prob", c.feedback.detection_prob);
  }

  if (result.diagnostics.empty())
    for (auto& problem : validate_config(c)) result.diagnostics.push_back(problem);
  if (result.diagnostics.empty()) result.config = c;
  return result;
}

/// Parses config text; syntax errors come back with a line/column address.
inline ConfigParseResult parse_config_text(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    ConfigParseResult result;
    result.diagnostics.push_back("line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + e.what());
    return result;
  }
  return config_from_json(root);
}

inline ConfigParseResult load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigParseResult result;
    result.diagnostics.push_back("cannot read scenario file: " + path);
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// ---------------------------------------------------------------------------
// Reports

inline ordered_json type_metrics_to_json(const TypeMetrics& m) {
  return ordered_json{{"type1", m.type1}, {"type2", m.type2}, {"type3", m.type3}};
}

/// Self-describing per-run report record.
inline ordered_json report_to_json(const MetricsReport& report, const ScenarioConfig& config,
                                   std::string_view arm_name, std::uint64_t seed) {
  ordered_json j;
  j["schema"] = "twinmarket-report-v1";
  j["arm"] = std::string(arm_name);
  j["seed"] = seed;
  j["config"] = {{"n_devices", config.simulation.n_devices},
                 {"episodes", config.simulation.episodes},
                 {"steps_per_episode", config.simulation.steps_per_episode},
                 {"vmu_count", config.simulation.vmu_count},
                 {"reputation_enabled", config.simulation.reputation_enabled},
                 {"filtering_enabled", config.simulation.filtering_enabled}};
  ordered_json metrics;
  metrics["acceptance_rate"] = type_metrics_to_json(report.acceptance_rate);
  metrics["average_social_welfare"] = report.average_social_welfare;
  metrics["successful_attack_rate"] = report.successful_attack_rate;
  ordered_json episodes = ordered_json::array();
  for (const auto& em : report.episodes) {
    episodes.push_back({{"episode", em.episode},
                        {"acceptance_rate", type_metrics_to_json(em.acceptance_rate)},
                        {"average_social_welfare", em.average_social_welfare},
                        {"successful_attack_rate", em.successful_attack_rate}});
  }
  metrics["episodes"] = std::move(episodes);
  j["metrics"] = std::move(metrics);
  return j;
}

/// Flat per-run table: scope,episode,metric,value rows.
inline std::string report_to_table(const MetricsReport& report, std::string_view arm_name,
                                   std::uint64_t seed) {
  std::ostringstream out;
  out << "arm,seed,scope,episode,metric,value\n";
  const std::string prefix = std::string(arm_name) + "," + std::to_string(seed) + ",";
  auto run_row = [&](const char* metric, double value) {
    out << prefix << "run,," << metric << "," << format_double(value) << "\n";
  };
  run_row("acceptance_rate_type1", report.acceptance_rate.type1);
  run_row("acceptance_rate_type2", report.acceptance_rate.type2);
  run_row("acceptance_rate_type3", report.acceptance_rate.type3);
  run_row("average_social_welfare", report.average_social_welfare);
  run_row("successful_attack_rate", report.successful_attack_rate);
  for (const auto& em : report.episodes) {
    auto row = [&](const char* metric, double value) {
      out << prefix << "episode," << em.episode << "," << metric << ","
          << format_double(value) << "\n";
    };
    row("acceptance_rate_type1", em.acceptance_rate.type1);
    row("acceptance_rate_type2", em.acceptance_rate.type2);
    row("acceptance_rate_type3", em.acceptance_rate.type3);
    row("average_social_welfare", em.average_social_welfare);
    row("successful_attack_rate", em.successful_attack_rate);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Bid lists (standalone solver work) and episode logs

inline ordered_json bids_to_json(const std::vector<Bid>& bids) {
  ordered_json arr = ordered_json::array();
  for (const auto& b : bids)
    arr.push_back({{"device_id", b.device_id},
                   {"price", b.price},
                   {"semantic_value", b.semantic_value},
                   {"channels", b.channels}});
  return arr;
}

inline std::vector<Bid> bids_from_json(const ordered_json& arr) {
  if (!arr.is_array()) throw std::invalid_argument("bid list must be a JSON array");
  std::vector<Bid> bids;
  for (const auto& item : arr) {
    Bid b;
    b.device_id = item.at("device_id").get<int>();
    b.price = item.at("price").get<double>();
    b.semantic_value = item.at("semantic_value").get<double>();
    b.channels = item.at("channels").get<int>();
    bids.push_back(b);
  }
  return bids;
}

inline const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::StaleData: return "stale";
    case AttackKind::Tampering: return "tamper";
    default: return "mitm";
  }
}

/// One JSON record per timestep, episodes concatenated.
inline std::string episode_logs_to_jsonl(const std::vector<EpisodeLog>& logs) {
  std::ostringstream out;
  for (const auto& episode : logs) {
    for (const auto& step : episode.steps) {
      ordered_json j;
      j["episode"] = step.episode;
      j["step"] = step.step;
      j["global_step"] = step.global_step;
      j["gated"] = step.gated;
      j["winners"] = step.winners;
      ordered_json attacks = ordered_json::array();
      for (const auto& a : step.attacks)
        attacks.push_back(a ? ordered_json(attack_kind_name(*a)) : ordered_json(nullptr));
      j["attacks"] = std::move(attacks);
      j["flagged_cubes"] = step.flagged_cubes;
      j["blamed"] = step.blamed;
      j["reputations"] = step.reputations;
      j["social_welfare"] = step.social_welfare;
      j["attack_success"] = step.attack_success;
      j["noop_perturbations"] = step.noop_perturbations;
      out << j.dump() << "\n";
    }
  }
  return out.str();
}

}  // namespace twinmarket
