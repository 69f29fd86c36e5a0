#include <catch2/catch_amalgamated.hpp>

#include "twinmarket/json_io.hpp"
#include "twinmarket/scenario.hpp"

using namespace twinmarket;

TEST_CASE("the default scenario validates cleanly") {
  REQUIRE(validate_config(ScenarioConfig{}).empty());
}

TEST_CASE("twenty devices split 7/7/6 across the three types") {
  ScenarioConfig config;
  const auto counts = resolved_type_counts(config);
  REQUIRE(counts == std::array<int, 3>{7, 7, 6});
  config.simulation.n_devices = 21;
  REQUIRE(resolved_type_counts(config) == std::array<int, 3>{7, 7, 7});
  config.devices.type_counts = {2, 9, 10};
  REQUIRE(resolved_type_counts(config) == std::array<int, 3>{2, 9, 10});
}

TEST_CASE("every violation is reported, not just the first") {
  ScenarioConfig config;
  config.reputation.omega1 = 0.7;  // weights sum to 1.3
  config.reputation.fading_z = 1.0;
  config.simulation.episodes = 0;
  const auto problems = validate_config(config);
  REQUIRE(problems.size() == 3);
  bool weight_sum = false, fading = false, episodes = false;
  for (const auto& p : problems) {
    weight_sum = weight_sum || p.find("omega1 + reputation.omega2 must sum to 1") != std::string::npos;
    fading = fading || p.find("fading_z") != std::string::npos;
    episodes = episodes || p.find("episodes") != std::string::npos;
  }
  REQUIRE(weight_sum);
  REQUIRE(fading);
  REQUIRE(episodes);
}

TEST_CASE("mismatched type counts are rejected") {
  ScenarioConfig config;
  config.devices.type_counts = {5, 5, 5};  // sums to 15, not 20
  const auto problems = validate_config(config);
  REQUIRE(problems.size() == 1);
  REQUIRE(problems[0].find("type_counts") != std::string::npos);
}

TEST_CASE("the default config round-trips through JSON") {
  const std::string text = default_config_text();
  const auto parsed = parse_config_text(text);
  REQUIRE(parsed.diagnostics.empty());
  REQUIRE(parsed.config.has_value());
  REQUIRE(config_to_json(*parsed.config).dump(2) + "\n" == text);
}

TEST_CASE("edited fields survive the round trip") {
  ScenarioConfig config;
  config.simulation.n_devices = 9;
  config.simulation.master_seed = 77;
  config.devices.type_counts = {3, 3, 3};
  config.devices.attack_kind_weights = {2.0, 1.0, 0.0};
  config.reputation.fading_z = 0.65;
  config.auction.channel_budget = 12;
  const auto parsed = config_from_json(config_to_json(config));
  REQUIRE(parsed.diagnostics.empty());
  REQUIRE(parsed.config->simulation.n_devices == 9);
  REQUIRE(parsed.config->simulation.master_seed == 77);
  REQUIRE(parsed.config->devices.type_counts == std::array<int, 3>{3, 3, 3});
  REQUIRE(parsed.config->devices.attack_kind_weights.stale == 2.0);
  REQUIRE(parsed.config->devices.attack_kind_weights.mitm == 0.0);
  REQUIRE(parsed.config->reputation.fading_z == 0.65);
  REQUIRE(parsed.config->auction.channel_budget == 12);
}

TEST_CASE("unknown keys are named in the diagnostics") {
  const std::string text = R"({"simulation": {"n_devices": 5, "n_devcies": 5}})";
  const auto parsed = parse_config_text(text);
  REQUIRE_FALSE(parsed.config.has_value());
  REQUIRE(parsed.diagnostics.size() == 1);
  REQUIRE(parsed.diagnostics[0].find("n_devcies") != std::string::npos);
}

TEST_CASE("wrong types are named in the diagnostics") {
  const std::string text = R"({"reputation": {"omega1": "high"}})";
  const auto parsed = parse_config_text(text);
  REQUIRE_FALSE(parsed.config.has_value());
  bool mentioned = false;
  for (const auto& d : parsed.diagnostics)
    mentioned = mentioned || d.find("omega1 must be a number") != std::string::npos;
  REQUIRE(mentioned);
}

TEST_CASE("syntax errors carry a line and column address") {
  const std::string text = "{\n  \"simulation\": {\n    \"n_devices\": ,\n  }\n}\n";
  const auto parsed = parse_config_text(text);
  REQUIRE_FALSE(parsed.config.has_value());
  REQUIRE(parsed.diagnostics.size() == 1);
  REQUIRE(parsed.diagnostics[0].rfind("line 3", 0) == 0);
}

TEST_CASE("invalid values in a parsed config surface the invariant") {
  const std::string text = R"({"reputation": {"fading_z": 1.0}})";
  const auto parsed = parse_config_text(text);
  REQUIRE_FALSE(parsed.config.has_value());
  REQUIRE(parsed.diagnostics.size() == 1);
  REQUIRE(parsed.diagnostics[0].find("strictly inside (0,1)") != std::string::npos);
}
