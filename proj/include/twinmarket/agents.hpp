#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twinmarket/auction.hpp"
#include "twinmarket/grid.hpp"
#include "twinmarket/rng.hpp"
#include "twinmarket/scene.hpp"

namespace twinmarket {

enum class DeviceType { Type1 = 1, Type2 = 2, Type3 = 3 };

enum class AttackKind { StaleData, Tampering, ManInTheMiddle };

struct AttackKindWeights {
  double stale = 1.0;
  double tamper = 1.0;
  double mitm = 1.0;
  double total() const { return stale + tamper + mitm; }
};

/// A simulated SIoT device: its attack policy parameters, cost model,
/// channel demand and the cubes it senses into.
struct DeviceProfile {
  int device_id = 0;
  DeviceType type = DeviceType::Type1;
  double per_step_attack_prob = 0.05;    // Type-1/2: independent coin per timestep
  double per_episode_attack_prob = 0.5;  // Type-3: one coin per episode
  double honest_cost = 2.0;
  double stale_cost_discount = 0.5;
  int stale_lag = 5;
  int channels = 1;
  std::vector<int> covered_cubes;  // ascending
  double alpha = 0.5;
  double bid_markup = 0.0;
  double descriptor_dropout_prob = 0.0;
};

struct AttackDecision {
  bool attack = false;
  AttackKind kind = AttackKind::Tampering;
};

/// Episode-level coin; only Type-3 devices consult it, but it is drawn for
/// every device so per-device streams stay aligned across type changes.
inline bool draw_episode_attack(const DeviceProfile& profile, Rng& rng) {
  return rng.bernoulli(profile.per_episode_attack_prob);
}

/// Per-step attack policy. Type-1/2 flip an independent coin each timestep;
/// Type-3 sticks to its episode-level choice for the whole episode. The call
/// always consumes exactly two draws, so a device's decision sequence depends
/// only on its own stream.
inline AttackDecision decide_attack(const DeviceProfile& profile, bool episode_attack,
                                    const AttackKindWeights& kinds, Rng& rng) {
  const double u_decision = rng.uniform01();
  const double u_kind = rng.uniform01();
  AttackDecision decision;
  decision.attack = profile.type == DeviceType::Type3
                        ? episode_attack
                        : u_decision < profile.per_step_attack_prob;
  if (!decision.attack) return decision;
  const double total = kinds.total();
  if (!(total > 0.0)) throw std::invalid_argument("attack kind weights must have positive total");
  const double x = u_kind * total;
  if (x < kinds.stale)
    decision.kind = AttackKind::StaleData;
  else if (x < kinds.stale + kinds.tamper)
    decision.kind = AttackKind::Tampering;
  else
    decision.kind = AttackKind::ManInTheMiddle;
  return decision;
}

struct GeneratedContent {
  CubeContent delivery;
  double incurred_cost = 0.0;
  int sensed_at = 0;           // freshness tag: episode step of the underlying sensing data
  int noop_perturbations = 0;  // removal attacks that hit an already-empty cube
};

namespace detail {

// One perturbation per attacked cube: remove an object, add a spurious one,
// or move one to a different cell. Returns false only when nothing could
// change (removal from an empty cube).
inline bool perturb_objects(DescriptorSet& objs, const SceneParams& sp, Rng& rng) {
  int op = rng.uniform_int(0, 2);
  if (op != 1 && objs.empty()) return false;
  if (op == 1) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const ObjectDescriptor candidate{rng.uniform_int(0, sp.object_classes - 1),
                                       rng.uniform_int(0, sp.position_cells - 1)};
      if (objs.insert(candidate).second) return true;
    }
    op = 0;  // cube saturated, fall back to removing
    if (objs.empty()) return false;
  }
  if (op == 0) {
    auto it = objs.begin();
    std::advance(it, static_cast<long>(rng.below(objs.size())));
    objs.erase(it);
    return true;
  }
  // move
  if (sp.position_cells < 2) {  // nowhere to move to; drop the object instead
    auto it = objs.begin();
    std::advance(it, static_cast<long>(rng.below(objs.size())));
    objs.erase(it);
    return true;
  }
  auto it = objs.begin();
  std::advance(it, static_cast<long>(rng.below(objs.size())));
  ObjectDescriptor moved = *it;
  objs.erase(it);
  int cell = rng.uniform_int(0, sp.position_cells - 2);
  if (cell >= moved.cell) ++cell;
  moved.cell = cell;
  objs.insert(moved);
  return true;
}

}  // namespace detail

/// Content a device delivers for its covered cubes, plus the cost it
/// actually incurred. Honest devices report current truth. Stale attackers
/// replay the scene from stale_lag steps back (clamped to the episode start)
/// at a discounted cost, since no fresh sensing happens. Tampering perturbs
/// one object per attacked (covered) cube at full cost; a man-in-the-middle
/// attack has the same effect on the delivered content, and the compromised
/// device carries the blame.
inline GeneratedContent generate_content(const DeviceProfile& profile, const SceneHistory& scene,
                                         bool attack, AttackKind kind, Rng& rng) {
  GeneratedContent out;
  const int now = scene.current_step();
  const bool stale = attack && kind == AttackKind::StaleData;
  out.sensed_at = stale ? std::max(0, now - profile.stale_lag) : now;
  const CubeContent& base = scene.at(out.sensed_at);
  out.incurred_cost = stale ? profile.honest_cost * profile.stale_cost_discount
                            : profile.honest_cost;
  for (int cube : profile.covered_cubes) {
    auto it = base.find(cube);
    if (it == base.end()) throw std::invalid_argument("device covers a cube missing from the scene");
    DescriptorSet objs = it->second;
    if (profile.descriptor_dropout_prob > 0.0) {
      DescriptorSet kept;
      for (const auto& obj : objs)
        if (!rng.bernoulli(profile.descriptor_dropout_prob)) kept.insert(obj);
      objs = std::move(kept);
    }
    if (attack && !stale && !detail::perturb_objects(objs, scene.params(), rng))
      ++out.noop_perturbations;
    out.delivery.emplace(cube, std::move(objs));
  }
  return out;
}

struct ValuationConfig {
  double semantic_value_min = 4.0;
  double semantic_value_max = 8.0;
  double weather_multiplier = 1.0;  ///< adverse weather raises valuations
};

/// Bid formation. Truthful by default: the asked price equals the device's
/// service cost (plus any configured markup). The semantic valuation is
/// drawn fresh per auction round and scaled by the weather multiplier.
inline Bid sample_bid(const DeviceProfile& profile, const ValuationConfig& valuation, Rng& rng) {
  Bid bid;
  bid.device_id = profile.device_id;
  bid.price = profile.honest_cost * (1.0 + profile.bid_markup);
  bid.semantic_value =
      rng.uniform_real(valuation.semantic_value_min, valuation.semantic_value_max) *
      valuation.weather_multiplier;
  bid.channels = profile.channels;
  return bid;
}

}  // namespace twinmarket
