#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "twinmarket/opinion.hpp"

namespace twinmarket {

enum class Outcome { Positive, Negative };

/// Interaction history per (device, rater) pair with bounded memory. Windows
/// are indexed by global timestep; only the most recent horizon survives, so
/// old ratings vanish instead of following a device forever. Reputation
/// queries fade each pair's in-horizon history and average across raters.
///
/// Single-writer: the simulation loop is the only mutator. All queries are
/// const and see a consistent snapshot between mutations.
class ReputationLedger {
 public:
  explicit ReputationLedger(ReputationParams params) : params_(std::move(params)) {
    params_.require_valid();
  }

  const ReputationParams& params() const { return params_; }

  void set_alpha(int device_id, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
    alpha_[device_id] = alpha;
    cache_.erase(device_id);
  }

  double alpha_for(int device_id) const {
    auto it = alpha_.find(device_id);
    return it == alpha_.end() ? params_.alpha_default : it->second;
  }

  /// Records one interaction outcome in the addressed window, creating the
  /// window if new. Windows older than the pair's latest are rejected as
  /// out-of-order. Recording evicts pair windows that fell out of the
  /// horizon and invalidates the device's cached reputation.
  bool record_interaction(int device_id, int rater_id, std::int64_t window_index,
                          Outcome outcome) {
    auto& hist = pairs_[device_id][rater_id];
    if (!hist.empty() && window_index < hist.back().window_index) return false;
    if (!hist.empty() && hist.back().window_index == window_index) {
      bump(hist.back(), outcome);
    } else {
      InteractionWindow w;
      w.window_index = window_index;
      bump(w, outcome);
      hist.push_back(w);
      while (!hist.empty() && hist.front().window_index <= window_index - params_.horizon_windows)
        hist.pop_front();
    }
    cache_.erase(device_id);
    return true;
  }

  /// Faded opinion a rater holds about a device, looking back one horizon
  /// from now_window (inclusive). nullopt when the pair has no in-horizon
  /// history.
  std::optional<Opinion> pair_opinion(int device_id, int rater_id,
                                      std::int64_t now_window) const {
    auto dev = pairs_.find(device_id);
    if (dev == pairs_.end()) return std::nullopt;
    auto pair = dev->second.find(rater_id);
    if (pair == dev->second.end()) return std::nullopt;
    return fade_history(pair->second, device_id, now_window);
  }

  /// Final reputation of a device at now_window: the mean of the per-rater
  /// faded reputations over raters with in-horizon history. A device nobody
  /// rated yet (or whose whole history vanished) scores its alpha.
  double reputation(int device_id, std::int64_t now_window) const {
    auto cached = cache_.find(device_id);
    if (cached != cache_.end() && cached->second.first == now_window)
      return cached->second.second;

    double sum = 0.0;
    int raters = 0;
    auto dev = pairs_.find(device_id);
    if (dev != pairs_.end()) {
      for (const auto& [rater_id, hist] : dev->second) {
        auto opinion = fade_history(hist, device_id, now_window);
        if (!opinion) continue;
        sum += opinion_reputation(*opinion);
        ++raters;
      }
    }
    const double value = raters == 0 ? alpha_for(device_id) : sum / raters;
    cache_[device_id] = {now_window, value};
    return value;
  }

  std::vector<int> raters_with_history(int device_id, std::int64_t now_window) const {
    std::vector<int> out;
    auto dev = pairs_.find(device_id);
    if (dev == pairs_.end()) return out;
    for (const auto& [rater_id, hist] : dev->second)
      if (fade_history(hist, device_id, now_window)) out.push_back(rater_id);
    return out;
  }

  /// Raw stored windows for a pair (oldest first); nullptr when absent.
  const std::deque<InteractionWindow>* history(int device_id, int rater_id) const {
    auto dev = pairs_.find(device_id);
    if (dev == pairs_.end()) return nullptr;
    auto pair = dev->second.find(rater_id);
    return pair == dev->second.end() ? nullptr : &pair->second;
  }

 private:
  static void bump(InteractionWindow& w, Outcome outcome) {
    if (outcome == Outcome::Positive)
      ++w.positives;
    else
      ++w.negatives;
  }

  // Fused materialize-and-fade over the in-horizon suffix of a pair history.
  // Matches opinion_from_counts + fade_opinions on the same windows.
  std::optional<Opinion> fade_history(const std::deque<InteractionWindow>& hist, int device_id,
                                      std::int64_t now_window) const {
    const std::int64_t min_index = now_window - params_.horizon_windows + 1;
    const double alpha = alpha_for(device_id);
    double w = 1.0, wsum = 0.0, b = 0.0, d = 0.0, u = 0.0;
    bool any = false;
    for (auto it = hist.rbegin(); it != hist.rend(); ++it) {
      if (it->window_index > now_window) continue;
      if (it->window_index < min_index) break;
      const double denom =
          params_.omega1 * it->positives + params_.omega2 * it->negatives + params_.kappa;
      b += w * (params_.omega1 * it->positives / denom);
      d += w * (params_.omega2 * it->negatives / denom);
      u += w * (params_.kappa / denom);
      wsum += w;
      w *= params_.fading_z;
      any = true;
    }
    if (!any) return std::nullopt;
    return Opinion{b / wsum, d / wsum, u / wsum, alpha};
  }

  std::map<int, std::map<int, std::deque<InteractionWindow>>> pairs_;
  std::map<int, double> alpha_;
  ReputationParams params_;
  mutable std::map<int, std::pair<std::int64_t, double>> cache_;
};

}  // namespace twinmarket
