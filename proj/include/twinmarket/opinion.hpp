#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinmarket {

/// A subjective-logic opinion one rater holds about one device: a point on
/// the (belief, disbelief, uncertainty) simplex plus the coefficient alpha
/// that maps uncertainty into the scalar reputation score.
struct Opinion {
  double belief = 0.0;
  double disbelief = 0.0;
  double uncertainty = 1.0;
  double alpha = 0.5;

  bool on_simplex(double tol = 1e-9) const {
    auto in_unit = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
    return std::abs(belief + disbelief + uncertainty - 1.0) <= tol && in_unit(belief) &&
           in_unit(disbelief) && in_unit(uncertainty) && alpha >= 0.0 && alpha <= 1.0;
  }
};

/// Interaction counts between one device and one rater in a single time
/// window. Window indices are global timesteps, unique per pair history.
struct InteractionWindow {
  std::int64_t window_index = 0;
  int positives = 0;
  int negatives = 0;
};

struct ReputationParams {
  double omega1 = 0.4;       ///< weight of positive interactions
  double omega2 = 0.6;       ///< weight of negative interactions
  double kappa = 1.0;        ///< uncertainty constant
  double fading_z = 0.8;     ///< fading base, strictly inside (0,1)
  int horizon_windows = 50;  ///< windows kept per (device, rater) pair
  double alpha_default = 0.5;

  std::vector<std::string> check() const {
    std::vector<std::string> problems;
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(omega1)) problems.push_back("reputation.omega1 must lie in [0,1]");
    if (!in_unit(omega2)) problems.push_back("reputation.omega2 must lie in [0,1]");
    if (std::abs(omega1 + omega2 - 1.0) > 1e-9)
      problems.push_back("reputation.omega1 + reputation.omega2 must sum to 1");
    if (!(kappa > 0.0)) problems.push_back("reputation.kappa must be > 0");
    if (!(fading_z > 0.0 && fading_z < 1.0))
      problems.push_back("reputation.fading_z must lie strictly inside (0,1)");
    if (horizon_windows < 1) problems.push_back("reputation.horizon_windows must be >= 1");
    if (!in_unit(alpha_default)) problems.push_back("reputation.alpha_default must lie in [0,1]");
    return problems;
  }

  bool valid() const { return check().empty(); }

  void require_valid() const {
    const auto problems = check();
    if (problems.empty()) return;
    std::string joined = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) joined += "; " + problems[i];
    throw std::invalid_argument(joined);
  }
};

/// The cold-start opinion: no evidence, all mass on uncertainty.
inline Opinion full_uncertainty_opinion(double alpha) { return Opinion{0.0, 0.0, 1.0, alpha}; }

/// Per-window opinion from interaction counts:
///   b = w1*p / (w1*p + w2*q + kappa)
///   d = w2*q / (w1*p + w2*q + kappa)
///   u = kappa / (w1*p + w2*q + kappa)
/// The three components always sum to 1.
inline Opinion opinion_from_counts(const InteractionWindow& w, const ReputationParams& params,
                                   double alpha) {
  params.require_valid();
  if (w.positives < 0 || w.negatives < 0)
    throw std::invalid_argument("interaction counts must be nonnegative");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
  const double denom = params.omega1 * w.positives + params.omega2 * w.negatives + params.kappa;
  Opinion o;
  o.belief = params.omega1 * w.positives / denom;
  o.disbelief = params.omega2 * w.negatives / denom;
  o.uncertainty = params.kappa / denom;
  o.alpha = alpha;
  return o;
}

/// Freshness-weighted average over a window-ordered opinion history (oldest
/// first). The window y positions behind the most recent one carries weight
/// z^y, so fresh windows dominate. A weighted average of simplex points stays
/// on the simplex. Empty history carries no information; callers substitute
/// the full-uncertainty opinion.
inline std::optional<Opinion> fade_opinions(std::span<const Opinion> history,
                                            const ReputationParams& params) {
  params.require_valid();
  if (history.empty()) return std::nullopt;
  double w = 1.0, wsum = 0.0, b = 0.0, d = 0.0, u = 0.0;
  for (std::size_t i = history.size(); i-- > 0;) {
    b += w * history[i].belief;
    d += w * history[i].disbelief;
    u += w * history[i].uncertainty;
    wsum += w;
    w *= params.fading_z;
  }
  Opinion out;
  out.belief = b / wsum;
  out.disbelief = d / wsum;
  out.uncertainty = u / wsum;
  out.alpha = history.back().alpha;
  return out;
}

/// Scalar reputation of an opinion: belief plus alpha-weighted uncertainty.
inline double opinion_reputation(const Opinion& o) { return o.belief + o.alpha * o.uncertainty; }

}  // namespace twinmarket
