#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinmarket {

/// A device's declared type in the reverse auction: asked price, the VSP's
/// valuation of the offered semantic data, and the wireless channels needed
/// to deliver it.
struct Bid {
  int device_id = 0;
  double price = 0.0;
  double semantic_value = 0.0;
  int channels = 1;
};

enum class PaymentRule { PayAsBid };

struct AuctionConfig {
  int channel_budget = 6;           ///< channels the VSP can hand out per round
  double vsp_channel_cost = 1.0;    ///< spectrum cost charged to the VSP
  double reputation_threshold = 0.5;
  PaymentRule payment_rule = PaymentRule::PayAsBid;

  std::vector<std::string> check() const {
    std::vector<std::string> problems;
    if (channel_budget < 1) problems.push_back("auction.channel_budget must be >= 1");
    if (!(vsp_channel_cost >= 0.0)) problems.push_back("auction.vsp_channel_cost must be >= 0");
    if (!(reputation_threshold >= 0.0 && reputation_threshold <= 1.0))
      problems.push_back("auction.reputation_threshold must lie in [0,1]");
    return problems;
  }
};

/// The auction outcome: selected devices, their payments, the realized
/// welfare objective and the buyer's share of it. Payments are zero (absent)
/// for everyone else.
struct Allocation {
  std::vector<int> winners;        // ascending device ids
  std::map<int, double> payments;  // winners only
  double social_welfare = 0.0;
  double vsp_utility = 0.0;

  double payment_for(int device_id) const {
    auto it = payments.find(device_id);
    return it == payments.end() ? 0.0 : it->second;
  }
  bool won(int device_id) const {
    return std::binary_search(winners.begin(), winners.end(), device_id);
  }
};

/// Admission control: only bids from devices at or above the reputation
/// threshold reach winner determination. Cold-start devices carry their
/// alpha, so the >= comparison admits them at the default threshold. Input
/// order is preserved. Throws if a bidder has no reputation entry.
inline std::vector<Bid> gate_by_reputation(const std::vector<Bid>& bids,
                                           const std::map<int, double>& reputations,
                                           const AuctionConfig& config) {
  std::vector<Bid> admitted;
  admitted.reserve(bids.size());
  for (const auto& bid : bids)
    if (reputations.at(bid.device_id) >= config.reputation_threshold) admitted.push_back(bid);
  return admitted;
}

/// Winner determination for the channel-budgeted welfare maximization:
///
///   max  sum_i x_i * (value_i - price_i)
///   s.t. sum_i x_i * channels_i <= budget,  x_i in {0,1}
///
/// Solved exactly by dynamic programming over the channel budget (0/1
/// knapsack; desk-scale instances make an external ILP solver pointless).
/// Bids whose value does not exceed their price are never selected. Among
/// welfare-equal optima the lexicographically smallest winner set by device
/// id is returned, so identical inputs always yield identical allocations.
/// Payments follow the configured rule (pay-as-bid: winners get their price).
inline Allocation solve_winner_determination(const std::vector<Bid>& bids,
                                             const AuctionConfig& config) {
  if (config.channel_budget < 1) throw std::invalid_argument("channel_budget must be >= 1");
  struct Item {
    int device;
    double value;
    int weight;
    double price;
    double semantic_value;
  };
  std::vector<Item> items;
  items.reserve(bids.size());
  for (const auto& bid : bids) {
    if (bid.channels < 1) throw std::invalid_argument("bid channels must be >= 1");
    const double value = bid.semantic_value - bid.price;
    if (value > 0.0)
      items.push_back({bid.device_id, value, bid.channels, bid.price, bid.semantic_value});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.device < b.device; });

  const int budget = config.channel_budget;
  const std::size_t n = items.size();
  // best[i][w]: maximum achievable value with items i..n-1 under capacity w
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(budget + 1, 0.0));
  for (std::size_t i = n; i-- > 0;) {
    const auto& item = items[i];
    for (int w = 0; w <= budget; ++w) {
      double value = best[i + 1][w];
      if (item.weight <= w)
        value = std::max(value, item.value + best[i + 1][w - item.weight]);
      best[i][w] = value;
    }
  }

  // Greedy reconstruction in ascending device order; including an item
  // whenever the optimum stays reachable yields the lexicographically
  // smallest optimal winner set.
  Allocation alloc;
  int remaining = budget;
  double achieved = 0.0, value_bought = 0.0, paid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& item = items[i];
    if (item.weight <= remaining &&
        item.value + best[i + 1][remaining - item.weight] == best[i][remaining]) {
      alloc.winners.push_back(item.device);
      alloc.payments[item.device] = item.price;  // pay-as-bid
      achieved += item.value;
      value_bought += item.semantic_value;
      paid += item.price;
      remaining -= item.weight;
    }
  }
  alloc.social_welfare = achieved - config.vsp_channel_cost;
  alloc.vsp_utility = value_bought - paid - config.vsp_channel_cost;
  return alloc;
}

/// Device-side utility: payment received minus the cost actually incurred.
/// Losers receive no payment and incur no cost, so callers pass (0, 0).
inline double device_utility(double payment, double incurred_cost) {
  return payment - incurred_cost;
}

/// VSP utility: value of the delivered semantic data minus payments made and
/// the channel allocation cost.
inline double vsp_utility(const Allocation& alloc, const std::vector<Bid>& bids,
                          const AuctionConfig& config) {
  std::map<int, const Bid*> by_id;
  for (const auto& bid : bids) by_id.emplace(bid.device_id, &bid);
  double total = 0.0;
  for (int id : alloc.winners) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw std::invalid_argument("allocation winner missing from bid list");
    total += it->second->semantic_value - alloc.payment_for(id);
  }
  return total - config.vsp_channel_cost;
}

}  // namespace twinmarket
