#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twinmarket/rng.hpp"

namespace twinmarket {

/// One semantic object inside a cube: a class label plus the quantized
/// position cell it occupies. Devices viewing the same scene produce the
/// same descriptors, so honest peers agree exactly.
struct ObjectDescriptor {
  int class_id = 0;
  int cell = 0;
  auto operator<=>(const ObjectDescriptor&) const = default;
};

using DescriptorSet = std::set<ObjectDescriptor>;
using CubeContent = std::map<int, DescriptorSet>;     // cube id -> objects
using DeliveredContent = std::map<int, CubeContent>;  // device id -> per-cube delivery

/// Static layout of the covered space: which devices sense into which cube.
struct CubeGrid {
  int cube_count = 0;
  std::map<int, std::vector<int>> coverage;  // cube id -> covering device ids, ascending

  bool covers(int cube_id) const {
    auto it = coverage.find(cube_id);
    return it != coverage.end() && !it->second.empty();
  }
};

/// Negative VMU feedback for one timestep: the cubes users complained about
/// and who complained. Silence about a cube counts as positive.
struct FeedbackBatch {
  std::set<int> flagged_cubes;
  std::map<int, std::set<int>> reporters;  // cube id -> reporting VMU ids
};

struct FilterResult {
  std::set<int> negative_devices;   // devices attributed the blame
  std::set<int> positive_devices;   // delivering devices cleared this step
  std::vector<int> rejected_cubes;  // flagged cubes without any known delivery/coverage
};

/// Jaccard index of two object-descriptor sets. Two empty sets count as
/// identical content.
inline double pairwise_similarity(const DescriptorSet& a, const DescriptorSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& d : a) inter += b.count(d);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Blame attribution for flagged cubes. Per flagged cube the delivering
/// device whose content is least similar to its peers' (smallest summed
/// pairwise similarity) is rated negative; ties blame the lowest device id,
/// and a sole deliverer is blamed outright. Every delivering device that
/// escapes blame is cleared as positive. Flagged cubes without coverage or
/// deliveries are rejected and skipped.
inline FilterResult filter_feedback(const CubeGrid& grid, const DeliveredContent& delivered,
                                    const FeedbackBatch& batch) {
  FilterResult result;
  for (int cube : batch.flagged_cubes) {
    if (!grid.covers(cube)) {
      result.rejected_cubes.push_back(cube);
      continue;
    }
    std::vector<std::pair<int, const DescriptorSet*>> entries;  // ascending device id
    for (const auto& [device, content] : delivered) {
      auto it = content.find(cube);
      if (it != content.end()) entries.emplace_back(device, &it->second);
    }
    if (entries.empty()) {
      result.rejected_cubes.push_back(cube);
      continue;
    }
    int blamed = entries.front().first;
    if (entries.size() > 1) {
      double lowest_total = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < entries.size(); ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < entries.size(); ++j)
          if (j != i) total += pairwise_similarity(*entries[i].second, *entries[j].second);
        if (total < lowest_total) {
          lowest_total = total;
          blamed = entries[i].first;
        }
      }
    }
    result.negative_devices.insert(blamed);
  }
  for (const auto& [device, content] : delivered)
    if (!content.empty() && result.negative_devices.count(device) == 0)
      result.positive_devices.insert(device);
  return result;
}

/// VMU reaction to the assembled digital twin. A cube is flagged with the
/// given detection probability when any delivery into it deviates from the
/// scene ground truth, and never otherwise; each flag carries one uniformly
/// drawn reporter. False attribution can only arise downstream, in
/// filter_feedback.
inline FeedbackBatch generate_vmu_feedback(const DeliveredContent& delivered,
                                           const CubeContent& ground_truth, double detection_prob,
                                           int vmu_count, Rng& rng) {
  if (vmu_count < 1) throw std::invalid_argument("vmu_count must be >= 1");
  if (detection_prob < 0.0 || detection_prob > 1.0)
    throw std::invalid_argument("detection_prob must lie in [0,1]");
  std::set<int> cubes;
  for (const auto& [device, content] : delivered)
    for (const auto& [cube, objs] : content) cubes.insert(cube);

  FeedbackBatch batch;
  for (int cube : cubes) {
    auto truth = ground_truth.find(cube);
    if (truth == ground_truth.end())
      throw std::invalid_argument("ground truth missing for a delivered cube");
    bool deviates = false;
    for (const auto& [device, content] : delivered) {
      auto it = content.find(cube);
      if (it != content.end() && it->second != truth->second) {
        deviates = true;
        break;
      }
    }
    if (deviates && rng.bernoulli(detection_prob)) {
      batch.flagged_cubes.insert(cube);
      batch.reporters[cube].insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(vmu_count))));
    }
  }
  return batch;
}

}  // namespace twinmarket
