#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "twinmarket/grid.hpp"
#include "twinmarket/rng.hpp"

namespace twinmarket {

struct SceneParams {
  int cube_count = 12;
  int object_classes = 5;
  int position_cells = 27;
  int objects_per_cube_min = 1;
  int objects_per_cube_max = 4;
  double churn_prob = 0.3;  ///< per cube per step chance the content mutates
};

/// Ground-truth scene for one episode: a per-cube object set that mutates
/// with the configured churn probability each step. The full step history is
/// kept so stale deliveries can address past truth; requests beyond it clamp
/// to the episode boundary.
class SceneHistory {
 public:
  SceneHistory(const SceneParams& params, Rng& rng) : params_(params) {
    if (params.cube_count < 1) throw std::invalid_argument("cube_count must be >= 1");
    CubeContent scene;
    for (int cube = 0; cube < params.cube_count; ++cube) {
      const int target = rng.uniform_int(params.objects_per_cube_min, params.objects_per_cube_max);
      DescriptorSet objs;
      for (int attempt = 0; attempt < target * 8 && static_cast<int>(objs.size()) < target;
           ++attempt)
        objs.insert(random_descriptor(rng));
      scene.emplace(cube, std::move(objs));
    }
    steps_.push_back(std::move(scene));
  }

  const SceneParams& params() const { return params_; }

  /// Advances the scene one step: each cube mutates with churn probability.
  void advance(Rng& rng) {
    CubeContent next = steps_.back();
    for (auto& [cube, objs] : next) {
      if (!rng.bernoulli(params_.churn_prob)) continue;
      mutate(objs, rng);
    }
    steps_.push_back(std::move(next));
  }

  int current_step() const { return static_cast<int>(steps_.size()) - 1; }

  const CubeContent& current() const { return steps_.back(); }

  /// Truth at a step within the episode, clamped to what exists.
  const CubeContent& at(int step) const {
    const int clamped = std::clamp(step, 0, current_step());
    return steps_[static_cast<std::size_t>(clamped)];
  }

 private:
  ObjectDescriptor random_descriptor(Rng& rng) const {
    return ObjectDescriptor{rng.uniform_int(0, params_.object_classes - 1),
                            rng.uniform_int(0, params_.position_cells - 1)};
  }

  void mutate(DescriptorSet& objs, Rng& rng) const {
    const int op = objs.empty() ? 1 : rng.uniform_int(0, 2);
    if (op == 0) {  // one object leaves the cube
      auto it = objs.begin();
      std::advance(it, static_cast<long>(rng.below(objs.size())));
      objs.erase(it);
      return;
    }
    if (op == 1) {  // a new object appears
      for (int attempt = 0; attempt < 32; ++attempt)
        if (objs.insert(random_descriptor(rng)).second) return;
      return;
    }
    // an object moves to a different cell
    if (params_.position_cells < 2) return;
    auto it = objs.begin();
    std::advance(it, static_cast<long>(rng.below(objs.size())));
    ObjectDescriptor moved = *it;
    objs.erase(it);
    int cell = rng.uniform_int(0, params_.position_cells - 2);
    if (cell >= moved.cell) ++cell;
    moved.cell = cell;
    objs.insert(moved);
  }

  SceneParams params_;
  std::vector<CubeContent> steps_;
};

}  // namespace twinmarket
