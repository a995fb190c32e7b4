#pragma once

// Deterministic family of prox test instances: overlapping / disjoint /
// nested / random-subset structures, weight conventions and penalty levels
// cycled so the 200 golden instances span lambda1, lambda2 from 0 to
// supra-threshold. Ids 0-3 are handcrafted boundary cases. The generated
// inputs are frozen into the golden files; this sampler only has to stay
// stable for regeneration.

#include <algorithm>
#include <cmath>

#include "ogl/prox.hpp"
#include "ogl/rng.hpp"

namespace ogl::testing {

inline constexpr int kGoldenInstanceCount = 200;

inline ProxProblem make_prox_instance(int id) {
  ProxProblem problem;
  if (id == 0) {
    // Symmetric two-group overlap; x*_0 == x*_2 at the optimum.
    problem.v = Vector::Constant(3, 1.0);
    problem.gs = validate_groups({{0, 1}, {1, 2}}, {1.0, 1.0}, 3);
    problem.params = {0.0, 0.5};
    return problem;
  }
  if (id == 1) {
    // Single group: closed form max(0, 1 - l2 w/||u||) u after shrinkage.
    problem.v = Vector(2);
    problem.v << 3.0, 4.0;
    problem.gs = validate_groups({{0, 1}}, {1.0}, 2);
    problem.params = {1.0, 1.0};
    return problem;
  }
  if (id == 2) {
    // Boundary case ||u|| == l2 w exactly; the group is zeroed.
    problem.v = Vector(2);
    problem.v << 3.0, 4.0;
    problem.gs = validate_groups({{0, 1}}, {1.0}, 2);
    problem.params = {0.0, 5.0};
    return problem;
  }
  if (id == 3) {
    // Hand-traced cycling example: group 0 zeroed, group 1 survives.
    problem.v = Vector(3);
    problem.v << -0.1, 0.1, 5.0;
    problem.gs = validate_groups({{0, 1}, {1, 2}}, {1.0, 1.0}, 3);
    problem.params = {0.0, 1.0};
    return problem;
  }

  RandomStream rng(1000 + static_cast<std::uint64_t>(id));
  const int p = 1 + static_cast<int>(rng.below(30));

  std::vector<std::vector<int>> groups;
  const int kind = id % 4;
  if (kind == 0) {
    // Chain with overlap.
    const int size = 1 + static_cast<int>(rng.below(std::min(p, 6)));
    const int overlap = size > 1 ? static_cast<int>(rng.below(size)) : 0;
    const int stride = std::max(1, size - overlap);
    for (int start = 0; start + size <= p && groups.size() < 10;
         start += stride) {
      std::vector<int> group;
      for (int k = 0; k < size; ++k) group.push_back(start + k);
      groups.push_back(std::move(group));
    }
  } else if (kind == 1) {
    // Disjoint blocks of random sizes.
    int start = 0;
    while (start < p && groups.size() < 10) {
      const int size = 1 + static_cast<int>(rng.below(4));
      std::vector<int> group;
      for (int k = 0; k < size && start + k < p; ++k) group.push_back(start + k);
      groups.push_back(std::move(group));
      start += size;
    }
  } else if (kind == 2) {
    // One enclosing group plus nested sub-groups.
    const int cap = std::min(p, 12);
    const int outer = 1 + static_cast<int>(rng.below(cap));
    std::vector<int> big;
    for (int k = 0; k < outer; ++k) big.push_back(k);
    groups.push_back(big);
    const int subs = 1 + static_cast<int>(rng.below(5));
    for (int s = 0; s < subs; ++s) {
      const int lo = static_cast<int>(rng.below(outer));
      const int len = 1 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(outer - lo)));
      std::vector<int> group;
      for (int k = lo; k < lo + len; ++k) group.push_back(k);
      groups.push_back(std::move(group));
    }
  } else {
    // Random subsets, capped at 12 members.
    const int count = 1 + static_cast<int>(rng.below(6));
    for (int s = 0; s < count; ++s) {
      std::vector<int> group;
      for (int j = 0; j < p; ++j) {
        if (rng.uniform() < 0.35 && group.size() < 12) group.push_back(j);
      }
      if (group.empty()) group.push_back(static_cast<int>(rng.below(p)));
      groups.push_back(std::move(group));
    }
  }
  if (groups.empty()) groups.push_back({0});

  std::vector<double> weights;
  const int weight_kind = id % 3;
  for (const auto& group : groups) {
    if (weight_kind == 0) {
      weights.push_back(1.0);
    } else if (weight_kind == 1) {
      weights.push_back(std::sqrt(static_cast<double>(group.size())));
    } else {
      weights.push_back(rng.uniform(0.5, 2.0));
    }
  }
  problem.gs = validate_groups(std::move(groups), std::move(weights), p);

  problem.v = Vector(p);
  for (int j = 0; j < p; ++j) problem.v[j] = rng.normal();
  if (problem.v.cwiseAbs().maxCoeff() == 0.0) problem.v[0] = 1.0;
  // Unit scale keeps the certificate's floating-point floor well below the
  // 1e-13 golden target.
  problem.v *= 1.5 / problem.v.cwiseAbs().maxCoeff();

  const double vmax = 1.5;
  constexpr double kL1Factors[] = {0.0, 0.05, 0.3, 1.0, 1.25};
  problem.params.lambda1 = kL1Factors[id % 5] * vmax;

  const Vector u = soft_threshold(problem.v.cwiseAbs(), problem.params.lambda1);
  double mean_threshold = 0.0;
  for (int i = 0; i < problem.gs.g(); ++i) {
    mean_threshold +=
        group_norm(u, problem.gs.groups[i]) / problem.gs.weights[i];
  }
  mean_threshold /= problem.gs.g();
  if (mean_threshold == 0.0) mean_threshold = 1.0;
  constexpr double kL2Factors[] = {0.0, 0.1, 0.35, 0.7, 1.0, 1.3, 2.5};
  problem.params.lambda2 = kL2Factors[id % 7] * mean_threshold;
  return problem;
}

}  // namespace ogl::testing
