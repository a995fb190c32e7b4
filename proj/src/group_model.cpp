#include "ogl/group_model.hpp"

#include <algorithm>
#include <cmath>

namespace ogl {

GroupStructure validate_groups(std::vector<std::vector<int>> raw_groups,
                               std::vector<double> weights, int p,
                               std::vector<std::string> names) {
  if (p <= 0) {
    throw IndexOutOfRange("feature count p must be positive, got " +
                          std::to_string(p));
  }
  if (weights.size() != raw_groups.size()) {
    throw LengthMismatch("got " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(raw_groups.size()) +
                         " groups");
  }
  if (!names.empty() && names.size() != raw_groups.size()) {
    throw LengthMismatch("got " + std::to_string(names.size()) +
                         " names for " + std::to_string(raw_groups.size()) +
                         " groups");
  }
  for (std::size_t i = 0; i < raw_groups.size(); ++i) {
    auto& group = raw_groups[i];
    if (group.empty()) {
      throw EmptyGroup("group " + std::to_string(i) + " is empty");
    }
    for (int idx : group) {
      if (idx < 0 || idx >= p) {
        throw IndexOutOfRange("group " + std::to_string(i) + " contains index " +
                              std::to_string(idx) + ", valid range is [0, " +
                              std::to_string(p) + ")");
      }
    }
    std::sort(group.begin(), group.end());
    if (std::adjacent_find(group.begin(), group.end()) != group.end()) {
      throw DuplicateIndex("group " + std::to_string(i) +
                           " contains a duplicated index");
    }
    const double w = weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw NonpositiveWeight("group " + std::to_string(i) + " has weight " +
                              std::to_string(w) + ", weights must be finite and > 0");
    }
  }
  GroupStructure gs;
  gs.p = p;
  gs.groups = std::move(raw_groups);
  gs.weights = std::move(weights);
  gs.names = std::move(names);
  return gs;
}

double group_norm(const Vector& x, const std::vector<int>& group) {
  double sq = 0.0;
  for (int idx : group) sq += x[idx] * x[idx];
  return std::sqrt(sq);
}

void validate_params(const PenaltyParams& params) {
  if (!(params.lambda1 >= 0.0) || !(params.lambda2 >= 0.0) ||
      !std::isfinite(params.lambda1) || !std::isfinite(params.lambda2)) {
    throw Error("penalty parameters must be finite and nonnegative");
  }
}

double penalty_value(const Vector& x, const GroupStructure& gs,
                     const PenaltyParams& params) {
  validate_params(params);
  if (x.size() != gs.p) {
    throw DimensionMismatch("x has length " + std::to_string(x.size()) +
                            ", expected p = " + std::to_string(gs.p));
  }
  double value = params.lambda1 * x.lpNorm<1>();
  if (params.lambda2 != 0.0) {
    double group_part = 0.0;
    for (int i = 0; i < gs.g(); ++i) {
      group_part += gs.weights[i] * group_norm(x, gs.groups[i]);
    }
    value += params.lambda2 * group_part;
  }
  return value;
}

GroupStats group_stats(const GroupStructure& gs) {
  GroupStats stats;
  stats.g = gs.g();
  stats.p = gs.p;
  std::vector<char> covered(static_cast<std::size_t>(gs.p), 0);
  long total_size = 0;
  for (const auto& group : gs.groups) {
    total_size += static_cast<long>(group.size());
    stats.max_group_size =
        std::max(stats.max_group_size, static_cast<int>(group.size()));
    for (int idx : group) covered[static_cast<std::size_t>(idx)] = 1;
  }
  stats.features_covered =
      static_cast<int>(std::count(covered.begin(), covered.end(), 1));
  if (stats.g > 0) {
    stats.mean_group_size = static_cast<double>(total_size) / stats.g;
  }
  if (stats.features_covered > 0) {
    stats.mean_appearance_frequency =
        static_cast<double>(total_size) / stats.features_covered;
  }
  return stats;
}

}  // namespace ogl
