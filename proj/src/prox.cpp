#include "ogl/prox.hpp"

#include <algorithm>
#include <cmath>

namespace ogl {

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

// Position of original coordinate `idx` inside the sorted original group.
std::size_t position_in_group(const std::vector<int>& group, int idx) {
  return static_cast<std::size_t>(
      std::lower_bound(group.begin(), group.end(), idx) - group.begin());
}

}  // namespace

Vector soft_threshold(const Vector& v, double lambda1) {
  Vector u(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double t = std::abs(v[j]) - lambda1;
    u[j] = t > 0.0 ? sgn(v[j]) * t : 0.0;
  }
  return u;
}

std::pair<Vector, IdentificationTrace> identify_zero_groups(
    Vector u, const GroupStructure& gs, double lambda2) {
  if (u.size() != gs.p) {
    throw DimensionMismatch("u has length " + std::to_string(u.size()) +
                            ", expected p = " + std::to_string(gs.p));
  }
  IdentificationTrace trace;
  const int g = gs.g();
  std::vector<char> zeroed(static_cast<std::size_t>(g), 0);
  // Coordinates currently zero *because a group was zeroed*; these form the
  // overlap subsets S_i recorded at zeroing time.
  std::vector<char> zeroed_coord(static_cast<std::size_t>(gs.p), 0);

  bool changed = true;
  while (changed) {
    changed = false;
    ++trace.passes;
    for (int i = 0; i < g; ++i) {
      if (zeroed[i]) continue;
      const auto& group = gs.groups[i];
      if (group_norm(u, group) <= lambda2 * gs.weights[i]) {
        std::vector<int> overlap;
        for (int idx : group) {
          if (zeroed_coord[static_cast<std::size_t>(idx)]) overlap.push_back(idx);
          u[idx] = 0.0;
        }
        for (int idx : group) zeroed_coord[static_cast<std::size_t>(idx)] = 1;
        zeroed[i] = 1;
        trace.zeroed_groups.push_back(i);
        trace.overlap_subsets.push_back(std::move(overlap));
        changed = true;
      }
    }
  }
  return {std::move(u), std::move(trace)};
}

ReducedProblem reduce_problem(const Vector& v, const GroupStructure& gs,
                              const PenaltyParams& params) {
  if (v.size() != gs.p) {
    throw DimensionMismatch("v has length " + std::to_string(v.size()) +
                            ", expected p = " + std::to_string(gs.p));
  }
  ReducedProblem reduced;
  reduced.sign = Vector(v.size());
  Vector u(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    reduced.sign[j] = sgn(v[j]);
    u[j] = std::max(std::abs(v[j]) - params.lambda1, 0.0);
  }

  auto [masked, trace] = identify_zero_groups(std::move(u), gs, params.lambda2);
  reduced.trace = std::move(trace);

  // Compact surviving coordinates; masked[j] == 0 implies x*_j == 0.
  std::vector<int> coord_to_reduced(static_cast<std::size_t>(gs.p), -1);
  for (Eigen::Index j = 0; j < masked.size(); ++j) {
    if (masked[j] > 0.0) {
      coord_to_reduced[static_cast<std::size_t>(j)] =
          static_cast<int>(reduced.index_map.size());
      reduced.index_map.push_back(static_cast<int>(j));
    }
  }
  const int p_reduced = static_cast<int>(reduced.index_map.size());
  reduced.u_reduced = Vector(p_reduced);
  for (int k = 0; k < p_reduced; ++k) {
    reduced.u_reduced[k] = masked[reduced.index_map[k]];
  }

  // Groups whose support is entirely zero are dropped; survivors keep their
  // weight and are remapped to the compacted coordinates.
  std::vector<std::vector<int>> kept_groups;
  std::vector<double> kept_weights;
  for (int i = 0; i < gs.g(); ++i) {
    std::vector<int> members;
    for (int idx : gs.groups[i]) {
      const int r = coord_to_reduced[static_cast<std::size_t>(idx)];
      if (r >= 0) members.push_back(r);
    }
    if (!members.empty()) {
      kept_groups.push_back(std::move(members));
      kept_weights.push_back(gs.weights[i]);
      reduced.group_map.push_back(i);
    }
  }
  if (p_reduced > 0) {
    reduced.gs_reduced =
        validate_groups(std::move(kept_groups), std::move(kept_weights), p_reduced);
  } else {
    reduced.gs_reduced = GroupStructure{};
    reduced.gs_reduced.p = 0;
  }
  return reduced;
}

double prox_objective(const Vector& x, const Vector& v,
                      const GroupStructure& gs, const PenaltyParams& params) {
  return 0.5 * (x - v).squaredNorm() + penalty_value(x, gs, params);
}

ProxSolution prox(const Vector& v, const GroupStructure& gs,
                  const PenaltyParams& params, const ProxOptions& options,
                  std::optional<DualVariable> warm_Y) {
  if (options.gap_tol <= 0.0) {
    throw Error("gap tolerance must be positive");
  }
  validate_params(params);
  if (!v.allFinite()) {
    throw Error("prox input vector must be finite");
  }
  ReducedProblem reduced = reduce_problem(v, gs, params);

  ProxSolution solution;
  solution.zero_group_mask.assign(static_cast<std::size_t>(gs.g()), 0);
  for (int i : reduced.trace.zeroed_groups) {
    solution.zero_group_mask[static_cast<std::size_t>(i)] = 1;
  }

  if (reduced.index_map.empty()) {
    solution.x = Vector::Zero(v.size());
    solution.gap = 0.0;
    solution.inner_iterations = 0;
    solution.warm_Y = DualVariable::zeros(gs);
    solution.converged = true;
    return solution;
  }

  // Warm start lives in the original frame; gather the surviving blocks.
  std::optional<DualVariable> warm_reduced;
  if (warm_Y && warm_Y->shape_matches(gs)) {
    DualVariable gathered = DualVariable::zeros(reduced.gs_reduced);
    for (std::size_t k = 0; k < reduced.group_map.size(); ++k) {
      const int orig_group = reduced.group_map[k];
      const auto& members = reduced.gs_reduced.groups[k];
      for (std::size_t t = 0; t < members.size(); ++t) {
        const int orig_coord = reduced.index_map[members[t]];
        const std::size_t pos =
            position_in_group(gs.groups[orig_group], orig_coord);
        gathered.blocks[k][static_cast<Eigen::Index>(t)] =
            warm_Y->blocks[orig_group][static_cast<Eigen::Index>(pos)];
      }
    }
    warm_reduced = std::move(gathered);
  }

  DualSolveResult dual = solve_dual(reduced.u_reduced, reduced.gs_reduced,
                                    params.lambda2, options.gap_tol,
                                    options.max_inner, std::move(warm_reduced));

  solution.x = Vector::Zero(v.size());
  for (std::size_t k = 0; k < reduced.index_map.size(); ++k) {
    const int j = reduced.index_map[k];
    solution.x[j] = reduced.sign[j] * dual.x[static_cast<Eigen::Index>(k)];
  }
  solution.gap = dual.report.gap;
  solution.inner_iterations = dual.report.iterations;
  solution.converged = dual.report.converged;

  // Scatter the final dual blocks back to the original frame for reuse.
  solution.warm_Y = DualVariable::zeros(gs);
  for (std::size_t k = 0; k < reduced.group_map.size(); ++k) {
    const int orig_group = reduced.group_map[k];
    const auto& members = reduced.gs_reduced.groups[k];
    for (std::size_t t = 0; t < members.size(); ++t) {
      const int orig_coord = reduced.index_map[members[t]];
      const std::size_t pos = position_in_group(gs.groups[orig_group], orig_coord);
      solution.warm_Y.blocks[orig_group][static_cast<Eigen::Index>(pos)] =
          dual.Y.blocks[k][static_cast<Eigen::Index>(t)];
    }
  }
  return solution;
}

}  // namespace ogl
