#pragma once

#include <optional>
#include <utility>

#include "ogl/dual.hpp"
#include "ogl/group_model.hpp"

namespace ogl {

struct ProxProblem {
  Vector v;
  GroupStructure gs;
  PenaltyParams params;
};

// What the zero-group identification did: how many full cycles ran, which
// groups were zeroed (in order), and for each zeroed group the overlap
// subset S_i (indices already zeroed through other groups) at that moment.
struct IdentificationTrace {
  int passes = 0;
  std::vector<int> zeroed_groups;
  std::vector<std::vector<int>> overlap_subsets;
};

// Residual problem after soft-thresholding and zero-group identification:
// p' surviving coordinates (u_reduced > 0 strictly), g' surviving groups.
struct ReducedProblem {
  Vector u_reduced;
  GroupStructure gs_reduced;
  std::vector<int> index_map;  // reduced coordinate -> original coordinate
  std::vector<int> group_map;  // reduced group -> original group
  Vector sign;                 // sgn(v), length p, entries in {-1,0,+1}
  IdentificationTrace trace;
};

struct ProxOptions {
  double gap_tol = 1e-10;
  long max_inner = 100000;
};

struct ProxSolution {
  Vector x;
  double gap = 0.0;
  long inner_iterations = 0;
  std::vector<char> zero_group_mask;  // per original group; flagged => x_{G_i} == 0 exactly
  DualVariable warm_Y;                // over the ORIGINAL structure, for reuse
  bool converged = true;              // false: inner cap hit, best iterate returned
};

// u_i = sgn(v_i) * max(|v_i| - lambda1, 0)
Vector soft_threshold(const Vector& v, double lambda1);

// Cycle through the groups, zeroing u_{G_i} whenever ||u_{G_i}|| <= lambda2*w_i,
// until a full pass changes nothing. At the fixed point every group is either
// all-zero or has ||u_{G_i}|| > lambda2*w_i.
std::pair<Vector, IdentificationTrace> identify_zero_groups(
    Vector u, const GroupStructure& gs, double lambda2);

ReducedProblem reduce_problem(const Vector& v, const GroupStructure& gs,
                              const PenaltyParams& params);

// Proximal operator of the overlapping group Lasso penalty:
//   argmin_x 1/2 ||x - v||^2 + lambda1 ||x||_1 + lambda2 sum_i w_i ||x_{G_i}||
// computed by sign decomposition, soft-threshold reduction, zero-group
// identification, and an accelerated dual solve on the residual problem,
// with a certified duality gap. Dropped coordinates are exact zeros.
ProxSolution prox(const Vector& v, const GroupStructure& gs,
                  const PenaltyParams& params, const ProxOptions& options = {},
                  std::optional<DualVariable> warm_Y = std::nullopt);

// Objective of the prox problem at x (used by tests and reports).
double prox_objective(const Vector& x, const Vector& v,
                      const GroupStructure& gs, const PenaltyParams& params);

}  // namespace ogl
