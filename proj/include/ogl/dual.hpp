#pragma once

#include <optional>

#include "ogl/group_model.hpp"

namespace ogl {

// Sparse dual matrix Y for the feasible set Omega: column i lives on the
// support of G_i (off-support entries are structural zeros and never
// stored), and after projection satisfies ||Y^i|| <= lambda2 * w_i.
// blocks[i] is aligned entry-for-entry with gs.groups[i].
struct DualVariable {
  std::vector<Vector> blocks;

  static DualVariable zeros(const GroupStructure& gs);
  bool shape_matches(const GroupStructure& gs) const;
};

struct DualSolveReport {
  double gap = 0.0;
  long iterations = 0;
  double final_step_L = 1.0;  // last accepted backtracking constant
  bool converged = false;
};

// Columnwise radial projection onto Omega: Y^i <- Y^i * min(1, l2*w_i/||Y^i||).
DualVariable project_omega(DualVariable Y, const GroupStructure& gs,
                           double lambda2);

// Row sums Y e of the sparse matrix, as a dense length-p vector.
Vector dual_row_sums(const DualVariable& Y, const GroupStructure& gs);

// x = max(u - Y e, 0)
Vector primal_from_dual(const DualVariable& Y, const GroupStructure& gs,
                        const Vector& u);

// omega(Y) = -[ 1/2 ||x - u||^2 + <x, Y e> ] at x = primal_from_dual(Y, u)
double omega_value(const DualVariable& Y, const GroupStructure& gs,
                   const Vector& u);

// omega'(Y): column i is -x on the support of G_i. Stored per-group, never
// as a dense p x g matrix.
DualVariable omega_gradient(const DualVariable& Y, const GroupStructure& gs,
                            const Vector& u);

// gap = sum_i ( lambda2*w_i*||x_{G_i}|| - <x_{G_i}, Y^i> ), the a-posteriori
// certificate; >= 0 for feasible Y. Negatives below -1e-14, or an infeasible
// column (||Y^i|| > lambda2*w_i + 1e-12), raise InfeasibleDual.
double duality_gap(const Vector& x_tilde, const DualVariable& Y_tilde,
                   const GroupStructure& gs, double lambda2);

struct DualSolveResult {
  DualVariable Y;
  Vector x;
  DualSolveReport report;
};

// Accelerated projected gradient on omega over Omega, started from warm_Y
// (re-projected) or Y = 0. Requires u > 0 strictly. Evaluates the duality
// gap every iteration and returns the best-gap iterate; converged=false when
// max_iter ran out (soft failure).
DualSolveResult solve_dual(const Vector& u, const GroupStructure& gs,
                           double lambda2, double gap_tol, long max_iter,
                           std::optional<DualVariable> warm_Y = std::nullopt);

}  // namespace ogl
