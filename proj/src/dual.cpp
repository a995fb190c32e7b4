#include "ogl/dual.hpp"

#include <cmath>

#include "ogl/solver.hpp"

namespace ogl {

namespace {

void check_u(const Vector& u, const GroupStructure& gs) {
  if (u.size() != gs.p) {
    throw DimensionMismatch("u has length " + std::to_string(u.size()) +
                            ", expected p = " + std::to_string(gs.p));
  }
}

void check_shape(const DualVariable& Y, const GroupStructure& gs) {
  if (!Y.shape_matches(gs)) {
    throw DimensionMismatch("dual variable blocks do not match the group structure");
  }
}

// psi(x, Y) = 1/2||x-u||^2 + <x, Ye> evaluated at x = max(u - Ye, 0),
// reusing the row sums.
double psi_at_primal(const Vector& x, const Vector& row_sums, const Vector& u) {
  return 0.5 * (x - u).squaredNorm() + x.dot(row_sums);
}

}  // namespace

DualVariable DualVariable::zeros(const GroupStructure& gs) {
  DualVariable Y;
  Y.blocks.reserve(gs.groups.size());
  for (const auto& group : gs.groups) {
    Y.blocks.emplace_back(Vector::Zero(static_cast<Eigen::Index>(group.size())));
  }
  return Y;
}

bool DualVariable::shape_matches(const GroupStructure& gs) const {
  if (blocks.size() != gs.groups.size()) return false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != static_cast<Eigen::Index>(gs.groups[i].size()))
      return false;
  }
  return true;
}

DualVariable project_omega(DualVariable Y, const GroupStructure& gs,
                           double lambda2) {
  check_shape(Y, gs);
  for (int i = 0; i < gs.g(); ++i) {
    const double radius = lambda2 * gs.weights[i];
    const double norm = Y.blocks[i].norm();
    if (norm > radius) {
      if (radius == 0.0) {
        Y.blocks[i].setZero();
      } else {
        Y.blocks[i] *= radius / norm;
      }
    }
  }
  return Y;
}

Vector dual_row_sums(const DualVariable& Y, const GroupStructure& gs) {
  check_shape(Y, gs);
  Vector sums = Vector::Zero(gs.p);
  for (int i = 0; i < gs.g(); ++i) {
    const auto& group = gs.groups[i];
    const auto& block = Y.blocks[i];
    for (std::size_t k = 0; k < group.size(); ++k) {
      sums[group[k]] += block[static_cast<Eigen::Index>(k)];
    }
  }
  return sums;
}

Vector primal_from_dual(const DualVariable& Y, const GroupStructure& gs,
                        const Vector& u) {
  check_u(u, gs);
  return (u - dual_row_sums(Y, gs)).cwiseMax(0.0);
}

double omega_value(const DualVariable& Y, const GroupStructure& gs,
                   const Vector& u) {
  check_u(u, gs);
  const Vector row_sums = dual_row_sums(Y, gs);
  const Vector x = (u - row_sums).cwiseMax(0.0);
  return -psi_at_primal(x, row_sums, u);
}

DualVariable omega_gradient(const DualVariable& Y, const GroupStructure& gs,
                            const Vector& u) {
  check_u(u, gs);
  const Vector x = primal_from_dual(Y, gs, u);
  DualVariable grad = DualVariable::zeros(gs);
  for (int i = 0; i < gs.g(); ++i) {
    const auto& group = gs.groups[i];
    for (std::size_t k = 0; k < group.size(); ++k) {
      grad.blocks[i][static_cast<Eigen::Index>(k)] = -x[group[k]];
    }
  }
  return grad;
}

double duality_gap(const Vector& x_tilde, const DualVariable& Y_tilde,
                   const GroupStructure& gs, double lambda2) {
  if (x_tilde.size() != gs.p) {
    throw DimensionMismatch("x_tilde has length " + std::to_string(x_tilde.size()) +
                            ", expected p = " + std::to_string(gs.p));
  }
  check_shape(Y_tilde, gs);
  double gap = 0.0;
  double term_scale = 0.0;
  for (int i = 0; i < gs.g(); ++i) {
    const double radius = lambda2 * gs.weights[i];
    const auto& group = gs.groups[i];
    const auto& block = Y_tilde.blocks[i];
    if (block.norm() > radius + 1e-12 + 16.0 * 2.220446049250313e-16 * radius) {
      throw InfeasibleDual("dual column " + std::to_string(i) + " has norm " +
                           std::to_string(block.norm()) + " > bound " +
                           std::to_string(radius));
    }
    double inner = 0.0;
    for (std::size_t k = 0; k < group.size(); ++k) {
      inner += x_tilde[group[k]] * block[static_cast<Eigen::Index>(k)];
    }
    const double primal_term = radius * group_norm(x_tilde, group);
    gap += primal_term - inner;
    term_scale += primal_term + std::abs(inner);
  }
  if (gap < 0.0) {
    // A certificate this negative cannot come from rounding the (provably
    // nonnegative) per-group terms; the dual must be corrupt.
    const double floor = 1e-14 + 64.0 * 2.220446049250313e-16 * term_scale;
    if (gap < -floor) {
      throw InfeasibleDual("duality gap " + std::to_string(gap) +
                           " below the floating-point floor");
    }
    gap = 0.0;
  }
  return gap;
}

DualSolveResult solve_dual(const Vector& u, const GroupStructure& gs,
                           double lambda2, double gap_tol, long max_iter,
                           std::optional<DualVariable> warm_Y) {
  check_u(u, gs);
  const int g = gs.g();

  DualVariable Y = warm_Y ? project_omega(std::move(*warm_Y), gs, lambda2)
                          : DualVariable::zeros(gs);
  DualVariable Y_prev = Y;

  Vector x = primal_from_dual(Y, gs, u);
  double gap = duality_gap(x, Y, gs, lambda2);

  DualSolveResult best{Y, x, {gap, 0, 1.0, gap <= gap_tol}};

  MomentumSequence momentum;
  double L = 1.0;
  long iter = 0;
  DualVariable S = DualVariable::zeros(gs);
  DualVariable Z = DualVariable::zeros(gs);

  while (best.report.gap > gap_tol && iter < max_iter) {
    ++iter;
    const double beta = momentum.beta();
    for (int i = 0; i < g; ++i) {
      S.blocks[i] = Y.blocks[i] + beta * (Y.blocks[i] - Y_prev.blocks[i]);
    }
    const Vector s_rows = dual_row_sums(S, gs);
    const Vector xs = (u - s_rows).cwiseMax(0.0);
    const double omega_s = -psi_at_primal(xs, s_rows, u);

    // Backtracking on the quadratic model around S; -grad = xs per support.
    while (true) {
      const double inv_L = 1.0 / L;
      for (int i = 0; i < g; ++i) {
        const auto& group = gs.groups[i];
        auto& block = Z.blocks[i];
        block = S.blocks[i];
        for (std::size_t k = 0; k < group.size(); ++k) {
          block[static_cast<Eigen::Index>(k)] += inv_L * xs[group[k]];
        }
      }
      Z = project_omega(std::move(Z), gs, lambda2);

      const Vector z_rows = dual_row_sums(Z, gs);
      const Vector xz = (u - z_rows).cwiseMax(0.0);
      const double omega_z = -psi_at_primal(xz, z_rows, u);

      double grad_dot = 0.0;
      double dist_sq = 0.0;
      for (int i = 0; i < g; ++i) {
        const auto& group = gs.groups[i];
        const auto& zb = Z.blocks[i];
        const auto& sb = S.blocks[i];
        for (std::size_t k = 0; k < group.size(); ++k) {
          const auto j = static_cast<Eigen::Index>(k);
          const double d = zb[j] - sb[j];
          grad_dot += -xs[group[k]] * d;
          dist_sq += d * d;
        }
      }
      // The slack covers rounding of the compared terms; without it a 1-ulp
      // model miss near stationarity doubles L without bound and freezes
      // the iteration.
      const double rhs = omega_s + grad_dot + 0.5 * L * dist_sq;
      const double slack =
          1e-15 * (std::abs(omega_s) + std::abs(omega_z) +
                   std::abs(grad_dot) + 0.5 * L * dist_sq);
      if (omega_z <= rhs + slack || L > 1e30) break;
      L *= 2.0;
    }

    Y_prev = std::move(Y);
    Y = Z;
    momentum.advance();

    x = primal_from_dual(Y, gs, u);
    gap = duality_gap(x, Y, gs, lambda2);
    if (gap < best.report.gap) {
      best.Y = Y;
      best.x = x;
      best.report.gap = gap;
    }
  }

  best.report.iterations = iter;
  best.report.final_step_L = L;
  best.report.converged = best.report.gap <= gap_tol;
  return best;
}

}  // namespace ogl
