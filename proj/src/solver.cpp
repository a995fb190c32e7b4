#include "ogl/solver.hpp"

#include <cmath>

namespace ogl {

LeastSquaresLoss::LeastSquaresLoss(Matrix A, Vector b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) {
    throw DimensionMismatch("A has " + std::to_string(A_.rows()) +
                            " rows but b has length " +
                            std::to_string(b_.size()));
  }
  if (A_.rows() < 1 || A_.cols() < 1) {
    throw DimensionMismatch("design matrix must be at least 1x1");
  }
  if (!A_.allFinite() || !b_.allFinite()) {
    throw Error("design matrix and responses must be finite");
  }
}

double LeastSquaresLoss::value(const Vector& x) const {
  if (x.size() != A_.cols()) {
    throw DimensionMismatch("x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(A_.cols()));
  }
  return 0.5 * (A_ * x - b_).squaredNorm();
}

Vector LeastSquaresLoss::gradient(const Vector& x) const {
  return value_and_gradient(x).second;
}

std::pair<double, Vector> LeastSquaresLoss::value_and_gradient(
    const Vector& x) const {
  if (x.size() != A_.cols()) {
    throw DimensionMismatch("x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(A_.cols()));
  }
  const Vector residual = A_ * x - b_;
  return {0.5 * residual.squaredNorm(), A_.transpose() * residual};
}

std::pair<double, Vector> least_squares_value_and_gradient(const Matrix& A,
                                                           const Vector& b,
                                                           const Vector& x) {
  return LeastSquaresLoss(A, b).value_and_gradient(x);
}

double model_upper_bound(double loss_at_s, const Vector& grad_at_s,
                         const Vector& x, const Vector& s, double L,
                         const GroupStructure& gs,
                         const PenaltyParams& params) {
  const Vector dx = x - s;
  return loss_at_s + grad_at_s.dot(dx) + penalty_value(x, gs, params) +
         0.5 * L * dx.squaredNorm();
}

bool line_search_accepts(const SmoothLoss& loss, double loss_at_s,
                         const Vector& grad_at_s, const Vector& s,
                         const Vector& x, double L) {
  const Vector dx = x - s;
  return loss.value(x) <=
         loss_at_s + grad_at_s.dot(dx) + 0.5 * L * dx.squaredNorm();
}

LineSearchResult line_search_step(const SmoothLoss& loss, const Vector& s,
                                  double L_prev, const GroupStructure& gs,
                                  const PenaltyParams& params,
                                  const ProxOptions& prox_options,
                                  std::optional<DualVariable> warm_Y) {
  if (!(L_prev > 0.0)) {
    throw Error("line-search constant must be positive");
  }
  const auto [loss_at_s, grad_at_s] = loss.value_and_gradient(s);

  double L = L_prev;
  int trials = 0;
  std::optional<DualVariable> warm = std::move(warm_Y);
  while (true) {
    ++trials;
    const Vector v = s - grad_at_s / L;
    const PenaltyParams scaled{params.lambda1 / L, params.lambda2 / L};
    ProxSolution candidate = prox(v, gs, scaled, prox_options, std::move(warm));
    if (line_search_accepts(loss, loss_at_s, grad_at_s, s, candidate.x, L)) {
      LineSearchResult result;
      result.objective =
          loss.value(candidate.x) + penalty_value(candidate.x, gs, params);
      result.x_next = candidate.x;
      result.L = L;
      result.trials = trials;
      result.prox_solution = std::move(candidate);
      return result;
    }
    warm = std::move(candidate.warm_Y);
    L *= 2.0;
    if (L > 1e30) {
      throw LineSearchOverflow(
          "no acceptable step below L = 1e30; the loss is not smooth or is "
          "inconsistent with its gradient");
    }
  }
}

SolverResult foglasso_solve(const SmoothLoss& loss, const GroupStructure& gs,
                            const PenaltyParams& params,
                            const SolverOptions& options,
                            std::optional<Vector> x0,
                            std::optional<DualVariable> warm_Y) {
  if (!(options.L0 > 0.0) || !(options.outer_tol > 0.0) ||
      !(options.gap_tol > 0.0) || options.max_outer < 1 ||
      options.max_inner < 1) {
    throw Error("solver options must be positive");
  }
  const Eigen::Index p = loss.dim();
  if (p != gs.p) {
    throw DimensionMismatch("loss dimension " + std::to_string(p) +
                            " does not match group structure p = " +
                            std::to_string(gs.p));
  }

  validate_params(params);

  SolverResult result;
  Vector x_curr = x0 ? std::move(*x0) : Vector::Zero(p);
  if (x_curr.size() != p) {
    throw DimensionMismatch("x0 has length " + std::to_string(x_curr.size()) +
                            ", expected " + std::to_string(p));
  }
  if (!x_curr.allFinite()) {
    throw Error("starting point must be finite");
  }
  Vector x_prev = x_curr;

  MomentumSequence momentum;
  double L = options.L0;
  double f_curr = loss.value(x_curr) + penalty_value(x_curr, gs, params);
  std::optional<DualVariable> warm = std::move(warm_Y);
  const ProxOptions prox_options{options.gap_tol, options.max_inner};
  const double g_count = std::max(1, gs.g());

  for (long iter = 1; iter <= options.max_outer; ++iter) {
    const double beta = momentum.beta();
    const Vector s = x_curr + beta * (x_curr - x_prev);

    LineSearchResult step = line_search_step(loss, s, L, gs, params,
                                             prox_options, std::move(warm));
    x_prev = std::move(x_curr);
    x_curr = std::move(step.x_next);
    L = step.L;
    warm = std::move(step.prox_solution.warm_Y);
    momentum.advance();

    long zeroed = 0;
    for (char flag : step.prox_solution.zero_group_mask) zeroed += flag;

    IterationRecord record;
    record.objective = step.objective;
    record.L = L;
    record.line_search_trials = step.trials;
    record.inner_iterations = step.prox_solution.inner_iterations;
    record.zero_group_fraction = static_cast<double>(zeroed) / g_count;
    record.gap = step.prox_solution.gap;
    record.alpha = momentum.alpha_curr;
    result.telemetry.push_back(record);

    const double change =
        std::abs(step.objective - f_curr) / std::max(1.0, std::abs(f_curr));
    f_curr = step.objective;
    if (change <= options.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.x = std::move(x_curr);
  result.objective = f_curr;
  result.iterations = static_cast<long>(result.telemetry.size());
  result.warm_Y = warm ? std::move(*warm) : DualVariable::zeros(gs);
  return result;
}

double lambda_max(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("A has " + std::to_string(A.rows()) +
                            " rows but b has length " +
                            std::to_string(b.size()));
  }
  return (A.transpose() * b).lpNorm<Eigen::Infinity>();
}

std::vector<double> default_rho_grid() {
  return {5e-1, 2e-1, 1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3};
}

PathResult reg_path(const LeastSquaresLoss& loss, const GroupStructure& gs,
                    std::span<const double> rho_grid,
                    const SolverOptions& options) {
  if (rho_grid.empty()) {
    throw Error("rho grid must be nonempty");
  }
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] > 0.0) || rho_grid[i] > 1.0) {
      throw Error("rho values must lie in (0, 1], got " +
                  std::to_string(rho_grid[i]));
    }
    if (i > 0 && !(rho_grid[i] < rho_grid[i - 1])) {
      throw Error("rho grid must be strictly decreasing");
    }
  }

  PathResult path;
  path.lambda1_max = lambda_max(loss.A(), loss.b());
  Vector x_start = Vector::Zero(loss.dim());
  std::optional<DualVariable> warm;

  for (double rho : rho_grid) {
    PathEntry entry;
    entry.rho = rho;
    entry.lambda1 = rho * path.lambda1_max;
    entry.lambda2 = entry.lambda1;
    try {
      entry.result = foglasso_solve(loss, gs, {entry.lambda1, entry.lambda2},
                                    options, x_start, std::move(warm));
      x_start = entry.result.x;
      warm = entry.result.warm_Y;
    } catch (const Error& e) {
      entry.failed = true;
      entry.error = e.what();
      warm.reset();
    }
    path.entries.push_back(std::move(entry));
  }
  return path;
}

}  // namespace ogl
