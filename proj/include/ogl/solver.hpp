#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "ogl/prox.hpp"

namespace ogl {

// Smooth convex part of the objective. Implementations must keep gradient()
// consistent with value(); value_and_gradient() may share one pass.
class SmoothLoss {
 public:
  virtual ~SmoothLoss() = default;
  virtual Eigen::Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual std::pair<double, Vector> value_and_gradient(const Vector& x) const {
    return {value(x), gradient(x)};
  }
};

// l(x) = 1/2 ||A x - b||^2
class LeastSquaresLoss final : public SmoothLoss {
 public:
  LeastSquaresLoss(Matrix A, Vector b);

  Eigen::Index dim() const override { return A_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }

 private:
  Matrix A_;
  Vector b_;
};

struct SolverOptions {
  double L0 = 1.0;
  double outer_tol = 1e-5;   // relative objective change, max(1,.) guarded
  long max_outer = 10000;
  double gap_tol = 1e-10;    // inner duality-gap tolerance
  long max_inner = 100000;
};

struct IterationRecord {
  double objective = 0.0;           // f(x_{i+1})
  double L = 0.0;                   // accepted line-search constant
  int line_search_trials = 0;
  long inner_iterations = 0;
  double zero_group_fraction = 0.0; // identified zero groups / g
  double gap = 0.0;                 // certified prox gap
  double alpha = 0.0;               // momentum scalar alpha_{i+1}
};

struct SolverResult {
  Vector x;
  double objective = 0.0;
  long iterations = 0;
  std::vector<IterationRecord> telemetry;
  bool converged = false;
  DualVariable warm_Y;  // final dual blocks (original frame), for reuse
};

struct PathEntry {
  double rho = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  SolverResult result;
  bool failed = false;
  std::string error;
};

struct PathResult {
  double lambda1_max = 0.0;
  std::vector<PathEntry> entries;
};

// Momentum recurrence of the accelerated scheme, shared by the outer loop
// and the dual solver: alpha_{i+1} = (1 + sqrt(1 + 4 alpha_i^2)) / 2,
// beta_i = (alpha_{i-2} - 1) / alpha_{i-1}, seeded alpha_{-1}=0, alpha_0=1.
struct MomentumSequence {
  double alpha_prev = 0.0;
  double alpha_curr = 1.0;

  double beta() const { return (alpha_prev - 1.0) / alpha_curr; }
  void advance() {
    const double next =
        (1.0 + std::sqrt(1.0 + 4.0 * alpha_curr * alpha_curr)) / 2.0;
    alpha_prev = alpha_curr;
    alpha_curr = next;
  }
};

// (1/2||Ax-b||^2, A^T(Ax-b)) in one residual pass.
std::pair<double, Vector> least_squares_value_and_gradient(const Matrix& A,
                                                           const Vector& b,
                                                           const Vector& x);

// f_{L,s}(x) = l(s) + <l'(s), x-s> + phi(x) + (L/2)||x-s||^2
double model_upper_bound(double loss_at_s, const Vector& grad_at_s,
                         const Vector& x, const Vector& s, double L,
                         const GroupStructure& gs, const PenaltyParams& params);

// Acceptance predicate of the Armijo-Goldstein search. phi(x) appears on
// both sides of f(x) <= f_{L,s}(x), so the smooth parts are compared.
bool line_search_accepts(const SmoothLoss& loss, double loss_at_s,
                         const Vector& grad_at_s, const Vector& s,
                         const Vector& x, double L);

struct LineSearchResult {
  Vector x_next;
  double L = 0.0;
  int trials = 0;
  ProxSolution prox_solution;
  double objective = 0.0;  // f(x_next), full objective
};

// Doubles L from L_prev until the prox candidate at
// x = prox_{l1/L, l2/L}(s - l'(s)/L) satisfies the acceptance inequality.
// Throws LineSearchOverflow past L = 1e30.
LineSearchResult line_search_step(const SmoothLoss& loss, const Vector& s,
                                  double L_prev, const GroupStructure& gs,
                                  const PenaltyParams& params,
                                  const ProxOptions& prox_options,
                                  std::optional<DualVariable> warm_Y);

// Accelerated proximal gradient outer loop with momentum search points,
// line search over L (never decreased), and relative objective-change
// termination. Telemetry has one record per iteration. warm_Y seeds the
// first prox call (path continuation); the final blocks come back in the
// result.
SolverResult foglasso_solve(const SmoothLoss& loss, const GroupStructure& gs,
                            const PenaltyParams& params,
                            const SolverOptions& options = {},
                            std::optional<Vector> x0 = std::nullopt,
                            std::optional<DualVariable> warm_Y = std::nullopt);

// ||A^T b||_inf: smallest lambda1 (lambda2 = 0) for which 0 is optimal.
double lambda_max(const Matrix& A, const Vector& b);

// {5e-1, 2e-1, 1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3}
std::vector<double> default_rho_grid();

// Solves lambda1 = lambda2 = rho * lambda1_max for each rho, largest first,
// warm-starting each solve (x and dual blocks) from the previous entry.
PathResult reg_path(const LeastSquaresLoss& loss, const GroupStructure& gs,
                    std::span<const double> rho_grid,
                    const SolverOptions& options = {});

}  // namespace ogl
