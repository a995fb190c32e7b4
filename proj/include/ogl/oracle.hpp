#pragma once

#include <string>

#include "ogl/data_io.hpp"
#include "ogl/prox.hpp"
#include "ogl/solver.hpp"

// Slow reference implementations and golden-file IO. Test and dev builds
// only; not part of the shipped library surface.

namespace ogl::oracle {

struct OracleConfig {
  double gap_tol = 1e-12;
  long max_iter = 10000000;
};

struct OracleProxResult {
  Vector x;
  double gap = 0.0;
  long iterations = 0;
};

// Reference prox: plain (non-accelerated) projected gradient on the dual
// with the fixed safe step 1/g^2, no zero-group identification and no
// problem reduction beyond working on |v| and restoring signs. The returned
// gap certifies optimality a posteriori; OracleNotConverged is a hard error.
OracleProxResult oracle_prox(const Vector& v, const GroupStructure& gs,
                             const PenaltyParams& params,
                             const OracleConfig& config = {});

struct OracleMinResult {
  double f_star = 0.0;
  Vector x_star;
  double L_final = 1.0;
};

// Reference optimal objective value: tight-tolerance solver run certified by
// fixed-point re-application of the prox (movement <= 1e-9 in inf-norm).
OracleMinResult oracle_objective_min(const SmoothLoss& loss,
                                     const GroupStructure& gs,
                                     const PenaltyParams& params);

struct GoldenProxRecord {
  int id = 0;
  std::uint64_t seed = 0;
  ProxProblem problem;
  Vector x;
  double gap = 0.0;
};

std::vector<GoldenProxRecord> read_prox_goldens(const std::string& path);
void write_prox_goldens(const std::string& path,
                        const std::vector<GoldenProxRecord>& records);

struct SolverReference {
  SynthSpec spec;
  double rho = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda1_max = 0.0;
  double f_star = 0.0;
  double L_final = 1.0;
  Vector x_star;
};

SolverReference read_solver_reference(const std::string& path);
void write_solver_reference(const std::string& path, const SolverReference& ref);

}  // namespace ogl::oracle
