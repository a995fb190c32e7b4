#include <cmath>

#include "doctest.h"
#include "ogl/dual.hpp"
#include "ogl/rng.hpp"

using namespace ogl;

namespace {

GroupStructure small_structure() {
  return validate_groups({{0, 1, 2}, {1, 3}, {2, 3, 4}}, {1.0, 0.8, 1.2}, 5);
}

DualVariable random_feasible(const GroupStructure& gs, double lambda2,
                             RandomStream& rng) {
  DualVariable Y = DualVariable::zeros(gs);
  for (int i = 0; i < gs.g(); ++i) {
    for (Eigen::Index k = 0; k < Y.blocks[i].size(); ++k) {
      Y.blocks[i][k] = rng.normal();
    }
    const double radius = lambda2 * gs.weights[i] * rng.uniform();
    const double norm = Y.blocks[i].norm();
    if (norm > 0.0) Y.blocks[i] *= radius / norm;
  }
  return Y;
}

Vector random_positive(int p, RandomStream& rng) {
  Vector u(p);
  for (int j = 0; j < p; ++j) u[j] = rng.uniform(0.2, 3.0);
  return u;
}

}  // namespace

TEST_SUITE_BEGIN("dual");

TEST_CASE("project_omega scales overlong columns and keeps feasible ones") {
  const GroupStructure gs = validate_groups({{0, 1}}, {1.0}, 2);
  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 6.0, 8.0;  // norm 10
  const DualVariable projected = project_omega(Y, gs, 2.0);
  CHECK(projected.blocks[0].norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(projected.blocks[0][0] == doctest::Approx(1.2));

  DualVariable feasible = DualVariable::zeros(gs);
  feasible.blocks[0] << 0.3, -0.4;
  const DualVariable same = project_omega(feasible, gs, 2.0);
  CHECK((same.blocks[0].array() == feasible.blocks[0].array()).all());

  const DualVariable zero = project_omega(DualVariable::zeros(gs), gs, 2.0);
  CHECK(zero.blocks[0].isZero(0.0));
}

TEST_CASE("projection is the nearest feasible point") {
  RandomStream rng(21);
  const GroupStructure gs = small_structure();
  const double lambda2 = 0.7;
  for (int trial = 0; trial < 100; ++trial) {
    DualVariable Y = DualVariable::zeros(gs);
    for (int i = 0; i < gs.g(); ++i) {
      for (Eigen::Index k = 0; k < Y.blocks[i].size(); ++k) {
        Y.blocks[i][k] = 3.0 * rng.normal();
      }
    }
    const DualVariable P = project_omega(Y, gs, lambda2);
    const DualVariable Z = random_feasible(gs, lambda2, rng);
    double dist_p = 0.0, dist_z = 0.0;
    for (int i = 0; i < gs.g(); ++i) {
      dist_p += (Y.blocks[i] - P.blocks[i]).squaredNorm();
      dist_z += (Y.blocks[i] - Z.blocks[i]).squaredNorm();
    }
    CHECK(dist_p <= dist_z + 1e-12);
  }
}

TEST_CASE("primal_from_dual basics") {
  const GroupStructure gs = validate_groups({{0}}, {1.0}, 1);
  Vector u(1);
  u << 5.0;

  CHECK(primal_from_dual(DualVariable::zeros(gs), gs, u)[0] == 5.0);

  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 2.0;
  CHECK(primal_from_dual(Y, gs, u)[0] == 3.0);

  Y.blocks[0] << 7.0;
  CHECK(primal_from_dual(Y, gs, u)[0] == 0.0);
}

TEST_CASE("omega_value worked example") {
  const GroupStructure gs = validate_groups({{0}}, {1.0}, 1);
  Vector u(1);
  u << 5.0;
  CHECK(omega_value(DualVariable::zeros(gs), gs, u) == 0.0);

  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 2.0;
  CHECK(omega_value(Y, gs, u) == doctest::Approx(-8.0));

  Y.blocks[0] << 6.0;  // Ye >= u, so x = 0 and omega = -1/2 ||u||^2
  CHECK(omega_value(Y, gs, u) == doctest::Approx(-12.5));
}

TEST_CASE("omega_gradient equals -u per support at Y = 0") {
  RandomStream rng(22);
  const GroupStructure gs = small_structure();
  const Vector u = random_positive(gs.p, rng);
  const DualVariable grad = omega_gradient(DualVariable::zeros(gs), gs, u);
  for (int i = 0; i < gs.g(); ++i) {
    for (std::size_t k = 0; k < gs.groups[i].size(); ++k) {
      CHECK(grad.blocks[i][static_cast<Eigen::Index>(k)] ==
            -u[gs.groups[i][k]]);
    }
  }
}

TEST_CASE("omega_gradient vanishes when the primal clamps to zero") {
  const GroupStructure gs = validate_groups({{0, 1}}, {1.0}, 2);
  Vector u(2);
  u << 0.5, 0.5;
  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 2.0, 2.0;  // Ye >= u componentwise
  const DualVariable grad = omega_gradient(Y, gs, u);
  CHECK(grad.blocks[0].isZero(0.0));
}

TEST_CASE("omega_gradient matches central finite differences") {
  RandomStream rng(23);
  const double h = 1e-6;
  int done = 0;
  std::uint64_t nonce = 0;
  while (done < 30) {
    const GroupStructure gs =
        validate_groups({{0, 1, 2}, {1, 3}, {3, 4, 5}}, {1.0, 0.9, 1.1}, 6);
    RandomStream local(500 + nonce++);
    const Vector u = random_positive(gs.p, local);
    DualVariable Y = random_feasible(gs, 0.8, local);
    // Stay clear of the max(., 0) kinks so the difference quotient is clean.
    const Vector margin = u - dual_row_sums(Y, gs);
    if (margin.cwiseAbs().minCoeff() < 1e-3) continue;
    ++done;

    const DualVariable grad = omega_gradient(Y, gs, u);
    double err_sq = 0.0, ref_sq = 0.0;
    for (int i = 0; i < gs.g(); ++i) {
      for (Eigen::Index k = 0; k < Y.blocks[i].size(); ++k) {
        DualVariable up = Y, down = Y;
        up.blocks[i][k] += h;
        down.blocks[i][k] -= h;
        const double fd =
            (omega_value(up, gs, u) - omega_value(down, gs, u)) / (2.0 * h);
        err_sq += (fd - grad.blocks[i][k]) * (fd - grad.blocks[i][k]);
        ref_sq += grad.blocks[i][k] * grad.blocks[i][k];
      }
    }
    CHECK(std::sqrt(err_sq) <= 1e-6 * std::max(1.0, std::sqrt(ref_sq)));
  }
}

TEST_CASE("omega gradient is Lipschitz with constant g^2") {
  RandomStream rng(24);
  const GroupStructure gs = small_structure();
  const double g2 = static_cast<double>(gs.g()) * gs.g();
  const Vector u = random_positive(gs.p, rng);
  for (int trial = 0; trial < 200; ++trial) {
    const DualVariable Y1 = random_feasible(gs, 1.0, rng);
    const DualVariable Y2 = random_feasible(gs, 1.0, rng);
    const DualVariable G1 = omega_gradient(Y1, gs, u);
    const DualVariable G2 = omega_gradient(Y2, gs, u);
    double dg = 0.0, dy = 0.0;
    for (int i = 0; i < gs.g(); ++i) {
      dg += (G1.blocks[i] - G2.blocks[i]).squaredNorm();
      dy += (Y1.blocks[i] - Y2.blocks[i]).squaredNorm();
    }
    CHECK(std::sqrt(dg) <= g2 * std::sqrt(dy) + 1e-12);
  }
}

TEST_CASE("omega is convex along midpoints") {
  RandomStream rng(25);
  const GroupStructure gs = small_structure();
  const Vector u = random_positive(gs.p, rng);
  for (int trial = 0; trial < 100; ++trial) {
    const DualVariable Y1 = random_feasible(gs, 1.0, rng);
    const DualVariable Y2 = random_feasible(gs, 1.0, rng);
    DualVariable mid = DualVariable::zeros(gs);
    for (int i = 0; i < gs.g(); ++i) {
      mid.blocks[i] = 0.5 * (Y1.blocks[i] + Y2.blocks[i]);
    }
    const double lhs = omega_value(mid, gs, u);
    const double rhs =
        0.5 * omega_value(Y1, gs, u) + 0.5 * omega_value(Y2, gs, u);
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("max(., 0) is non-expansive") {
  RandomStream rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    Vector x(8), y(8);
    for (int j = 0; j < 8; ++j) {
      x[j] = 3.0 * rng.normal();
      y[j] = 3.0 * rng.normal();
    }
    CHECK((x.cwiseMax(0.0) - y.cwiseMax(0.0)).norm() <= (x - y).norm() + 1e-14);
  }
}

TEST_CASE("duality gap at Y = 0 and at x = 0") {
  RandomStream rng(27);
  const GroupStructure gs = small_structure();
  const double lambda2 = 0.6;
  const Vector u = random_positive(gs.p, rng);

  double expected = 0.0;
  for (int i = 0; i < gs.g(); ++i) {
    expected += lambda2 * gs.weights[i] * group_norm(u, gs.groups[i]);
  }
  CHECK(duality_gap(u, DualVariable::zeros(gs), gs, lambda2) ==
        doctest::Approx(expected).epsilon(1e-14));

  const DualVariable Y = random_feasible(gs, lambda2, rng);
  CHECK(duality_gap(Vector::Zero(gs.p), Y, gs, lambda2) == 0.0);
}

TEST_CASE("duality gap stays nonnegative for large lambda2") {
  // The scaling regression this guards: with ||Y^i|| bounded by lambda2*w_i,
  // the certificate must stay nonnegative even when lambda2 > 1.
  const GroupStructure gs = validate_groups({{0}}, {1.0}, 1);
  Vector u(1);
  u << 5.0;
  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 1.9;
  const Vector x = primal_from_dual(Y, gs, u);
  const double gap = duality_gap(x, Y, gs, 2.0);
  CHECK(gap == doctest::Approx(3.1 * (2.0 - 1.9)));
  CHECK(gap >= 0.0);
}

TEST_CASE("duality gap rejects infeasible dual variables") {
  const GroupStructure gs = validate_groups({{0, 1}}, {1.0}, 2);
  DualVariable Y = DualVariable::zeros(gs);
  Y.blocks[0] << 3.0, 4.0;  // norm 5 > 1
  Vector x(2);
  x << 1.0, 1.0;
  CHECK_THROWS_AS(duality_gap(x, Y, gs, 1.0), InfeasibleDual);
}

TEST_CASE("weak duality holds for random feasible duals") {
  RandomStream rng(28);
  const GroupStructure gs = small_structure();
  const double lambda2 = 0.9;
  const Vector u = random_positive(gs.p, rng);
  const PenaltyParams params{0.0, lambda2};
  for (int trial = 0; trial < 100; ++trial) {
    const DualVariable Y = random_feasible(gs, lambda2, rng);
    const Vector x = primal_from_dual(Y, gs, u);
    const double h =
        0.5 * (x - u).squaredNorm() + penalty_value(x, gs, params);
    CHECK(-omega_value(Y, gs, u) <= h + 1e-10);
  }
}

TEST_CASE("solve_dual single group closed form") {
  const GroupStructure gs = validate_groups({{0, 1}}, {1.0}, 2);
  Vector u(2);
  u << 3.0, 4.0;
  const DualSolveResult result = solve_dual(u, gs, 2.0, 1e-10, 100000);
  CHECK(result.report.converged);
  CHECK(result.report.gap <= 1e-10);
  CHECK(result.x[0] == doctest::Approx(1.8).epsilon(1e-8));
  CHECK(result.x[1] == doctest::Approx(2.4).epsilon(1e-8));
  CHECK(result.Y.blocks[0].norm() == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("solve_dual drives covered sub-threshold problems to zero") {
  const GroupStructure gs = validate_groups({{0, 1}, {1, 2}}, {1.0, 1.0}, 3);
  Vector u(3);
  u << 0.3, 0.2, 0.4;
  const DualSolveResult result = solve_dual(u, gs, 1.0, 1e-12, 100000);
  CHECK(result.report.converged);
  CHECK(result.x.isZero(0.0));
}

TEST_CASE("solve_dual accepts and reuses a warm start") {
  const GroupStructure gs = small_structure();
  RandomStream rng(29);
  const Vector u = random_positive(gs.p, rng);
  const DualSolveResult cold = solve_dual(u, gs, 0.8, 1e-12, 100000);
  REQUIRE(cold.report.converged);
  const DualSolveResult warm =
      solve_dual(u, gs, 0.8, 1e-12, 100000, cold.Y);
  CHECK(warm.report.converged);
  CHECK(warm.report.iterations == 0);
}

TEST_SUITE_END();
