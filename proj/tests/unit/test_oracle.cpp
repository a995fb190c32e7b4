#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "ogl/oracle.hpp"
#include "ogl/rng.hpp"
#include "support/instances.hpp"

using namespace ogl;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("oracle_prox single-group closed form") {
  Vector v(2);
  v << 3.0, 4.0;
  const GroupStructure gs = validate_groups({{0, 1}}, {1.0}, 2);
  const auto result = oracle::oracle_prox(v, gs, {0.0, 2.5}, {1e-12, 10000000});
  CHECK(result.x[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(result.x[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(result.gap >= 0.0);
  CHECK(result.gap <= 1e-12);
}

TEST_CASE("oracle_prox reduces to soft thresholding at lambda2 = 0") {
  RandomStream rng(51);
  const GroupStructure gs = validate_groups({{0, 1, 2}, {2, 3}}, {1.0, 1.0}, 4);
  Vector v(4);
  for (int j = 0; j < 4; ++j) v[j] = rng.normal();
  const auto result = oracle::oracle_prox(v, gs, {0.7, 0.0});
  const Vector expected = soft_threshold(v, 0.7);
  for (int j = 0; j < 4; ++j) {
    CHECK(result.x[j] == doctest::Approx(expected[j]).epsilon(1e-9));
  }
}

TEST_CASE("oracle_prox agrees with the fast prox on sampled instances") {
  for (int id : {0, 1, 2, 3, 9, 17, 26, 38, 55, 73}) {
    const ProxProblem problem = testing::make_prox_instance(id);
    const auto reference = oracle::oracle_prox(problem.v, problem.gs,
                                               problem.params, {1e-13, 50000000});
    const ProxSolution fast =
        prox(problem.v, problem.gs, problem.params, {1e-13, 500000});
    REQUIRE(fast.converged);
    CHECK((fast.x - reference.x).lpNorm<Eigen::Infinity>() <= 1e-6);
    const double f_fast =
        prox_objective(fast.x, problem.v, problem.gs, problem.params);
    const double f_ref =
        prox_objective(reference.x, problem.v, problem.gs, problem.params);
    CHECK(f_fast == doctest::Approx(f_ref).epsilon(1e-9));
  }
}

TEST_CASE("oracle_prox raises on impossible budgets") {
  const ProxProblem problem = testing::make_prox_instance(0);
  CHECK_THROWS_AS(
      oracle::oracle_prox(problem.v, problem.gs, problem.params, {1e-13, 3}),
      OracleNotConverged);
}

TEST_CASE("oracle_objective_min at the l1 threshold") {
  RandomStream rng(52);
  Matrix A(8, 5);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) A(i, j) = rng.normal();
  }
  Vector b(8);
  for (int i = 0; i < 8; ++i) b[i] = rng.normal();
  const LeastSquaresLoss loss(A, b);
  const GroupStructure gs = validate_groups({{0, 1, 2}, {3, 4}}, {1.0, 1.0}, 5);
  const double l1max = lambda_max(A, b);
  const auto result = oracle::oracle_objective_min(loss, gs, {l1max, 0.0});
  CHECK(result.f_star == doctest::Approx(0.5 * b.squaredNorm()).epsilon(1e-12));
  CHECK(result.x_star.isZero(0.0));
}

TEST_CASE("oracle_objective_min approaches interpolation on clean systems") {
  SynthSpec spec;
  spec.p = 10;
  spec.n = 20;
  spec.g = 3;
  spec.group_size = 4;
  spec.overlap = 1;
  spec.active_groups = 3;
  spec.noise_sigma = 0.0;
  spec.seed = 5;
  const SynthData data = synth_overlap_dataset(spec);
  const LeastSquaresLoss loss(data.data.A, data.data.b);
  const double tiny = 1e-7 * lambda_max(loss.A(), loss.b());
  const auto result = oracle::oracle_objective_min(loss, data.gs, {tiny, tiny});
  CHECK(result.f_star <= 1e-4);
}

TEST_CASE("golden records round trip through JSON") {
  std::vector<oracle::GoldenProxRecord> records;
  for (int id : {0, 3}) {
    oracle::GoldenProxRecord rec;
    rec.id = id;
    rec.seed = 1000 + static_cast<std::uint64_t>(id);
    rec.problem = testing::make_prox_instance(id);
    const auto result = oracle::oracle_prox(rec.problem.v, rec.problem.gs,
                                            rec.problem.params);
    rec.x = result.x;
    rec.gap = result.gap;
    records.push_back(std::move(rec));
  }
  const std::string path =
      (std::filesystem::temp_directory_path() / "ogl_golden_rt.json").string();
  oracle::write_prox_goldens(path, records);
  const auto back = oracle::read_prox_goldens(path);
  std::filesystem::remove(path);

  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == records[i].id);
    CHECK((back[i].problem.v.array() == records[i].problem.v.array()).all());
    CHECK(back[i].problem.gs.groups == records[i].problem.gs.groups);
    CHECK(back[i].problem.gs.weights == records[i].problem.gs.weights);
    CHECK(back[i].problem.params.lambda1 == records[i].problem.params.lambda1);
    CHECK(back[i].problem.params.lambda2 == records[i].problem.params.lambda2);
    CHECK((back[i].x.array() == records[i].x.array()).all());
    CHECK(back[i].gap == records[i].gap);
  }
}

TEST_SUITE_END();
