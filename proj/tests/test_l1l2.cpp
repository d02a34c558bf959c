#include <doctest.h>

#include <cmath>

#include "fracmin/l1l2.hpp"
#include "fracmin/line_search.hpp"
#include "fracmin/oracle.hpp"
#include "fracmin/pgsa.hpp"
#include "oracles.hpp"

using namespace fracmin;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

Vector unit_box(Index n, double sign) { return Vector::Constant(n, sign); }

struct Instance {
  Matrix a;
  Vector truth;
  Vector b;
};

Instance dct_instance(std::uint64_t seed, Index m = 64, Index n = 1024, Index k = 12) {
  Instance out;
  out.a = gen_dct_matrix(m, n, 1.0, derive_seed(seed, 0));
  out.truth = gen_ground_truth(n, k, derive_seed(seed, 1));
  out.b = out.a * out.truth;
  return out;
}

}  // namespace

TEST_SUITE("l1l2") {

TEST_CASE("prox fixes the origin") {
  for (double t : {0.0, 0.1, 5.0}) CHECK(prox_l1_box(Vector::Zero(3), t, unit_box(3, -1), unit_box(3, 1)).isZero(0.0));
}

TEST_CASE("prox soft-thresholds then clips, matching a grid search") {
  for (const auto& [z, expected] : {std::pair{0.5, 0.3}, std::pair{2.0, 1.0}, std::pair{-0.7, -0.5}}) {
    const double got = prox_l1_box(scalar(z), 0.2, scalar(-1), scalar(1))(0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-15));
    const double grid = oracle::grid_argmin(
        [z = z](double y) { return 0.2 * std::abs(y) + 0.5 * (y - z) * (y - z); }, -1.0, 1.0, 1e-4);
    CHECK(std::abs(grid - got) <= 2e-4);
  }
}

TEST_CASE("prox agrees with a grid search on random 1-D instances with asymmetric boxes") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double z = 3.0 * rng.gaussian();
    const double t = rng.uniform();
    const double lo = -rng.uniform() * 2.0, hi = rng.uniform() * 2.0;
    const double got = prox_l1_box(scalar(z), t, scalar(lo), scalar(hi))(0);
    const double grid = oracle::grid_argmin(
        [&](double y) { return t * std::abs(y) + 0.5 * (y - z) * (y - z); }, lo, hi, 1e-4);
    CHECK(std::abs(grid - got) <= 2e-4);
  }
}

TEST_CASE("prox is nonexpansive") {
  SplitMix64 rng(32);
  const Vector lo = unit_box(20, -1), hi = unit_box(20, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector z1 = 2.0 * oracle::gaussian_vector(20, rng);
    const Vector z2 = 2.0 * oracle::gaussian_vector(20, rng);
    const double t = rng.uniform();
    CHECK((prox_l1_box(z1, t, lo, hi) - prox_l1_box(z2, t, lo, hi)).norm() <= (z1 - z2).norm() + 1e-12);
  }
}

TEST_CASE("prox and constructor reject invalid boxes") {
  CHECK_THROWS_AS(prox_l1_box(scalar(0.5), 0.1, scalar(1), scalar(-1)), InvalidConfig);
  CHECK_THROWS_AS(prox_l1_box(scalar(0.5), -0.1, scalar(-1), scalar(1)), InvalidConfig);
  CHECK_THROWS_AS(L1L2PenaltyProblem(Matrix::Ones(1, 1), scalar(1), 0.1, scalar(0.5), scalar(1)), InvalidConfig);
  CHECK_THROWS_AS(L1L2PenaltyProblem(Matrix::Ones(1, 1), scalar(1), 0.0), InvalidConfig);
  CHECK_THROWS_AS(L1L2PenaltyProblem(Matrix::Ones(2, 1), scalar(1), 0.1), DimensionMismatch);
}

TEST_CASE("l2 subgradient") {
  Vector v(2);
  v << 3, 4;
  CHECK((l2_subgradient(v) - v / 5.0).norm() <= 1e-15);
  CHECK(l2_subgradient(Vector::Zero(3)).isZero(0.0));
  CHECK(l2_subgradient(Vector::Unit(4, 2)) == Vector::Unit(4, 2));
}

TEST_CASE("DCT entries are bounded by 1/sqrt(m)") {
  const Matrix a = gen_dct_matrix(64, 300, 1.0, 5);
  CHECK(a.cwiseAbs().maxCoeff() <= 1.0 / 8.0 + 1e-15);
}

TEST_CASE("DCT and ground truth are reproducible bit for bit") {
  CHECK(gen_dct_matrix(16, 40, 3.0, 77) == gen_dct_matrix(16, 40, 3.0, 77));
  CHECK(gen_dct_matrix(16, 40, 3.0, 77) != gen_dct_matrix(16, 40, 3.0, 78));
  CHECK(gen_ground_truth(100, 7, 9) == gen_ground_truth(100, 7, 9));
}

TEST_CASE("ground truth is a unit-norm K-sparse vector") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Vector x = gen_ground_truth(1024, 12, seed);
    CHECK(std::abs(x.norm() - 1.0) <= 1e-15);
    CHECK((x.array() != 0.0).count() == 12);
  }
  CHECK_THROWS_AS(gen_ground_truth(5, 6, 1), InvalidConfig);
  CHECK_THROWS_AS(gen_ground_truth(5, 0, 1), InvalidConfig);
}

TEST_CASE("initializer on zero data is degenerate and has no fallback") {
  const Matrix a = gen_dct_matrix(8, 16, 1.0, 3);
  CHECK_THROWS_AS(l1_box_initializer(a, Vector::Zero(8), unit_box(16, -1), unit_box(16, 1)), DegenerateInput);
  CHECK_THROWS_AS(l1_box_initial_point(a, Vector::Zero(8), unit_box(16, -1), unit_box(16, 1)), DegenerateInput);
}

TEST_CASE("initial point falls back to the clipped normalized A^T b") {
  SplitMix64 rng(40);
  const Matrix a = oracle::gaussian_matrix(6, 10, rng);
  const Vector b = oracle::gaussian_vector(6, rng);
  const Vector lo = unit_box(10, -0.1), hi = unit_box(10, 0.2);
  CHECK_THROWS_AS(l1_box_initializer(a, b, lo, hi, 0), DegenerateInput);
  const Vector atb = a.transpose() * b;
  const Vector expected = (atb / atb.norm()).cwiseMax(lo).cwiseMin(hi);
  CHECK((l1_box_initial_point(a, b, lo, hi, 0) - expected).norm() <= 1e-15);
}

TEST_CASE("initializer on the scalar instance returns b - mu") {
  const double mu = 1e-6 * 0.5;
  const Vector x = l1_box_initializer(Matrix::Ones(1, 1), scalar(0.5), scalar(-1), scalar(1));
  CHECK(std::abs(x(0) - (0.5 - mu)) <= 1e-6);
}

TEST_CASE("initializer output stays in the box") {
  const Instance inst = dct_instance(3, 32, 128, 4);
  const Vector lo = unit_box(128, -0.05), hi = unit_box(128, 0.05);
  const Vector x = l1_box_initializer(inst.a, inst.b, lo, hi, 300);
  CHECK((x.array() >= lo.array()).all());
  CHECK((x.array() <= hi.array()).all());
}

TEST_CASE("critical residual of a converged scalar run is tiny") {
  const L1L2PenaltyProblem p(Matrix::Ones(1, 1), scalar(0.7), 0.05);
  PgsaConfig config;
  config.step_tol = 1e-12;
  config.max_iter = 100000;
  const SolverTrace trace = run_pgsa(p, scalar(0.3), config);
  CHECK(trace.certificate.converged_reason == StopReason::step_tol);
  CHECK(l1l2_critical_residual(p, trace.final_point) <= 1e-8);
}

TEST_CASE("interior point with u = lambda contributes nothing") {
  // x = 0.5 and b = 0.5 give c = lambda and grad h = 0, so u = lambda.
  const L1L2PenaltyProblem p(Matrix::Ones(1, 1), scalar(0.5), 0.1);
  CHECK(l1l2_critical_residual(p, scalar(0.5)) <= 1e-15);
}

TEST_CASE("active upper bound absorbs an excess of 5 through the normal cone") {
  // x = 1, b = -sqrt(11): c = lambda + (1 + sqrt 11)^2 / 2, grad h = 1 + sqrt 11, u = lambda + 5.
  const double lambda = 0.1;
  const L1L2PenaltyProblem p(Matrix::Ones(1, 1), scalar(-std::sqrt(11.0)), lambda);
  const double t = 1.0 + std::sqrt(11.0);
  const double u = (lambda + 0.5 * t * t) - t;
  CHECK(u == doctest::Approx(lambda + 5.0));
  CHECK(l1l2_critical_residual(p, scalar(1.0)) <= 1e-15);
  const L1L2PenaltyProblem wide(Matrix::Ones(1, 1), scalar(-std::sqrt(11.0)), lambda, scalar(-2), scalar(2));
  CHECK(l1l2_critical_residual(wide, scalar(1.0)) == doctest::Approx(5.0));
}

TEST_CASE("critical residual outside the domain raises") {
  const L1L2PenaltyProblem p(Matrix::Ones(1, 1), scalar(0.5), 0.1);
  CHECK_THROWS_AS(l1l2_critical_residual(p, scalar(0.0)), DomainError);
  CHECK_THROWS_AS(l1l2_critical_residual(p, scalar(1.5)), DomainError);
}

TEST_CASE("objective at an exact sparse solution is lambda |x|_1 and the ratio is scale invariant") {
  const Instance inst = dct_instance(11, 32, 128, 5);
  const L1L2PenaltyProblem p(inst.a, inst.b, kDefaultL1L2Lambda);
  const double value = eval_objective(p, inst.truth).value;
  CHECK(value == doctest::Approx(kDefaultL1L2Lambda * inst.truth.lpNorm<1>()).epsilon(1e-12));
  const RecoveryReport once = make_recovery_report(inst.truth, inst.truth, 0.0, 0);
  const RecoveryReport thrice = make_recovery_report(3.0 * inst.truth, inst.truth, 0.0, 0);
  CHECK(once.l1_over_l2 == doctest::Approx(thrice.l1_over_l2).epsilon(1e-15));
  CHECK(once.success);
  CHECK_FALSE(thrice.success);
}

TEST_CASE("recovery success is relative error below 1e-3") {
  const Vector truth = Vector::Unit(4, 0);
  CHECK(make_recovery_report(truth * (1 + 0.9e-3), truth, 0, 0).success);
  CHECK_FALSE(make_recovery_report(truth * (1 + 1.1e-3), truth, 0, 0).success);
}

TEST_CASE("solver invariants hold in the convex step regime") {
  const Instance inst = dct_instance(21, 32, 128, 4);
  const L1L2PenaltyProblem p(inst.a, inst.b, 1e-3);
  const Vector x0 = l1_box_initial_point(inst.a, inst.b, p.lower(), p.upper(), 200);
  PgsaConfig fixed;
  fixed.max_iter = 300;
  fixed.alpha = 1.9 / p.lipschitz();
  CHECK(audit_trace(run_pgsa(p, x0, fixed), make_audit_spec(p, fixed)).passed());
  for (int memory : {0, 4}) {
    LineSearchConfig ls;
    ls.memory = memory;
    ls.max_iter = 300;
    const SolverTrace trace = run_pgsa_ls(p, x0, ls);
    const AuditReport report = audit_trace(trace, make_audit_spec(p, ls));
    CHECK(report.passed());
    CHECK(resolve_line_search(p, ls).lower == doctest::Approx(1.99 / p.lipschitz()));
  }
}

}  // TEST_SUITE

TEST_SUITE("unattainable") {

TEST_CASE("DCT with large F has highly coherent neighbouring columns") {
  const Matrix a = gen_dct_matrix(64, 60, 20.0, 6);
  double total = 0.0;
  for (Index j = 0; j < 50; ++j) {
    total += std::abs(a.col(j).dot(a.col(j + 1))) / (a.col(j).norm() * a.col(j + 1).norm());
  }
  CHECK(total / 50.0 >= 0.99);
}

TEST_CASE("initializer reaches relative error 0.2 on at least 80% of 50 DCT instances") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = dct_instance(derive_seed(0, seed));
    const Vector x = l1_box_initializer(inst.a, inst.b, unit_box(1024, -1), unit_box(1024, 1));
    if ((x - inst.truth).norm() / inst.truth.norm() <= 0.2) ++good;
  }
  MESSAGE("initializer within 0.2 on " << good << " of 50 seeds");
  CHECK(good >= 40);
}

}  // TEST_SUITE
