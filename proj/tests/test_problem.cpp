#include <doctest.h>

#include <cmath>

#include "fracmin/l1l2.hpp"
#include "fracmin/sgep.hpp"
#include "oracles.hpp"

using namespace fracmin;

namespace {

Matrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v.asDiagonal();
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_SUITE("fractional-core") {

TEST_CASE("objective of a diagonal SGEP keeps numerator and denominator") {
  const SgepProblem p(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2), 1);
  const ExtendedObjective obj = eval_objective(p, vec({1, 0}));
  CHECK(obj.in_domain);
  CHECK(obj.numerator == doctest::Approx(1.0));
  CHECK(obj.denominator == doctest::Approx(0.5));
  CHECK(obj.value == doctest::Approx(2.0));
}

TEST_CASE("l1/l2 objective is infinite at the origin") {
  const L1L2PenaltyProblem p(Matrix::Identity(2, 2), vec({1, 1}), 0.1);
  const ExtendedObjective obj = eval_objective(p, Vector::Zero(2));
  CHECK_FALSE(obj.in_domain);
  CHECK(obj.denominator == 0.0);
  CHECK(std::isinf(obj.value));
}

TEST_CASE("objective is infinite outside the sparse sphere") {
  const SgepProblem p(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 1);
  const ExtendedObjective obj = eval_objective(p, vec({1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0}));
  CHECK_FALSE(obj.in_domain);
  CHECK(std::isinf(obj.value));
}

TEST_CASE("objective rejects a point of the wrong dimension") {
  const SgepProblem p(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 1);
  CHECK_THROWS_AS(eval_objective(p, Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("quotient residual vanishes for the exact stationary candidate") {
  SplitMix64 rng(11);
  const Matrix a = oracle::random_psd(4, 8, rng);
  const Matrix b = oracle::random_psd(4, 8, rng);
  const SgepProblem p(a, b, 4);
  for (int trial = 0; trial < 5; ++trial) {
    Vector x = oracle::gaussian_vector(4, rng);
    x.normalize();
    const double value = eval_objective(p, x).value;
    const Vector v = value * p.subgrad_g(x) - p.grad_h(x);
    CHECK(quotient_frechet_residual(p, x, v) <= 1e-12);
  }
}

TEST_CASE("quotient residual is zero at a generalized eigenvector") {
  const SgepProblem p(diag({1, 2}), diag({2, 1}), 2);
  CHECK(quotient_frechet_residual(p, vec({0, 1}), Vector::Zero(2)) <= 1e-15);
}

TEST_CASE("quotient residual with v = 0 matches a finite-difference gradient of the ratio") {
  const Matrix a = diag({1, 2, 3});
  const Matrix b = diag({2, 1, 3});
  const SgepProblem p(a, b, 3);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Vector x = oracle::gaussian_vector(3, rng);
    x.normalize();
    auto ratio = [&](const Vector& y) { return y.dot(b * y) / y.dot(a * y); };
    Vector fd(3);
    const double h = 1e-6;
    for (Index i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e(i) = h;
      fd(i) = (ratio(x + e) - ratio(x - e)) / (2 * h);
    }
    CHECK(quotient_frechet_residual(p, x, Vector::Zero(3)) == doctest::Approx(fd.norm()).epsilon(1e-6));
  }
}

TEST_CASE("quotient and reduced residual forms agree") {
  SplitMix64 rng(7);
  const Matrix a = oracle::random_psd(5, 10, rng);
  const Matrix b = oracle::random_psd(5, 10, rng);
  const SgepProblem p(a, b, 5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = oracle::gaussian_vector(5, rng);
    x.normalize();
    const Vector v = oracle::gaussian_vector(5, rng);
    const double q = quotient_frechet_residual(p, x, v);
    const double r = quotient_frechet_residual_reduced(p, x, v);
    CHECK(std::abs(q - r) <= 1e-12 * std::max(1.0, std::abs(q)));
  }
}

TEST_CASE("quotient residual requires a point in the domain") {
  const L1L2PenaltyProblem p(Matrix::Identity(2, 2), vec({1, 1}), 0.1);
  CHECK_THROWS_AS(quotient_frechet_residual(p, Vector::Zero(2), Vector::Zero(2)), DomainError);
}

TEST_CASE("critical point check accepts a full-support generalized eigenvector") {
  SplitMix64 rng(3);
  const Matrix a = oracle::random_psd(4, 12, rng);
  const Matrix b = oracle::random_psd(4, 12, rng);
  const SgepProblem p(a, b, 4);
  const auto [value, x] = oracle::smallest_generalized(b, a);
  CHECK(eval_objective(p, x).value == doctest::Approx(value).epsilon(1e-10));
  CHECK(critical_point_check(p, x, 1e-8));
}

TEST_CASE("critical point check accepts e1 for r = 1") {
  const SgepProblem p(diag({1, 2}), diag({2, 1}), 1);
  CHECK(critical_point_check(p, vec({1, 0}), 1e-8));
}

TEST_CASE("critical point check rejects a non-stationary feasible point") {
  SplitMix64 rng(9);
  const Matrix a = oracle::random_psd(4, 12, rng);
  const Matrix b = oracle::random_psd(4, 12, rng);
  const SgepProblem p(a, b, 4);
  Vector x = oracle::gaussian_vector(4, rng);
  x.normalize();
  const double value = eval_objective(p, x).value;
  const double independent = (b * x - value * a * x).norm();
  REQUIRE(independent > 1e-3);
  CHECK_FALSE(critical_point_check(p, x, 1e-8));
}

TEST_CASE("objective is nonnegative on random feasible points") {
  SplitMix64 rng(13);
  const SgepProblem sgep(oracle::random_psd(6, 12, rng), oracle::random_psd(6, 12, rng), 3);
  const Matrix a = oracle::gaussian_matrix(4, 6, rng);
  const L1L2PenaltyProblem l1l2(a, oracle::gaussian_vector(4, rng), 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector z = oracle::gaussian_vector(6, rng);
    CHECK(eval_objective(sgep, project_sparse_sphere(z, 3)).value >= 0.0);
    CHECK(eval_objective(l1l2, z.cwiseMax(-1.0).cwiseMin(1.0)).value >= 0.0);
  }
}

TEST_CASE("NaN from a callback is a hard error") {
  const SgepProblem p(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 1);
  Vector x(2);
  x << std::nan(""), 0.0;
  CHECK_THROWS(eval_objective(p, x));
}

}  // TEST_SUITE
