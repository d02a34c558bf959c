#include <doctest.h>

#include <cmath>
#include <set>

#include "fracmin/l1l2.hpp"
#include "fracmin/line_search.hpp"
#include "fracmin/oracle.hpp"
#include "fracmin/pgsa.hpp"
#include "fracmin/sgep.hpp"
#include "oracles.hpp"

using namespace fracmin;

namespace {

SgepProblem sfda_200(std::uint64_t seed) {
  SfdaRecipe recipe;
  recipe.n = 200;
  recipe.r = 10;
  recipe.seed = seed;
  return gen_sfda(recipe).problem;
}

std::vector<double> geometric(std::size_t count, double ratio, double scale = 1.0) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = scale * std::pow(ratio, static_cast<double>(k));
  return out;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("finite differences confirm the SGEP gradient") {
  SplitMix64 rng(50);
  const SgepProblem p(oracle::random_psd(12, 24, rng), oracle::random_psd(12, 24, rng), 4);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = oracle::gaussian_vector(12, rng);
    const double err = fd_gradient_check([&](const Vector& y) { return p.eval_h(y); },
                                         [&](const Vector& y) { return p.grad_h(y); }, x, 1e-5);
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("finite differences confirm the l1/l2 gradient") {
  SplitMix64 rng(51);
  const L1L2PenaltyProblem p(oracle::gaussian_matrix(8, 15, rng), oracle::gaussian_vector(8, rng), 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = oracle::gaussian_vector(15, rng);
    const double err = fd_gradient_check([&](const Vector& y) { return p.eval_h(y); },
                                         [&](const Vector& y) { return p.grad_h(y); }, x, 1e-5);
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("finite differences detect a gradient off by one percent") {
  SplitMix64 rng(52);
  const SgepProblem p(oracle::random_psd(6, 12, rng), oracle::random_psd(6, 12, rng), 2);
  const Vector x = oracle::gaussian_vector(6, rng);
  const double err = fd_gradient_check([&](const Vector& y) { return p.eval_h(y); },
                                       [&](const Vector& y) { return Vector(1.01 * p.grad_h(y)); }, x, 1e-5);
  CHECK(err >= 1e-3);
}

TEST_CASE("audit of a passing pgsa run is empty") {
  const SgepProblem p = sfda_200(1);
  PgsaConfig config;
  config.max_iter = 200;
  const SolverTrace trace = run_pgsa(p, sgep_default_init(200, 10), config);
  CHECK(audit_trace(trace, make_audit_spec(p, config)).violations.empty());
}

TEST_CASE("audit flags exactly the corrupted iteration") {
  const SgepProblem p = sfda_200(2);
  for (SolverMode mode : {SolverMode::pgsa, SolverMode::pgsa_ml}) {
    SolverTrace trace;
    AuditSpec spec;
    if (mode == SolverMode::pgsa) {
      PgsaConfig config;
      config.max_iter = 100;
      trace = run_pgsa(p, sgep_default_init(200, 10), config);
      spec = make_audit_spec(p, config);
    } else {
      LineSearchConfig config;
      config.memory = 0;
      config.max_iter = 100;
      trace = run_pgsa_ls(p, sgep_default_init(200, 10), config);
      spec = make_audit_spec(p, config);
    }
    REQUIRE(trace.records.size() > 20);
    trace.records[15].objective += 0.5;
    const AuditReport report = audit_trace(trace, spec);
    REQUIRE_FALSE(report.passed());
    std::set<long> flagged;
    for (const Violation& v : report.violations) {
      flagged.insert(v.iteration);
      CHECK(v.magnitude > 0.0);
    }
    CHECK(flagged == std::set<long>{15});
  }
}

TEST_CASE("nonmonotone runs have no windowed-max violations") {
  for (std::uint64_t seed = 3; seed <= 5; ++seed) {
    const SgepProblem p = sfda_200(seed);
    LineSearchConfig config;
    config.memory = 4;
    config.max_iter = 300;
    const SolverTrace trace = run_pgsa_ls(p, sgep_default_init(200, 10), config);
    const AuditReport report = audit_trace(trace, make_audit_spec(p, config));
    CHECK(report.passed());
  }
}

TEST_CASE("rate fit recovers the ratio of a geometric sequence") {
  const RateFit fit = fit_linear_rate(geometric(60, 0.9));
  CHECK(std::abs(fit.slope - std::log(0.9)) <= 1e-6);
  CHECK(fit.r_squared >= 0.999);
  CHECK(fit.window_end == 55);
  CHECK(fit.window_begin == 20);
}

TEST_CASE("rate fit of a geometric iterate sequence") {
  SolverTrace trace;
  SplitMix64 rng(53);
  const Vector limit = oracle::gaussian_vector(5, rng);
  const Vector v = oracle::gaussian_vector(5, rng);
  for (int k = 0; k < 60; ++k) trace.iterates.push_back(limit + std::pow(0.9, k) * v);
  trace.iterates.push_back(limit);
  trace.final_point = limit;
  const RateFit fit = fit_linear_rate(trace);
  CHECK(std::abs(fit.slope - std::log(0.9)) <= 1e-6);
  CHECK(fit.r_squared >= 0.999);
}

TEST_CASE("pgsa on SFDA converges linearly") {
  const SgepProblem p = sfda_200(6);
  PgsaConfig config;
  config.record_iterates = true;
  config.max_iter = 2000;
  const SolverTrace trace = run_pgsa(p, sgep_default_init(200, 10), config);
  const RateFit fit = fit_linear_rate(trace);
  CHECK(fit.slope < 0.0);
  CHECK(fit.r_squared >= 0.9);
}

TEST_CASE("rate fit rejects degenerate input") {
  CHECK_THROWS_AS(fit_linear_rate(std::vector<double>(60, 0.25)), InsufficientData);
  CHECK_THROWS_AS(fit_linear_rate(geometric(20, 0.9)), InsufficientData);
  CHECK_THROWS_AS(fit_linear_rate(std::vector<double>(60, 0.0)), InsufficientData);
}

TEST_CASE("rate fit is translation and scale equivariant") {
  SplitMix64 rng(54);
  std::vector<double> errors(80);
  for (std::size_t k = 0; k < errors.size(); ++k) {
    errors[k] = std::pow(0.93, static_cast<double>(k)) * (1.0 + 0.3 * rng.uniform());
  }
  const RateFit base = fit_linear_rate(errors);
  for (double t : {1e-3, 0.5, 7.0, 1e4}) {
    std::vector<double> scaled = errors;
    for (double& e : scaled) e *= t;
    const RateFit fit = fit_linear_rate(scaled);
    CHECK(std::abs(fit.slope - base.slope) <= 1e-12);
    CHECK(std::abs(fit.r_squared - base.r_squared) <= 1e-12);
  }

  SolverTrace trace;
  const Vector limit = oracle::gaussian_vector(4, rng);
  for (int k = 0; k < 60; ++k) {
    trace.iterates.push_back(limit + std::pow(0.97, k) * (Vector::Ones(4) + 0.2 * oracle::gaussian_vector(4, rng)));
  }
  trace.iterates.push_back(limit);
  trace.final_point = limit;
  SolverTrace shifted = trace;
  const Vector offset = Vector::Constant(4, 3.0);
  for (Vector& it : shifted.iterates) it += offset;
  shifted.final_point += offset;
  const RateFit a = fit_linear_rate(trace);
  const RateFit b = fit_linear_rate(shifted);
  CHECK(std::abs(a.slope - b.slope) <= 1e-12);
  CHECK(std::abs(a.r_squared - b.r_squared) <= 1e-12);
}

}  // TEST_SUITE
