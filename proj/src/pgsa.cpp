#include "fracmin/pgsa.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

namespace fracmin {

double default_step(const FractionalProblem& problem) {
  return (problem.f_is_convex() ? 1.99 : 0.99) / problem.lipschitz();
}

ResolvedSteps resolve_steps(const FractionalProblem& problem, const PgsaConfig& config) {
  ResolvedSteps s{};
  s.alpha = config.alpha.value_or(default_step(problem));
  s.lower = config.alpha_lower.value_or(s.alpha);
  s.upper = config.alpha_upper.value_or(s.alpha);
  const double cap = (problem.f_is_convex() ? 2.0 : 1.0) / problem.lipschitz();
  if (!(s.lower > 0.0) || s.lower > s.alpha || s.alpha > s.upper) {
    throw InvalidConfig("PGSA step bounds must satisfy 0 < lower <= alpha <= upper");
  }
  if (!(s.upper < cap)) {
    std::ostringstream msg;
    msg << "PGSA step upper bound " << s.upper << " must be below "
        << (problem.f_is_convex() ? "2/L = " : "1/L = ") << cap;
    throw InvalidConfig(msg.str());
  }
  if (config.max_iter < 0 || config.step_tol < 0.0) {
    throw InvalidConfig("max_iter and step_tol must be nonnegative");
  }
  return s;
}

double decrease_coefficient(double alpha, double lipschitz, bool f_is_convex) {
  return f_is_convex ? 1.0 / alpha - 0.5 * lipschitz : 0.5 * (1.0 / alpha - lipschitz);
}

Vector pgsa_step(const FractionalProblem& problem, const Vector& x, double c,
                 const Vector& grad_h, double alpha) {
  const Vector y = problem.subgrad_g(x);
  detail::check_finite(y, "subgrad_g");
  const Vector anchor = x - alpha * grad_h + (alpha * c) * y;
  Vector next = problem.prox_f(alpha, anchor);
  detail::check_finite(next, "prox_f");
  return next;
}

Vector pgsa_step(const FractionalProblem& problem, const Vector& x, double alpha) {
  const ExtendedObjective obj = eval_objective(problem, x);
  if (!obj.in_domain) throw DomainError("pgsa_step called outside dom F");
  const Vector gh = problem.grad_h(x);
  detail::check_finite(gh, "grad_h");
  return pgsa_step(problem, x, obj.value, gh, alpha);
}

namespace detail {

bool step_converged(double step_norm, const Vector& next, double tol, bool relative) {
  if (!relative) return step_norm <= tol;
  const double scale = next.norm();
  return scale > 0.0 ? step_norm / scale <= tol : step_norm == 0.0;
}

void report_invariant(bool strict, long k, const char* what, double excess) {
  std::ostringstream msg;
  msg << what << " violated at iteration " << k << " by " << excess;
  if (strict) throw InvariantViolation(msg.str());
  std::cerr << "warning: " << msg.str() << '\n';
}

}  // namespace detail

SolverTrace run_pgsa(const FractionalProblem& problem, const Vector& x0, const PgsaConfig& config) {
  const ResolvedSteps steps = resolve_steps(problem, config);
  const double lipschitz = problem.lipschitz();
  const auto start = std::chrono::steady_clock::now();

  ExtendedObjective obj = eval_objective(problem, x0);
  if (!obj.in_domain) throw DomainError("PGSA start point is outside dom F");

  SolverTrace trace;
  Vector x = x0;
  auto record = [&](long k, double alpha, double step_norm) {
    if (config.record_trace) {
      trace.records.push_back({k, obj.value, obj.value, alpha, step_norm, obj.denominator, 0});
    }
    if (config.record_iterates) trace.iterates.push_back(x);
  };
  record(0, 0.0, 0.0);

  StopReason reason = StopReason::max_iter;
  long k = 0;
  while (k < config.max_iter) {
    const Vector gh = problem.grad_h(x);
    detail::check_finite(gh, "grad_h");
    Vector next = pgsa_step(problem, x, obj.value, gh, steps.alpha);
    const ExtendedObjective next_obj = eval_objective(problem, next);
    if (!next_obj.in_domain) {
      reason = StopReason::domain_error;
      break;
    }
    const double step_norm = (next - x).norm();
    const double kappa = decrease_coefficient(steps.alpha, lipschitz, problem.f_is_convex());
    const double lhs = next_obj.value + kappa / next_obj.denominator * step_norm * step_norm;
    const double rhs = obj.value + 1e-10 * (1.0 + obj.value);
    if (lhs > rhs) {
      detail::report_invariant(config.strict_invariants, k + 1, "sufficient decrease", lhs - rhs);
    }

    x = std::move(next);
    obj = next_obj;
    ++k;
    record(k, steps.alpha, step_norm);
    if (detail::step_converged(step_norm, x, config.step_tol, config.relative_step)) {
      reason = StopReason::step_tol;
      break;
    }
  }

  trace.final_point = x;
  trace.certificate.objective = obj.value;
  trace.certificate.iterations = k;
  trace.certificate.converged_reason = reason;
  trace.certificate.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  trace.certificate.criticality_residual = problem.critical_residual(x);
  return trace;
}

}  // namespace fracmin
