#include "fracmin/problem.hpp"

#include <cmath>
#include <string>

namespace fracmin {

namespace detail {

double checked(double value, std::string_view what) {
  if (std::isnan(value)) {
    throw NumericalError(std::string(what) + " returned NaN");
  }
  return value;
}

void check_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw NumericalError(std::string(what) + " returned a non-finite vector");
  }
}

}  // namespace detail

double domain_eps(double numerator) { return 1e-14 * (1.0 + std::abs(numerator)); }

ExtendedObjective eval_objective(const FractionalProblem& problem, const Vector& x) {
  if (x.size() != problem.dimension()) {
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", problem has " +
                            std::to_string(problem.dimension()));
  }
  ExtendedObjective out;
  const double f = detail::checked(problem.eval_f(x), "eval_f");
  const double h = detail::checked(problem.eval_h(x), "eval_h");
  const double g = detail::checked(problem.eval_g(x), "eval_g");
  out.numerator = f + h;
  out.denominator = g;
  out.in_domain = std::isfinite(f) && g > domain_eps(out.numerator);
  out.value = out.in_domain ? out.numerator / out.denominator : kInfinity;
  return out;
}

namespace {

struct QuotientParts {
  ExtendedObjective objective;
  Vector grad_h;
  Vector grad_g;
};

QuotientParts quotient_parts(const FractionalProblem& problem, const Vector& x,
                             const Vector& candidate) {
  QuotientParts parts{eval_objective(problem, x), problem.grad_h(x), problem.subgrad_g(x)};
  if (!parts.objective.in_domain) {
    throw DomainError("quotient residual requested outside dom F");
  }
  if (candidate.size() != x.size()) {
    throw DimensionMismatch("subgradient candidate has the wrong dimension");
  }
  return parts;
}

}  // namespace

double quotient_frechet_residual(const FractionalProblem& problem, const Vector& x,
                                 const Vector& candidate_subgrad_f) {
  const QuotientParts p = quotient_parts(problem, x, candidate_subgrad_f);
  const double g = p.objective.denominator;
  const Vector top = g * (candidate_subgrad_f + p.grad_h) - p.objective.numerator * p.grad_g;
  return top.norm() / (g * g);
}

double quotient_frechet_residual_reduced(const FractionalProblem& problem, const Vector& x,
                                         const Vector& candidate_subgrad_f) {
  const QuotientParts p = quotient_parts(problem, x, candidate_subgrad_f);
  return (candidate_subgrad_f + p.grad_h - p.objective.value * p.grad_g).norm() /
         p.objective.denominator;
}

bool critical_point_check(const FractionalProblem& problem, const Vector& x, double tol) {
  return problem.critical_residual(x) <= tol;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::step_tol:
      return "step_tol";
    case StopReason::max_iter:
      return "max_iter";
    case StopReason::domain_error:
      return "domain_error";
  }
  return "unknown";
}

}  // namespace fracmin
