#pragma once

#include <optional>

#include "fracmin/problem.hpp"
#include "fracmin/trace.hpp"

namespace fracmin {

/// Fixed-step proximity-gradient-subgradient iteration
///
///     c_k     = F(x^k)
///     x^{k+1} = prox_{alpha f}(x^k - alpha grad h(x^k) + alpha c_k y),  y in dg(x^k)
///
/// The step must stay below 1/L, or below 2/L when f is convex.
struct PgsaConfig {
  /// Constant step. Defaults to 0.99/L, or 1.99/L when f is convex.
  std::optional<double> alpha;
  /// Bounds of the admissible schedule; both default to the step itself.
  std::optional<double> alpha_lower;
  std::optional<double> alpha_upper;
  long max_iter = 1000;
  double step_tol = 1e-6;
  /// Stop on |x^{k+1} - x^k| / |x^{k+1}| instead of the absolute change.
  bool relative_step = false;
  bool record_trace = true;
  bool record_iterates = false;
  /// Throw InvariantViolation when the sufficient-decrease inequality fails
  /// instead of logging a warning.
  bool strict_invariants = false;
};

struct ResolvedSteps {
  double alpha;
  double lower;
  double upper;
};

/// Fills defaults and checks 0 < lower <= alpha <= upper < 1/L (2/L for convex f).
ResolvedSteps resolve_steps(const FractionalProblem& problem, const PgsaConfig& config);

/// Default constant step for the problem: 0.99/L, or 1.99/L for convex f.
double default_step(const FractionalProblem& problem);

/// Coefficient kappa with F(x^{k+1}) + kappa/g(x^{k+1}) |dx|^2 <= F(x^k):
/// (1/alpha - L)/2 in general, 1/alpha - L/2 when f is convex.
double decrease_coefficient(double alpha, double lipschitz, bool f_is_convex);

/// One PGSA update from x, which must lie in dom F.
Vector pgsa_step(const FractionalProblem& problem, const Vector& x, double alpha);

/// Same update with F(x) and grad h(x) already known.
Vector pgsa_step(const FractionalProblem& problem, const Vector& x, double c,
                 const Vector& grad_h, double alpha);

SolverTrace run_pgsa(const FractionalProblem& problem, const Vector& x0,
                     const PgsaConfig& config = {});

namespace detail {

bool step_converged(double step_norm, const Vector& next, double tol, bool relative);

// Logs or throws depending on `strict`.
void report_invariant(bool strict, long k, const char* what, double excess);

}  // namespace detail

}  // namespace fracmin
