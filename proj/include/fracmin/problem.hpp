#pragma once

#include <string_view>

#include "fracmin/common.hpp"

namespace fracmin {

/// Single-ratio fractional problem
///
///     minimize  F(x) = (f(x) + h(x)) / g(x)
///
/// with f proper lsc (possibly nonconvex, +inf outside its domain), h
/// L-smooth, g convex and finite. Implementations are immutable after
/// construction; every method is a pure function of its arguments, so a
/// problem may be shared between threads.
///
/// Standing assumptions the solvers rely on: f + h >= 0 on dom f, and g > 0
/// on dom f minus the zero set of g.
class FractionalProblem {
 public:
  virtual ~FractionalProblem() = default;

  virtual Index dimension() const = 0;

  /// f(x), +inf outside dom f.
  virtual double eval_f(const Vector& x) const = 0;
  virtual double eval_h(const Vector& x) const = 0;
  virtual Vector grad_h(const Vector& x) const = 0;
  /// Lipschitz constant of grad h.
  virtual double lipschitz() const = 0;
  virtual double eval_g(const Vector& x) const = 0;
  /// One element of the subdifferential of g at x.
  virtual Vector subgrad_g(const Vector& x) const = 0;
  /// A minimizer of f(y) + |y - z|^2 / (2 alpha). When the prox is
  /// set-valued each problem documents its deterministic selection.
  virtual Vector prox_f(double alpha, const Vector& z) const = 0;
  virtual bool f_is_convex() const = 0;

  /// Upper bound on g over the level set {F <= F(x0)} for any admissible
  /// start. Used by the line-search step-size floor.
  virtual double denominator_bound() const = 0;

  /// Problem-specific distance of 0 to the critical-point inclusion
  ///   0 in df(x) + grad h(x) - F(x) dg(x).
  virtual double critical_residual(const Vector& x) const = 0;

  virtual std::string_view name() const = 0;
};

/// Extended-valued objective at a point, with its two halves kept so that
/// solvers can reuse them.
struct ExtendedObjective {
  double value = kInfinity;
  bool in_domain = false;
  double numerator = kInfinity;
  double denominator = 0.0;
};

/// g(x) is treated as zero below this threshold.
double domain_eps(double numerator);

ExtendedObjective eval_objective(const FractionalProblem& problem, const Vector& x);

/// |g(x) (v + grad h(x)) - (f + h)(x) grad g(x)|_2 / g(x)^2, the Frechet
/// quotient-rule residual for a candidate v in the subdifferential of f.
/// Requires g differentiable at x; subgrad_g supplies the gradient.
double quotient_frechet_residual(const FractionalProblem& problem, const Vector& x,
                                 const Vector& candidate_subgrad_f);

/// Same quantity through the reduced form g(x)^-1 |v + grad h - F grad g|_2.
double quotient_frechet_residual_reduced(const FractionalProblem& problem, const Vector& x,
                                         const Vector& candidate_subgrad_f);

/// True iff the problem's own criticality residual at x is <= tol.
bool critical_point_check(const FractionalProblem& problem, const Vector& x, double tol);

enum class StopReason { step_tol, max_iter, domain_error };

std::string_view to_string(StopReason reason);

struct Certificate {
  double objective = kInfinity;
  double criticality_residual = kInfinity;
  std::string_view residual_norm = "l2";
  long iterations = 0;
  StopReason converged_reason = StopReason::max_iter;
  double wall_time_seconds = 0.0;
};

namespace detail {

// Rejects NaN coming back from a user callback.
double checked(double value, std::string_view what);
void check_finite(const Vector& v, std::string_view what);

}  // namespace detail

}  // namespace fracmin
