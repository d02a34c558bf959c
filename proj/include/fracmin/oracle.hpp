#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fracmin/line_search.hpp"
#include "fracmin/pgsa.hpp"
#include "fracmin/problem.hpp"
#include "fracmin/trace.hpp"

namespace fracmin {

/// max_i |central difference_i - grad_i| / (1 + |grad_i|), with the central
/// difference taken at step * (1 + |x|_inf).
double fd_gradient_check(const std::function<double(const Vector&)>& value,
                         const std::function<Vector(const Vector&)>& gradient, const Vector& x,
                         double step = 1e-5);

enum class SolverMode { pgsa, pgsa_ml, pgsa_nl };

std::string_view to_string(SolverMode mode);
SolverMode parse_solver_mode(std::string_view text);

/// Everything the auditor needs to re-derive the per-iteration guarantees.
struct AuditSpec {
  SolverMode mode = SolverMode::pgsa;
  double lipschitz = 0.0;
  bool f_is_convex = false;
  /// sup of g over the level set (line-search step floor).
  double denominator_bound = 0.0;
  // PGSA
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
  // line search
  double a = 1e-3;
  double eta = 0.5;
  int memory = 0;
  double rel_tol = 1e-10;
};

AuditSpec make_audit_spec(const FractionalProblem& problem, const PgsaConfig& config);
AuditSpec make_audit_spec(const FractionalProblem& problem, const LineSearchConfig& config);

struct Violation {
  long iteration = 0;
  std::string kind;
  double magnitude = 0.0;
};

struct AuditReport {
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
};

/// Step-size floor eta / (a M + L) guaranteed for accepted line-search steps.
double line_search_step_floor(const AuditSpec& spec);
/// Cap ceil(-log(alpha_upper (a M + L)) / log(eta) + 1) on backtracks per iteration.
int line_search_backtrack_cap(const AuditSpec& spec);

/// Re-checks every recorded iteration: domain membership, step bounds,
/// sufficient decrease (PGSA) or the windowed acceptance test, step floor,
/// backtrack cap, level-set confinement and, for N > 0, nonincreasing
/// window maxima. Violations are returned, never thrown.
AuditReport audit_trace(const SolverTrace& trace, const AuditSpec& spec);

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // exclusive
};

inline constexpr std::size_t kRateFitMinLength = 30;
inline constexpr std::size_t kRateFitTailExclusion = 5;

/// Least squares of ln e_k on k over the last two thirds of the sequence,
/// dropping its final five entries. Zero errors are skipped. Throws
/// InsufficientData for fewer than 30 entries or a degenerate window.
RateFit fit_linear_rate(std::span<const double> errors);

/// Rate of |x^k - x_final|_2 over the trace's recorded iterates.
RateFit fit_linear_rate(const SolverTrace& trace);

}  // namespace fracmin
