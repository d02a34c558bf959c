#pragma once

#include <optional>
#include <vector>

#include "fracmin/problem.hpp"
#include "fracmin/trace.hpp"

namespace fracmin {

/// PGSA with backtracking on the step. A trial x~ = pgsa_step(x, alpha0 eta^m)
/// is accepted once it lies in dom F and
///
///     F(x~) <= max_{[k-N]+ <= j <= k} c_j - (a/2) |x~ - x^k|^2.
///
/// N = 0 gives the monotone variant, N > 0 the nonmonotone one.
struct LineSearchConfig {
  double a = 1e-3;
  /// Defaults to 0.99/L, or 1.99/L when f is convex.
  std::optional<double> alpha_lower;
  double alpha_upper = 1e8;
  /// First trial step of iteration 0; defaults to alpha_lower.
  std::optional<double> initial_alpha;
  double eta = 0.5;
  int memory = 4;  // N
  long max_iter = 1000;
  double step_tol = 1e-6;
  bool relative_step = false;
  int max_backtracks = 60;
  /// Rounding allowance in the acceptance test, relative to 1 + |max c_j|.
  double acceptance_slack = 1e-12;
  bool record_trace = true;
  bool record_iterates = false;
};

struct ResolvedLineSearch {
  double lower;
  double upper;
  double initial;
};

ResolvedLineSearch resolve_line_search(const FractionalProblem& problem,
                                       const LineSearchConfig& config);

/// Sliding window over the last N+1 accepted objective values.
class ObjectiveWindow {
 public:
  explicit ObjectiveWindow(int memory);

  void push(double c);
  double max() const;
  int memory() const { return memory_; }
  bool empty() const { return count_ == 0; }

 private:
  int memory_;
  std::vector<double> ring_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
};

/// Barzilai-Borwein style first trial step |dx|^2 / |<dx, dh>| clamped to
/// [alpha_lower, alpha_upper]; alpha_upper when <dx, dh> = 0.
double bb_initial_step(const Vector& dx, const Vector& dh, double alpha_lower, double alpha_upper);

struct LineSearchResult {
  Vector point;
  ExtendedObjective objective;
  double alpha = 0.0;
  int backtracks = 0;
};

/// Backtracks from alpha0 until the acceptance test holds. Throws
/// LineSearchFailure after config.max_backtracks reductions.
LineSearchResult line_search_step(const FractionalProblem& problem, const Vector& x,
                                  const ObjectiveWindow& window, double alpha0,
                                  const LineSearchConfig& config);

/// Variant reusing F(x) and grad h(x).
LineSearchResult line_search_step(const FractionalProblem& problem, const Vector& x, double c,
                                  const Vector& grad_h, const ObjectiveWindow& window,
                                  double alpha0, const LineSearchConfig& config);

SolverTrace run_pgsa_ls(const FractionalProblem& problem, const Vector& x0,
                        const LineSearchConfig& config = {});

}  // namespace fracmin
