#include "fracmin/line_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "fracmin/pgsa.hpp"

namespace fracmin {

ResolvedLineSearch resolve_line_search(const FractionalProblem& problem,
                                       const LineSearchConfig& config) {
  ResolvedLineSearch r{};
  r.lower = config.alpha_lower.value_or(default_step(problem));
  r.upper = config.alpha_upper;
  r.initial = config.initial_alpha.value_or(r.lower);
  if (!(config.a > 0.0)) throw InvalidConfig("line search needs a > 0");
  if (!(config.eta > 0.0 && config.eta < 1.0)) throw InvalidConfig("line search needs 0 < eta < 1");
  if (config.memory < 0) throw InvalidConfig("line search memory N must be >= 0");
  if (!(r.lower > 0.0) || r.lower > r.upper) {
    throw InvalidConfig("line search needs 0 < alpha_lower <= alpha_upper");
  }
  if (r.initial < r.lower || r.initial > r.upper) {
    throw InvalidConfig("initial step must lie in [alpha_lower, alpha_upper]");
  }
  if (config.max_backtracks < 0 || config.max_iter < 0 || config.step_tol < 0.0) {
    throw InvalidConfig("max_backtracks, max_iter and step_tol must be nonnegative");
  }
  return r;
}

ObjectiveWindow::ObjectiveWindow(int memory)
    : memory_(memory), ring_(static_cast<std::size_t>(std::max(memory, 0)) + 1, 0.0) {
  if (memory < 0) throw InvalidConfig("window memory must be >= 0");
}

void ObjectiveWindow::push(double c) {
  ring_[next_] = c;
  next_ = (next_ + 1) % ring_.size();
  count_ = std::min(count_ + 1, ring_.size());
}

double ObjectiveWindow::max() const {
  if (count_ == 0) throw InsufficientData("objective window is empty");
  return *std::max_element(ring_.begin(), ring_.begin() + static_cast<std::ptrdiff_t>(count_));
}

double bb_initial_step(const Vector& dx, const Vector& dh, double alpha_lower, double alpha_upper) {
  const double curvature = std::abs(dx.dot(dh));
  if (curvature == 0.0) return alpha_upper;
  return std::clamp(dx.squaredNorm() / curvature, alpha_lower, alpha_upper);
}

LineSearchResult line_search_step(const FractionalProblem& problem, const Vector& x, double c,
                                  const Vector& grad_h, const ObjectiveWindow& window,
                                  double alpha0, const LineSearchConfig& config) {
  const double reference = window.max();
  const double slack = config.acceptance_slack * (1.0 + std::abs(reference));
  double alpha = alpha0;
  for (int m = 0; m <= config.max_backtracks; ++m) {
    Vector trial = pgsa_step(problem, x, c, grad_h, alpha);
    const ExtendedObjective obj = eval_objective(problem, trial);
    if (obj.in_domain) {
      const double dist2 = (trial - x).squaredNorm();
      if (obj.value <= reference - 0.5 * config.a * dist2 + slack) {
        return {std::move(trial), obj, alpha, m};
      }
    }
    alpha *= config.eta;
  }
  throw LineSearchFailure("no acceptable step after " + std::to_string(config.max_backtracks) +
                          " backtracks starting from alpha = " + std::to_string(alpha0));
}

LineSearchResult line_search_step(const FractionalProblem& problem, const Vector& x,
                                  const ObjectiveWindow& window, double alpha0,
                                  const LineSearchConfig& config) {
  const ExtendedObjective obj = eval_objective(problem, x);
  if (!obj.in_domain) throw DomainError("line search started outside dom F");
  const Vector gh = problem.grad_h(x);
  detail::check_finite(gh, "grad_h");
  return line_search_step(problem, x, obj.value, gh, window, alpha0, config);
}

SolverTrace run_pgsa_ls(const FractionalProblem& problem, const Vector& x0,
                        const LineSearchConfig& config) {
  const ResolvedLineSearch steps = resolve_line_search(problem, config);
  const auto start = std::chrono::steady_clock::now();

  ExtendedObjective obj = eval_objective(problem, x0);
  if (!obj.in_domain) throw DomainError("PGSA line-search start point is outside dom F");

  SolverTrace trace;
  ObjectiveWindow window(config.memory);
  window.push(obj.value);

  Vector x = x0;
  Vector previous_x;
  Vector previous_grad;
  auto record = [&](long k, double alpha, double step_norm, int backtracks) {
    if (config.record_trace) {
      trace.records.push_back(
          {k, obj.value, obj.value, alpha, step_norm, obj.denominator, backtracks});
    }
    if (config.record_iterates) trace.iterates.push_back(x);
  };
  record(0, 0.0, 0.0, 0);

  StopReason reason = StopReason::max_iter;
  long k = 0;
  while (k < config.max_iter) {
    Vector gh = problem.grad_h(x);
    detail::check_finite(gh, "grad_h");
    const double alpha0 = k == 0 ? steps.initial
                                 : bb_initial_step(x - previous_x, gh - previous_grad,
                                                   steps.lower, steps.upper);
    LineSearchResult accepted = line_search_step(problem, x, obj.value, gh, window, alpha0, config);
    const double step_norm = (accepted.point - x).norm();

    previous_x = std::move(x);
    previous_grad = std::move(gh);
    x = std::move(accepted.point);
    obj = accepted.objective;
    window.push(obj.value);
    ++k;
    record(k, accepted.alpha, step_norm, accepted.backtracks);
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
