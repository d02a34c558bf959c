#include "fracmin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fracmin {

double fd_gradient_check(const std::function<double(const Vector&)>& value,
                         const std::function<Vector(const Vector&)>& gradient, const Vector& x,
                         double step) {
  if (!(step > 0.0)) throw InvalidConfig("finite-difference step must be positive");
  const double h = step * (1.0 + x.lpNorm<Eigen::Infinity>());
  const Vector analytic = gradient(x);
  double worst = 0.0;
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = value(probe);
    probe[i] = x[i] - h;
    const double down = value(probe);
    probe[i] = x[i];
    const double central = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(central - analytic[i]) / (1.0 + std::abs(analytic[i])));
  }
  return worst;
}

std::string_view to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::pgsa:
      return "pgsa";
    case SolverMode::pgsa_ml:
      return "pgsa_ml";
    case SolverMode::pgsa_nl:
      return "pgsa_nl";
  }
  return "unknown";
}

SolverMode parse_solver_mode(std::string_view text) {
  if (text == "pgsa") return SolverMode::pgsa;
  if (text == "pgsa_ml") return SolverMode::pgsa_ml;
  if (text == "pgsa_nl") return SolverMode::pgsa_nl;
  throw InvalidConfig("unknown solver '" + std::string(text) + "' (expected pgsa, pgsa_ml or pgsa_nl)");
}

AuditSpec make_audit_spec(const FractionalProblem& problem, const PgsaConfig& config) {
  const ResolvedSteps steps = resolve_steps(problem, config);
  AuditSpec spec;
  spec.mode = SolverMode::pgsa;
  spec.lipschitz = problem.lipschitz();
  spec.f_is_convex = problem.f_is_convex();
  spec.denominator_bound = problem.denominator_bound();
  spec.alpha_lower = steps.lower;
  spec.alpha_upper = steps.upper;
  return spec;
}

AuditSpec make_audit_spec(const FractionalProblem& problem, const LineSearchConfig& config) {
  const ResolvedLineSearch steps = resolve_line_search(problem, config);
  AuditSpec spec;
  spec.mode = config.memory == 0 ? SolverMode::pgsa_ml : SolverMode::pgsa_nl;
  spec.lipschitz = problem.lipschitz();
  spec.f_is_convex = problem.f_is_convex();
  spec.denominator_bound = problem.denominator_bound();
  spec.alpha_lower = steps.lower;
  spec.alpha_upper = steps.upper;
  spec.a = config.a;
  spec.eta = config.eta;
  spec.memory = config.memory;
  return spec;
}

double line_search_step_floor(const AuditSpec& spec) {
  return spec.eta / (spec.a * spec.denominator_bound + spec.lipschitz);
}

int line_search_backtrack_cap(const AuditSpec& spec) {
  const double ratio = -std::log(spec.alpha_upper * (spec.a * spec.denominator_bound + spec.lipschitz)) /
                       std::log(spec.eta);
  return static_cast<int>(std::ceil(ratio + 1.0));
}

namespace {

void audit_pgsa(const std::vector<IterationRecord>& recs, const AuditSpec& spec,
                std::vector<Violation>& out) {
  const double cap = (spec.f_is_convex ? 2.0 : 1.0) / spec.lipschitz;
  if (!(spec.alpha_upper < cap)) out.push_back({0, "step_upper_bound_cap", spec.alpha_upper - cap});
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const IterationRecord& prev = recs[i - 1];
    const IterationRecord& cur = recs[i];
    if (cur.alpha < spec.alpha_lower || cur.alpha > spec.alpha_upper) {
      out.push_back({cur.k, "step_bounds", cur.alpha});
    }
    const double kappa = decrease_coefficient(cur.alpha, spec.lipschitz, spec.f_is_convex);
    const double lhs = cur.objective + kappa / cur.denominator * cur.step_norm * cur.step_norm;
    const double rhs = prev.objective + spec.rel_tol * (1.0 + std::abs(prev.objective));
    if (lhs > rhs) out.push_back({cur.k, "sufficient_decrease", lhs - rhs});
    if (cur.objective > prev.objective + 1e-12) {
      out.push_back({cur.k, "monotonicity", cur.objective - prev.objective});
    }
  }
}

void audit_line_search(const std::vector<IterationRecord>& recs, const AuditSpec& spec,
                       std::vector<Violation>& out) {
  const double floor = line_search_step_floor(spec) - 1e-12;
  const int backtrack_cap = line_search_backtrack_cap(spec);
  const std::size_t width = static_cast<std::size_t>(spec.memory) + 1;
  const double start = recs.front().objective;
  const double level_slack = spec.rel_tol * (1.0 + std::abs(start));

  std::deque<double> window{start};
  double previous_max = start;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const IterationRecord& cur = recs[i];
    const double window_max = *std::max_element(window.begin(), window.end());
    const double bound = window_max - 0.5 * spec.a * cur.step_norm * cur.step_norm;
    const double slack = spec.rel_tol * (1.0 + std::abs(window_max));
    if (cur.objective > bound + slack) out.push_back({cur.k, "acceptance", cur.objective - bound});
    if (cur.alpha < floor) out.push_back({cur.k, "step_floor", floor - cur.alpha});
    if (cur.alpha > spec.alpha_upper) out.push_back({cur.k, "step_upper_bound", cur.alpha - spec.alpha_upper});
    if (cur.backtracks > backtrack_cap) {
      out.push_back({cur.k, "backtrack_cap", static_cast<double>(cur.backtracks - backtrack_cap)});
    }
    if (cur.objective > start + level_slack) out.push_back({cur.k, "level_set", cur.objective - start});

    window.push_back(cur.objective);
    if (window.size() > width) window.pop_front();
    const double new_max = *std::max_element(window.begin(), window.end());
    if (new_max > previous_max + slack) out.push_back({cur.k, "window_max", new_max - previous_max});
    previous_max = new_max;
  }
}

}  // namespace

AuditReport audit_trace(const SolverTrace& trace, const AuditSpec& spec) {
  AuditReport report;
  const auto& recs = trace.records;
  for (const IterationRecord& rec : recs) {
    if (!std::isfinite(rec.objective) || !(rec.denominator > 0.0)) {
      report.violations.push_back({rec.k, "domain", rec.objective});
    }
    if (rec.c != rec.objective) report.violations.push_back({rec.k, "cached_ratio", std::abs(rec.c - rec.objective)});
  }
  if (recs.empty()) return report;
  if (spec.mode == SolverMode::pgsa) {
    audit_pgsa(recs, spec, report.violations);
  } else {
    audit_line_search(recs, spec, report.violations);
  }
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.iteration < b.iteration; });
  return report;
}

RateFit fit_linear_rate(std::span<const double> errors) {
  const std::size_t len = errors.size();
  if (len < kRateFitMinLength) {
    throw InsufficientData("rate fit needs at least " + std::to_string(kRateFitMinLength) +
                           " iterates, got " + std::to_string(len));
  }
  RateFit fit;
  fit.window_begin = len / 3;
  fit.window_end = len - kRateFitTailExclusion;

  double n = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double lowest = kInfinity;
  double highest = -kInfinity;
  for (std::size_t k = fit.window_begin; k < fit.window_end; ++k) {
    if (!(errors[k] > 0.0)) continue;
    lowest = std::min(lowest, errors[k]);
    highest = std::max(highest, errors[k]);
    n += 1.0;
    sx += static_cast<double>(k);
    sy += std::log(errors[k]);
  }
  if (n < 3.0) throw InsufficientData("rate fit window has fewer than three nonzero errors");
  if (lowest == highest) throw InsufficientData("rate fit on a constant error sequence");
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = fit.window_begin; k < fit.window_end; ++k) {
    if (!(errors[k] > 0.0)) continue;
    const double dx = static_cast<double>(k) - mx;
    const double dy = std::log(errors[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy == 0.0) throw InsufficientData("rate fit on a constant error sequence");
  fit.slope = sxy / sxx;
  fit.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

RateFit fit_linear_rate(const SolverTrace& trace) {
  const std::vector<double> errors = trace.errors_to_final();
  return fit_linear_rate(std::span<const double>(errors));
}

}  // namespace fracmin
