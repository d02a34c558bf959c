#include "fracmin/l1l2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "fracmin/linalg.hpp"
#include "fracmin/random.hpp"

namespace fracmin {

namespace {

void check_box(const Vector& lower, const Vector& upper, Index n) {
  if (lower.size() != n || upper.size() != n) throw DimensionMismatch("box bounds have wrong dimension");
  for (Index j = 0; j < n; ++j) {
    if (!(lower[j] <= upper[j])) throw InvalidConfig("invalid box: lower bound exceeds upper bound");
  }
}

double gram_top_eigenvalue(const Matrix& a) {
  return top_eigenvalue([&a](const Vector& v) -> Vector { return a.transpose() * (a * v); },
                        a.cols());
}

}  // namespace

L1L2PenaltyProblem::L1L2PenaltyProblem(Matrix a, Vector b, double lambda, Vector lower, Vector upper)
    : a_(std::move(a)), b_(std::move(b)), lambda_(lambda), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (a_.rows() != b_.size()) throw DimensionMismatch("observation length differs from rows of A");
  if (a_.cols() == 0) throw DimensionMismatch("sensing matrix has no columns");
  if (!(lambda_ > 0.0)) throw InvalidConfig("penalty lambda must be positive");
  check_box(lower_, upper_, a_.cols());
  if ((lower_.array() > 0.0).any() || (upper_.array() < 0.0).any()) {
    throw InvalidConfig("invalid box: the closed-form prox needs 0 inside every [lower_j, upper_j]");
  }
  lipschitz_ = gram_top_eigenvalue(a_);
  if (!(lipschitz_ > 0.0)) throw InvalidConfig("sensing matrix must be nonzero");
}

L1L2PenaltyProblem::L1L2PenaltyProblem(Matrix a, Vector b, double lambda)
    : L1L2PenaltyProblem(a, std::move(b), lambda, Vector::Constant(a.cols(), -1.0),
                         Vector::Constant(a.cols(), 1.0)) {}

double L1L2PenaltyProblem::eval_f(const Vector& x) const {
  if ((x.array() < lower_.array()).any() || (x.array() > upper_.array()).any()) return kInfinity;
  return lambda_ * x.lpNorm<1>();
}

double L1L2PenaltyProblem::eval_h(const Vector& x) const { return 0.5 * (a_ * x - b_).squaredNorm(); }

Vector L1L2PenaltyProblem::grad_h(const Vector& x) const { return a_.transpose() * (a_ * x - b_); }

double L1L2PenaltyProblem::eval_g(const Vector& x) const { return x.norm(); }

Vector L1L2PenaltyProblem::subgrad_g(const Vector& x) const { return l2_subgradient(x); }

Vector L1L2PenaltyProblem::prox_f(double alpha, const Vector& z) const {
  return prox_l1_box(z, alpha * lambda_, lower_, upper_);
}

double L1L2PenaltyProblem::denominator_bound() const {
  return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs()).norm();
}

double L1L2PenaltyProblem::critical_residual(const Vector& x) const {
  return l1l2_critical_residual(*this, x);
}

Vector prox_l1_box(const Vector& z, double threshold, const Vector& lower, const Vector& upper) {
  if (!(threshold >= 0.0)) throw InvalidConfig("soft threshold must be nonnegative");
  check_box(lower, upper, z.size());
  Vector out(z.size());
  for (Index j = 0; j < z.size(); ++j) {
    const double shrunk = std::copysign(std::max(0.0, std::abs(z[j]) - threshold), z[j]);
    out[j] = std::clamp(shrunk, lower[j], upper[j]);
  }
  return out;
}

Vector l2_subgradient(const Vector& x) {
  const double norm = x.norm();
  if (norm > domain_eps(0.0)) return x / norm;
  return Vector::Zero(x.size());
}

double l1l2_critical_residual(const L1L2PenaltyProblem& problem, const Vector& x) {
  const ExtendedObjective obj = eval_objective(problem, x);
  if (!obj.in_domain) throw DomainError("l1/l2 residual requested outside the box or at the origin");
  const Vector u = obj.value * (x / x.norm()) - problem.grad_h(x);
  const double lambda = problem.lambda();

  double total = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    const double lo_bound = problem.lower()[j];
    const double hi_bound = problem.upper()[j];
    // lambda * d|x_j|
    double lo = x[j] > 0.0 ? lambda : -lambda;
    double hi = x[j] < 0.0 ? -lambda : lambda;
    // + normal cone of [lo_bound, hi_bound] at x_j
    if (x[j] == hi_bound) hi = kInfinity;
    if (x[j] == lo_bound) lo = -kInfinity;
    const double dist = std::max({lo - u[j], 0.0, u[j] - hi});
    total += dist * dist;
  }
  return std::sqrt(total);
}

Matrix gen_dct_matrix(Index m, Index n, double coherence, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidConfig("DCT matrix needs m, n >= 1");
  if (!(coherence > 0.0)) throw InvalidConfig("DCT coherence parameter F must be positive");
  SplitMix64 rng(seed);
  Vector w(m);
  for (Index i = 0; i < m; ++i) w[i] = rng.uniform();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j) {
    const double freq = 2.0 * std::numbers::pi * static_cast<double>(j + 1) / coherence;
    for (Index i = 0; i < m; ++i) a(i, j) = scale * std::cos(freq * w[i]);
  }
  return a;
}

Vector gen_ground_truth(Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k > n) throw InvalidConfig("ground truth needs 1 <= K <= n");
  SplitMix64 rng(seed);
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) {
    double v = rng.gaussian();
    while (v == 0.0) v = rng.gaussian();
    x[pool[static_cast<std::size_t>(i)]] = v;
  }
  return x / x.norm();
}

Vector l1_box_initializer(const Matrix& a, const Vector& b, const Vector& lower, const Vector& upper,
                          int iterations) {
  if (a.rows() != b.size()) throw DimensionMismatch("observation length differs from rows of A");
  check_box(lower, upper, a.cols());
  if (iterations < 0) throw InvalidConfig("initializer iteration count must be >= 0");
  const Vector atb = a.transpose() * b;
  const double mu_target = 1e-6 * atb.lpNorm<Eigen::Infinity>();
  const double mu_start = 0.1 * atb.lpNorm<Eigen::Infinity>();
  const double lipschitz = gram_top_eigenvalue(a);
  Vector x = Vector::Zero(a.cols());
  if (lipschitz > 0.0 && mu_start > 0.0) {
    const double step = 1.0 / lipschitz;
    Vector y = x;
    double theta = 1.0;
    for (int stage = 0; stage < kInitializerStages; ++stage) {
      const double mu =
          mu_start * std::pow(mu_target / mu_start, static_cast<double>(stage) / (kInitializerStages - 1));
      const long begin = static_cast<long>(iterations) * stage / kInitializerStages;
      const long end = static_cast<long>(iterations) * (stage + 1) / kInitializerStages;
      for (long it = begin; it < end; ++it) {
        const Vector next = prox_l1_box(y - step * (a.transpose() * (a * y - b)), step * mu, lower, upper);
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        y = next + ((theta - 1.0) / theta_next) * (next - x);
        theta = theta_next;
        x = next;
      }
    }
  }
  if (x.norm() <= domain_eps(0.0)) throw DegenerateInput("l1 initializer returned the zero vector");
  return x;
}

Vector l1_box_initial_point(const Matrix& a, const Vector& b, const Vector& lower,
                            const Vector& upper, int iterations) {
  try {
    return l1_box_initializer(a, b, lower, upper, iterations);
  } catch (const DegenerateInput&) {
    const Vector atb = a.transpose() * b;
    const double norm = atb.norm();
    if (norm <= domain_eps(0.0)) throw;
    Vector fallback = (atb / norm).cwiseMax(lower).cwiseMin(upper);
    if (fallback.norm() <= domain_eps(0.0)) throw;
    return fallback;
  }
}

RecoveryReport make_recovery_report(const Vector& recovered, const Vector& truth,
                                    double time_seconds, long iterations) {
  if (recovered.size() != truth.size()) throw DimensionMismatch("recovered signal has wrong length");
  RecoveryReport report;
  report.relative_error = (recovered - truth).norm() / truth.norm();
  report.success = report.relative_error < kRecoverySuccessThreshold;
  const double norm = recovered.norm();
  report.l1_over_l2 = norm > 0.0 ? recovered.lpNorm<1>() / norm : kInfinity;
  report.time_seconds = time_seconds;
  report.iterations = iterations;
  return report;
}

}  // namespace fracmin
