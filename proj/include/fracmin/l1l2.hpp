#pragma once

#include <cstdint>
#include <string_view>

#include "fracmin/problem.hpp"

namespace fracmin {

/// Box-constrained l1/l2 penalty model
///
///     minimize (lambda |x|_1 + |Ax - b|_2^2 / 2) / |x|_2   s.t.  lower <= x <= upper
///
/// with f = lambda |.|_1 + indicator(box) (convex), h = |Ax - b|^2 / 2 and
/// g = |.|_2. The box must contain the origin so the prox has the closed form
/// soft-threshold-then-clip.
class L1L2PenaltyProblem final : public FractionalProblem {
 public:
  L1L2PenaltyProblem(Matrix a, Vector b, double lambda, Vector lower, Vector upper);
  /// Box [-1, 1]^n.
  L1L2PenaltyProblem(Matrix a, Vector b, double lambda);

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  double lambda() const { return lambda_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Index dimension() const override { return a_.cols(); }
  double eval_f(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  Vector grad_h(const Vector& x) const override;
  double lipschitz() const override { return lipschitz_; }
  double eval_g(const Vector& x) const override;
  Vector subgrad_g(const Vector& x) const override;
  Vector prox_f(double alpha, const Vector& z) const override;
  bool f_is_convex() const override { return true; }
  /// sup |x|_2 over the box.
  double denominator_bound() const override;
  double critical_residual(const Vector& x) const override;
  std::string_view name() const override { return "l1l2"; }

 private:
  Matrix a_;
  Vector b_;
  double lambda_;
  Vector lower_;
  Vector upper_;
  double lipschitz_ = 0.0;
};

inline constexpr double kDefaultL1L2Lambda = 8e-5;

/// Soft-threshold z by `threshold`, then clip to [lower, upper].
Vector prox_l1_box(const Vector& z, double threshold, const Vector& lower, const Vector& upper);

/// x / |x|_2, or 0 (an element of the subdifferential at the origin).
Vector l2_subgradient(const Vector& x);

double l1l2_critical_residual(const L1L2PenaltyProblem& problem, const Vector& x);

/// Oversampled DCT sensing matrix: column j (1-based) is
/// cos(2 pi w j / F) / sqrt(m) with w uniform on [0, 1]^m.
Matrix gen_dct_matrix(Index m, Index n, double coherence, std::uint64_t seed);

/// Unit-norm K-sparse signal: uniformly random support, Gaussian entries.
Vector gen_ground_truth(Index n, Index k, std::uint64_t seed);

inline constexpr int kInitializerStages = 10;

/// Approximate minimizer of mu |x|_1 + |Ax - b|^2 / 2 over the box with
/// mu = 1e-6 |A^T b|_inf. FISTA with step 1/|A|_2^2 from 0, run in ten equal
/// stages whose mu decreases geometrically from 0.1 |A^T b|_inf to the target.
/// Throws DegenerateInput when the result is the zero vector.
Vector l1_box_initializer(const Matrix& a, const Vector& b, const Vector& lower,
                          const Vector& upper, int iterations = 2000);

/// Initializer with the documented fallback: A^T b / |A^T b|_2 clipped to the
/// box when the proximal-gradient result is zero.
Vector l1_box_initial_point(const Matrix& a, const Vector& b, const Vector& lower,
                            const Vector& upper, int iterations = 2000);

struct RecoveryReport {
  double relative_error = 0.0;
  bool success = false;
  double l1_over_l2 = 0.0;
  double time_seconds = 0.0;
  long iterations = 0;
};

inline constexpr double kRecoverySuccessThreshold = 1e-3;

RecoveryReport make_recovery_report(const Vector& recovered, const Vector& truth,
                                    double time_seconds, long iterations);

}  // namespace fracmin
