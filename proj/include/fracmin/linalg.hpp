#pragma once

#include <functional>

#include "fracmin/common.hpp"

namespace fracmin {

using LinearOperator = std::function<Vector(const Vector&)>;

struct PowerIterationOptions {
  double rel_tol = 1e-10;
  int max_iter = 5000;
};

/// Largest eigenvalue of a symmetric PSD operator by power iteration,
/// started from the all-ones vector perturbed by index (v_i = 1 + i/n).
/// Stops when the Rayleigh quotient changes by at most rel_tol relative;
/// throws NonConvergence at the cap.
double top_eigenvalue(const LinearOperator& op, Index dimension,
                      const PowerIterationOptions& options = {});

/// |M|_2 = lambda_max(M) for symmetric PSD M.
double matrix_two_norm(const Matrix& m, const PowerIterationOptions& options = {});

/// Smallest eigenvalue estimate of a symmetric matrix from `steps` Lanczos
/// steps with full reorthogonalization. Exact (to rounding) once steps >= n;
/// otherwise a Ritz value, which never undershoots the true minimum.
double smallest_eigenvalue_estimate(const Matrix& m, int steps = 80);

/// max |M - M^T| relative to 1 + max |M|.
double asymmetry(const Matrix& m);

}  // namespace fracmin
