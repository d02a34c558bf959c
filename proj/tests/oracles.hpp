#pragma once

// Reference computations used only by the tests. They avoid the library's own
// code paths (and Eigen's solvers) so that agreement is evidence of correctness.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fracmin/common.hpp"
#include "fracmin/random.hpp"

namespace oracle {

using fracmin::Index;
using fracmin::Matrix;
using fracmin::Vector;

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix by
/// cyclic Jacobi rotations.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

inline EigenDecomposition jacobi_eigen(Matrix a, int max_sweeps = 100) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * (1.0 + a.squaredNorm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Smallest generalized eigenpair of (B, A) for A positive definite, through
/// A^{-1/2} B A^{-1/2} built from A's Jacobi decomposition.
inline std::pair<double, Vector> smallest_generalized(const Matrix& b, const Matrix& a) {
  const EigenDecomposition ea = jacobi_eigen(a);
  const Matrix inv_sqrt = ea.vectors * ea.values.cwiseSqrt().cwiseInverse().asDiagonal() * ea.vectors.transpose();
  Matrix c = inv_sqrt * b * inv_sqrt;
  c = 0.5 * (c + c.transpose());
  const EigenDecomposition ec = jacobi_eigen(c);
  Vector x = inv_sqrt * ec.vectors.col(0);
  return {ec.values(0), x / x.norm()};
}

/// Minimizer of phi over an equally spaced grid on [lo, hi].
inline double grid_argmin(const std::function<double(double)>& phi, double lo, double hi, double spacing) {
  double best = lo, best_value = phi(lo);
  const long steps = static_cast<long>(std::round((hi - lo) / spacing));
  for (long i = 1; i <= steps; ++i) {
    const double t = lo + spacing * static_cast<double>(i);
    const double value = phi(t);
    if (value < best_value) {
      best_value = value;
      best = t;
    }
  }
  return best;
}

/// Distance from x to the sparse unit sphere {|y|_0 <= r, |y| = 1} by trying
/// every support of size r and normalizing x restricted to it.
inline double distance_to_sparse_sphere(const Vector& x, int r) {
  const Index n = x.size();
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  std::fill(mask.begin(), mask.begin() + r, true);
  double best = std::numeric_limits<double>::infinity();
  do {
    Vector y = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (mask[static_cast<std::size_t>(i)]) y(i) = x(i);
    if (y.norm() > 0.0) best = std::min(best, (x - y / y.norm()).norm());
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

inline Vector gaussian_vector(Index n, fracmin::SplitMix64& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

inline Matrix gaussian_matrix(Index rows, Index cols, fracmin::SplitMix64& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
  return m;
}

/// G^T G / rows, positive definite almost surely when rows >= n.
inline Matrix random_psd(Index n, Index rows, fracmin::SplitMix64& rng) {
  const Matrix g = gaussian_matrix(rows, n, rng);
  Matrix m = g.transpose() * g / static_cast<double>(rows);
  return 0.5 * (m + m.transpose());
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fracmin_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
