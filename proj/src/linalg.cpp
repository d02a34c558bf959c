#include "fracmin/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fracmin {

double top_eigenvalue(const LinearOperator& op, Index dimension,
                      const PowerIterationOptions& options) {
  if (dimension <= 0) throw DimensionMismatch("power iteration on an empty operator");
  Vector v(dimension);
  for (Index i = 0; i < dimension; ++i) {
    v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(dimension);
  }
  v.normalize();

  double previous = 0.0;
  for (int it = 0; it < options.max_iter; ++it) {
    Vector w = op(v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(rayleigh - previous) <= options.rel_tol * std::abs(rayleigh)) {
      return rayleigh;
    }
    previous = rayleigh;
  }
  throw NonConvergence("power iteration did not reach relative tolerance in " +
                       std::to_string(options.max_iter) + " iterations");
}

double matrix_two_norm(const Matrix& m, const PowerIterationOptions& options) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix_two_norm needs a square matrix");
  return top_eigenvalue([&m](const Vector& v) -> Vector { return m * v; }, m.rows(), options);
}

double smallest_eigenvalue_estimate(const Matrix& m, int steps) {
  const Index n = m.rows();
  if (n == 0) throw DimensionMismatch("empty matrix");
  const Index k_max = std::min<Index>(n, std::max(steps, 1));

  Matrix basis(n, k_max);
  std::vector<double> diag;
  std::vector<double> off;
  Vector q = Vector::Ones(n);
  for (Index i = 0; i < n; ++i) q[i] += 0.5 * static_cast<double>(i % 7) / 7.0;
  q.normalize();

  for (Index k = 0; k < k_max; ++k) {
    basis.col(k) = q;
    Vector w = m * q;
    diag.push_back(q.dot(w));
    // Full reorthogonalization, applied twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    }
    const double beta = w.norm();
    if (k + 1 == k_max || beta <= 1e-13 * (1.0 + std::abs(diag.back()))) break;
    off.push_back(beta);
    q = w / beta;
  }

  const Index size = static_cast<Index>(diag.size());
  Matrix tri = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) tri(i, i) = diag[i];
  for (Index i = 0; i + 1 < size; ++i) tri(i, i + 1) = tri(i + 1, i) = off[i];
  Eigen::SelfAdjointEigenSolver<Matrix> solver(tri, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("asymmetry of a non-square matrix");
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / (1.0 + m.cwiseAbs().maxCoeff());
}

}  // namespace fracmin
