#include "fracmin/sgep.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fracmin/linalg.hpp"
#include "fracmin/random.hpp"

namespace fracmin {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kUnitNormTol = 1e-10;
constexpr double kSupportThreshold = 1e-12;

// min(cap, n choose k) without overflow.
long long capped_binomial(long long n, long long k, long long cap) {
  k = std::min(k, n - k);
  long double value = 1.0L;
  for (long long i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (value >= static_cast<long double>(cap)) return cap;
  }
  return static_cast<long long>(std::llround(static_cast<double>(value)));
}

std::vector<Index> random_support(SplitMix64& rng, Index n, int r) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (int i = 0; i < r; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(r));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Matrix principal(const Matrix& m, const std::vector<Index>& support) {
  const auto k = static_cast<Index>(support.size());
  Matrix out(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) out(i, j) = m(support[i], support[j]);
  }
  return out;
}

void validate_symmetric(const Matrix& m, const char* label) {
  if (asymmetry(m) > kSymmetryTol) {
    throw InvalidConfig(std::string("matrix ") + label + " is not symmetric");
  }
}

void validate_psd(const Matrix& m, const char* label, double top) {
  const double smallest = smallest_eigenvalue_estimate(m);
  if (smallest < -kPsdTol * std::max(1.0, top)) {
    throw InvalidConfig(std::string("matrix ") + label + " is not positive semidefinite (eigenvalue " +
                        std::to_string(smallest) + ")");
  }
}

}  // namespace

SgepProblem::SgepProblem(Matrix a, Matrix b, int r) : SgepProblem(std::move(a), std::move(b), r, Options{}) {}

SgepProblem::SgepProblem(Matrix a, Matrix b, int r, const Options& options)
    : a_(std::move(a)), b_(std::move(b)), r_(r) {
  if (a_.rows() != a_.cols() || b_.rows() != b_.cols() || a_.rows() != b_.rows()) {
    throw DimensionMismatch("SGEP needs square A and B of equal size");
  }
  const Index n = a_.rows();
  if (n == 0) throw DimensionMismatch("SGEP with an empty matrix");
  if (r < 1 || r > n) {
    throw InvalidConfig("sparsity r = " + std::to_string(r) + " must lie in [1, " +
                        std::to_string(n) + "]");
  }
  if (options.validate) {
    validate_symmetric(a_, "A");
    validate_symmetric(b_, "B");
  }
  const double norm_b = options.known_norm_b > 0.0 ? options.known_norm_b : matrix_two_norm(b_);
  const double norm_a = options.known_norm_a > 0.0 ? options.known_norm_a : matrix_two_norm(a_);
  lipschitz_ = norm_b;
  denominator_bound_ = 0.5 * norm_a;
  if (!(lipschitz_ > 0.0)) throw InvalidConfig("B must be nonzero");
  if (!(denominator_bound_ > 0.0)) throw InvalidConfig("A must be nonzero");

  if (options.validate) {
    validate_psd(a_, "A", norm_a);
    validate_psd(b_, "B", norm_b);
    SplitMix64 rng(options.validation_seed);
    const long long samples = capped_binomial(n, r, 50);
    for (long long s = 0; s < samples; ++s) {
      const std::vector<Index> support = random_support(rng, n, r);
      Eigen::LLT<Matrix> llt(principal(b_, support));
      if (llt.info() != Eigen::Success) {
        throw InvalidConfig("an r x r principal submatrix of B is not positive definite");
      }
    }
  }
}

Vector SgepProblem::sparse_product(const Matrix& m, const Vector& v) {
  Index nnz = 0;
  for (Index i = 0; i < v.size(); ++i) nnz += v[i] != 0.0 ? 1 : 0;
  if (2 * nnz > v.size()) return m * v;
  Vector out = Vector::Zero(m.rows());
  for (Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) out.noalias() += v[j] * m.col(j);
  }
  return out;
}

double SgepProblem::eval_f(const Vector& x) const { return in_sparse_sphere(x, r_) ? 0.0 : kInfinity; }

double SgepProblem::eval_h(const Vector& x) const { return 0.5 * x.dot(sparse_product(b_, x)); }

Vector SgepProblem::grad_h(const Vector& x) const { return sparse_product(b_, x); }

double SgepProblem::eval_g(const Vector& x) const { return 0.5 * x.dot(sparse_product(a_, x)); }

Vector SgepProblem::subgrad_g(const Vector& x) const { return sparse_product(a_, x); }

Vector SgepProblem::prox_f(double alpha, const Vector& z) const { return sgep_prox_f(alpha, z, r_); }

double SgepProblem::critical_residual(const Vector& x) const { return sgep_critical_residual(*this, x); }

double SgepProblem::ratio(const Vector& x) const {
  const double den = x.dot(sparse_product(a_, x));
  const double num = x.dot(sparse_product(b_, x));
  return den > domain_eps(num) ? num / den : kInfinity;
}

bool in_sparse_sphere(const Vector& x, int r) {
  Index nnz = 0;
  for (Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0 ? 1 : 0;
  return nnz <= r && std::abs(x.norm() - 1.0) <= kUnitNormTol;
}

Vector project_sparse_sphere(const Vector& x, int r) {
  const Index n = x.size();
  if (r < 1) throw InvalidConfig("sparsity r must be >= 1");
  if (!x.allFinite()) throw NumericalError("projection of a non-finite vector");
  if (x.norm() <= domain_eps(0.0)) {
    throw DegenerateInput("projection of the zero vector onto the sparse sphere is all of C");
  }
  const Index keep = std::min<Index>(r, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&x](Index i, Index j) {
    const double ai = std::abs(x[i]);
    const double aj = std::abs(x[j]);
    return ai > aj || (ai == aj && i < j);
  });
  Vector y = Vector::Zero(n);
  for (Index t = 0; t < keep; ++t) y[order[t]] = x[order[t]];
  const double norm = y.norm();
  return y / norm;
}

Vector sgep_prox_f(double alpha, const Vector& z, int r) {
  if (!(alpha > 0.0)) throw InvalidConfig("prox step must be positive");
  return project_sparse_sphere(z, r);
}

SgepResidualReport sgep_residual_report(const SgepProblem& problem, const Vector& x) {
  if (x.size() != problem.dimension()) throw DimensionMismatch("residual point has wrong dimension");
  if (!in_sparse_sphere(x, problem.sparsity())) {
    throw DomainError("SGEP residual requested at a point outside C");
  }
  const Vector bx = SgepProblem::sparse_product(problem.b(), x);
  const Vector ax = SgepProblem::sparse_product(problem.a(), x);
  const double num = x.dot(bx);
  const double den = x.dot(ax);
  if (!(den > domain_eps(num))) throw DomainError("x^T A x vanishes at the residual point");
  const double ratio = num / den;
  const Vector residual = bx - ratio * ax;

  SgepResidualReport report;
  const double threshold = kSupportThreshold * x.cwiseAbs().maxCoeff();
  double restricted2 = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double magnitude = std::abs(x[i]);
    if (magnitude > threshold) {
      ++report.support_size;
      restricted2 += residual[i] * residual[i];
    }
    if (magnitude != 0.0 && magnitude > threshold / 10.0 && magnitude < threshold * 10.0) {
      report.ambiguous = true;
    }
  }
  report.full = residual.norm();
  report.restricted = std::sqrt(restricted2);
  report.value = report.support_size < problem.sparsity() ? report.full : report.restricted;
  return report;
}

double sgep_critical_residual(const SgepProblem& problem, const Vector& x) {
  return sgep_residual_report(problem, x).value;
}

Vector sgep_default_init(Index n, int r) {
  if (r < 1 || r > n) throw InvalidConfig("default start needs 1 <= r <= n");
  Vector x = Vector::Zero(n);
  x.head(r).setConstant(1.0 / std::sqrt(static_cast<double>(r)));
  return x;
}

namespace {

// Minimizer of x^T B x / x^T A x over x with x^T A x > 0, for small dense
// (A, B) with B positive definite. Null directions of A are eliminated through
// the Schur complement of B on them.
std::pair<double, Vector> restricted_generalized_min(const Matrix& a, const Matrix& b) {
  const Index k = a.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig_a(a);
  const Vector& w = eig_a.eigenvalues();
  const Matrix& u = eig_a.eigenvectors();
  const double tol = 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff());

  std::vector<Index> range;
  std::vector<Index> null;
  for (Index i = 0; i < k; ++i) (w[i] > tol ? range : null).push_back(i);
  if (range.empty()) return {kInfinity, Vector()};

  Matrix ur(k, static_cast<Index>(range.size()));
  for (Index j = 0; j < ur.cols(); ++j) ur.col(j) = u.col(range[j]);
  Vector inv_sqrt(ur.cols());
  for (Index j = 0; j < ur.cols(); ++j) inv_sqrt[j] = 1.0 / std::sqrt(w[range[j]]);

  Matrix b_eff = ur.transpose() * b * ur;
  Matrix lift;  // maps range coordinates to the null-space correction
  Matrix un;
  if (!null.empty()) {
    un.resize(k, static_cast<Index>(null.size()));
    for (Index j = 0; j < un.cols(); ++j) un.col(j) = u.col(null[j]);
    const Matrix b_nn = un.transpose() * b * un;
    const Matrix b_nr = un.transpose() * b * ur;
    lift = b_nn.ldlt().solve(b_nr);
    b_eff -= b_nr.transpose() * lift;
  }
  const Matrix scaled = inv_sqrt.asDiagonal() * b_eff * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (scaled + scaled.transpose()));
  const Vector y = inv_sqrt.asDiagonal() * eig.eigenvectors().col(0);
  Vector x = ur * y;
  if (!null.empty()) x -= un * (lift * y);
  x.normalize();
  const double den = x.dot(a * x);
  const double num = x.dot(b * x);
  if (!(den > domain_eps(num))) return {kInfinity, Vector()};
  return {num / den, x};
}

}  // namespace

SgepOptimum sgep_brute_force_optimum(const SgepProblem& problem) {
  const Index n = problem.dimension();
  const int r = problem.sparsity();
  if (n > 16 || r > 4) {
    throw SizeGuard("brute-force SGEP oracle is limited to n <= 16 and r <= 4");
  }
  // Supports of size exactly r suffice: a smaller support is a face of a
  // larger one and the restricted minimum can only decrease as it grows.
  const Index k = std::min<Index>(r, n);
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  std::fill(mask.begin(), mask.begin() + k, true);

  SgepOptimum best{kInfinity, Vector::Zero(n)};
  do {
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i) {
      if (mask[static_cast<std::size_t>(i)]) support.push_back(i);
    }
    auto [value, local] = restricted_generalized_min(principal(problem.a(), support),
                                                     principal(problem.b(), support));
    if (value < best.value) {
      best.value = value;
      best.point = Vector::Zero(n);
      for (Index i = 0; i < k; ++i) best.point[support[i]] = local[i];
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

SfdaCovariances sfda_covariances(const SfdaRecipe& recipe) {
  const Index n = recipe.n;
  if (n <= 0 || n % 5 != 0) throw InvalidConfig("SFDA dimension must be a positive multiple of 5");
  if (recipe.p1 < 1 || recipe.p2 < 1) throw InvalidConfig("SFDA needs at least one sample per class");
  if (!(std::abs(recipe.rho) < 1.0)) throw InvalidConfig("SFDA correlation must lie in (-1, 1)");

  const Index p = recipe.p();
  const Index block = n / 5;
  const double innovation = std::sqrt(1.0 - recipe.rho * recipe.rho);
  Vector shifted_mean = Vector::Zero(n);
  for (Index j = 2; j <= std::min(recipe.shift_last_index, n); j += 2) {
    shifted_mean[j - 1] = recipe.shift;
  }

  SplitMix64 rng(recipe.seed);
  Matrix samples(p, n);
  for (Index i = 0; i < p; ++i) {
    for (Index start = 0; start < n; start += block) {
      double w = rng.gaussian();
      samples(i, start) = w;
      for (Index j = 1; j < block; ++j) {
        w = recipe.rho * w + innovation * rng.gaussian();
        samples(i, start + j) = w;
      }
    }
    if (i >= recipe.p1) samples.row(i) += shifted_mean.transpose();
  }

  SfdaCovariances out;
  out.class_mean_1 = samples.topRows(recipe.p1).colwise().mean().transpose();
  out.class_mean_2 = samples.bottomRows(recipe.p2).colwise().mean().transpose();
  samples.topRows(recipe.p1).rowwise() -= out.class_mean_1.transpose();
  samples.bottomRows(recipe.p2).rowwise() -= out.class_mean_2.transpose();

  const double inv_p = 1.0 / static_cast<double>(p);
  out.within = Matrix::Zero(n, n);
  out.within.selfadjointView<Eigen::Lower>().rankUpdate(samples.transpose(), inv_p);
  out.within.triangularView<Eigen::StrictlyUpper>() = out.within.transpose();

  out.between = (static_cast<double>(recipe.p1) * out.class_mean_1 * out.class_mean_1.transpose() +
                 static_cast<double>(recipe.p2) * out.class_mean_2 * out.class_mean_2.transpose()) *
                inv_p;
  return out;
}

SfdaInstance gen_sfda(const SfdaRecipe& recipe) {
  if (recipe.within_shift < 0.0) throw InvalidConfig("SFDA within-class shift must be >= 0");
  SfdaCovariances cov = sfda_covariances(recipe);
  cov.within.diagonal().array() += recipe.within_shift;
  return SfdaInstance{SgepProblem(std::move(cov.between), std::move(cov.within), recipe.r),
                      std::move(cov.class_mean_1), std::move(cov.class_mean_2)};
}

}  // namespace fracmin
