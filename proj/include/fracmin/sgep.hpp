#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "fracmin/problem.hpp"

namespace fracmin {

/// Sparse generalized eigenvalue problem
///
///     minimize  x^T B x / x^T A x   s.t.  |x|_0 <= r, |x|_2 = 1
///
/// in the half-quadratic form f = indicator of C = {|x|_0 <= r, |x|_2 = 1},
/// h(x) = x^T B x / 2 and g(x) = x^T A x / 2, so grad h = Bx, L = |B|_2 and
/// the ratio is unchanged by the halving.
class SgepProblem final : public FractionalProblem {
 public:
  struct Options {
    bool validate = true;
    /// Seed of the random supports used for the principal-submatrix check.
    std::uint64_t validation_seed = 0x5eed;
    /// Skip power iteration when the caller already knows |B|_2 and |A|_2.
    double known_norm_b = 0.0;
    double known_norm_a = 0.0;
  };

  SgepProblem(Matrix a, Matrix b, int r);
  SgepProblem(Matrix a, Matrix b, int r, const Options& options);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  int sparsity() const { return r_; }

  Index dimension() const override { return a_.rows(); }
  double eval_f(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  Vector grad_h(const Vector& x) const override;
  double lipschitz() const override { return lipschitz_; }
  double eval_g(const Vector& x) const override;
  Vector subgrad_g(const Vector& x) const override;
  Vector prox_f(double alpha, const Vector& z) const override;
  bool f_is_convex() const override { return false; }
  /// sup of g over C, = lambda_max(A)/2.
  double denominator_bound() const override { return denominator_bound_; }
  double critical_residual(const Vector& x) const override;
  std::string_view name() const override { return "sgep"; }

  /// x^T B x / x^T A x; +inf when the denominator vanishes.
  double ratio(const Vector& x) const;

  /// M v using only the nonzero entries of v.
  static Vector sparse_product(const Matrix& m, const Vector& v);

 private:
  Matrix a_;
  Matrix b_;
  int r_;
  double lipschitz_ = 0.0;
  double denominator_bound_ = 0.0;
};

/// Membership in C, with |x|_2 = 1 checked to 1e-10.
bool in_sparse_sphere(const Vector& x, int r);

/// Projection onto C: keep the r largest magnitudes (lower index wins ties)
/// and normalize. Throws DegenerateInput for the zero vector, whose
/// projection is all of C.
Vector project_sparse_sphere(const Vector& x, int r);

/// prox of alpha * indicator(C); independent of alpha.
Vector sgep_prox_f(double alpha, const Vector& z, int r);

/// Both residual forms of the critical-point test at x in C.
struct SgepResidualReport {
  double full = 0.0;        // |Bx - G(x) Ax|_2
  double restricted = 0.0;  // same, restricted to supp(x)
  Index support_size = 0;
  /// Classification of some entry sits within 10x of the support threshold.
  bool ambiguous = false;
  /// The residual that applies: full when |supp| < r, restricted otherwise.
  double value = 0.0;
};

SgepResidualReport sgep_residual_report(const SgepProblem& problem, const Vector& x);
double sgep_critical_residual(const SgepProblem& problem, const Vector& x);

/// x0 with the first r entries 1/sqrt(r).
Vector sgep_default_init(Index n, int r);

struct SgepOptimum {
  double value;
  Vector point;
};

/// Global minimum of the ratio over C by enumerating every support of size r
/// and solving the restricted dense generalized eigenproblem. Guarded to
/// n <= 16 and r <= 4.
SgepOptimum sgep_brute_force_optimum(const SgepProblem& problem);

/// Synthetic two-class Gaussian data for sparse Fisher discriminant analysis.
/// Class 1 has mean 0, class 2 has `shift` at the even 1-based coordinates
/// 2, 4, ..., shift_last_index; both share a covariance that is block diagonal
/// with five (n/5)x(n/5) blocks of entries rho^|j - j'|. The benchmark adds
/// `within_shift` * I to the within-class covariance, which makes B positive
/// definite; the reference objective values are reported on that shifted pair.
struct SfdaRecipe {
  Index n = 1000;
  Index p1 = 500;
  Index p2 = 500;
  int r = 50;
  double rho = 0.8;
  double shift = 0.5;
  Index shift_last_index = 40;
  double within_shift = 0.5;
  std::uint64_t seed = 0;

  Index p() const { return p1 + p2; }
};

struct SfdaInstance {
  /// A = between-class covariance (denominator), B = within-class covariance
  /// plus within_shift * I.
  SgepProblem problem;
  Vector class_mean_1;
  Vector class_mean_2;
};

/// Unshifted covariance matrices of the recipe's samples.
struct SfdaCovariances {
  Matrix between;
  Matrix within;
  Vector class_mean_1;
  Vector class_mean_2;
};

/// Samples are drawn class 1 first, then class 2; within a sample each of the
/// five blocks is an AR(1) sequence w_1 = e_1, w_j = rho w_{j-1} +
/// sqrt(1 - rho^2) e_j, which has exactly the block covariance above.
SfdaCovariances sfda_covariances(const SfdaRecipe& recipe);

SfdaInstance gen_sfda(const SfdaRecipe& recipe);

}  // namespace fracmin
