#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jive {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Thin singular value decomposition A = U diag(s) V^T with s descending.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;

  Index rank() const { return s.size(); }
  /// Leading `r` components.
  Svd truncated(Index r) const;
  Matrix reconstruct() const;
};

/// Thin SVD with the score-side sign convention applied (see canonicalize_signs).
/// Each call increments the calling thread's factorization counter.
Svd thin_svd(const Eigen::Ref<const Matrix>& a);

/// Singular values only, descending. Counted like thin_svd.
Vector singular_values(const Eigen::Ref<const Matrix>& a);

/// Flip column pairs so the largest-magnitude entry of each column of `v`
/// is positive; the matching column of `u` is negated with it.
void canonicalize_signs(Matrix& u, Matrix& v);
void canonicalize_signs(Matrix& v);

/// Number of SVD factorizations performed on this thread so far.
std::size_t svd_call_count();

/// Spectral (operator 2-) norm. Uses the Gram matrix of the narrow side,
/// which is exact enough for norm estimates on tall or wide inputs.
double spectral_norm(const Eigen::Ref<const Matrix>& a);

/// max |Q^T Q - I|.
double orthonormality_error(const Eigen::Ref<const Matrix>& q);

/// Order statistic at level q (inverse empirical CDF): sorted[ceil(q R) - 1].
/// `sorted` must be ascending and non-empty.
double order_statistic(std::span<const double> sorted, double q);

/// Copies, sorts and returns the order statistic at level q.
double sample_quantile(std::vector<double> samples, double q);

/// Orthonormal basis of the column span (SVD based, relative rank tolerance).
Matrix orthonormal_basis(const Eigen::Ref<const Matrix>& a, double rel_tol = 1e-12);

}  // namespace linalg
}  // namespace jive
