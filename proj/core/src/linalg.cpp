#include "jive/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "jive/error.hpp"

namespace jive::linalg {
namespace {

thread_local std::size_t svd_calls = 0;

void require_finite(const Eigen::Ref<const Matrix>& a) {
  if (!a.allFinite()) throw NumericalError("SVD input contains NaN or Inf");
}

}  // namespace

Svd Svd::truncated(Index r) const {
  r = std::clamp<Index>(r, 0, s.size());
  return Svd{u.leftCols(r), s.head(r), v.leftCols(r)};
}

Matrix Svd::reconstruct() const { return u * s.asDiagonal() * v.transpose(); }

Svd thin_svd(const Eigen::Ref<const Matrix>& a) {
  require_finite(a);
  ++svd_calls;
  if (a.rows() == 0 || a.cols() == 0) {
    return Svd{Matrix(a.rows(), 0), Vector(0), Matrix(a.cols(), 0)};
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  canonicalize_signs(out.u, out.v);
  return out;
}

Vector singular_values(const Eigen::Ref<const Matrix>& a) {
  require_finite(a);
  ++svd_calls;
  if (a.rows() == 0 || a.cols() == 0) return Vector(0);
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index i = 0;
    v.col(j).cwiseAbs().maxCoeff(&i);
    if (v(i, j) < 0.0) {
      v.col(j) *= -1.0;
      if (j < u.cols()) u.col(j) *= -1.0;
    }
  }
}

void canonicalize_signs(Matrix& v) {
  Matrix none(0, 0);
  canonicalize_signs(none, v);
}

std::size_t svd_call_count() { return svd_calls; }

double spectral_norm(const Eigen::Ref<const Matrix>& a) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.rows() >= a.cols() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  if (gram.rows() == 1) return std::sqrt(std::max(gram(0, 0), 0.0));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

double orthonormality_error(const Eigen::Ref<const Matrix>& q) {
  if (q.cols() == 0) return 0.0;
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

double order_statistic(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("order statistic of an empty sample");
  const auto count = static_cast<double>(sorted.size());
  // Levels such as 1 - 0.95 carry round-off; without the slack q R lands a
  // hair above an integer and ceil skips an order statistic.
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(q * count - 1e-9)) - 1;
  rank = std::clamp<std::ptrdiff_t>(rank, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(rank)];
}

double sample_quantile(std::vector<double> samples, double q) {
  std::sort(samples.begin(), samples.end());
  return order_statistic(samples, q);
}

Matrix orthonormal_basis(const Eigen::Ref<const Matrix>& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double cut = s.size() > 0 ? s(0) * rel_tol : 0.0;
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace jive::linalg
