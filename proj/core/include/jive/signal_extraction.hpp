#pragma once

#include <string>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/linalg.hpp"

namespace jive {

/// Truncated SVD of one block (initial signal estimate) together with the
/// trailing singular vectors of the same factorization, which the
/// perturbation resamplers draw noise directions from.
struct SignalEstimate {
  Index block_index = 0;
  Index rank = 0;
  Matrix left_basis;       // d x r, orthonormal
  Vector singular_values;  // r, descending, positive
  Matrix score_basis;      // n x r, orthonormal
  double threshold = 0.0;  // sigma_r(X): smallest retained singular value
  Vector full_spectrum;    // all min(d, n) singular values

  Matrix left_complement;   // d x (min(d,n) - r)
  Matrix score_complement;  // n x (min(d,n) - r)

  std::vector<std::string> warnings;

  Index features() const { return left_basis.rows(); }
  Index objects() const { return score_basis.rows(); }
};

/// Best rank-`rank` approximation factors of the block. Each score column's
/// largest-magnitude entry is positive. Warns when sigma_r - sigma_{r+1} is
/// below 1e-8 sigma_1 (ill-determined cut).
SignalEstimate initial_svd(const DataBlock& block, Index rank, Index block_index = 0);

/// U diag(s) V^T; a zero d x n matrix for empty factors.
Matrix reconstruct(const SignalEstimate& estimate);

}  // namespace jive
