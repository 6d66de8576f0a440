#include "jive/signal_extraction.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "jive/error.hpp"

namespace jive {

SignalEstimate initial_svd(const DataBlock& block, Index rank, Index block_index) {
  const Index limit = std::min(block.features(), block.objects());
  if (rank < 1 || rank > limit) {
    throw ValidationError("block '" + block.name + "': rank " + std::to_string(rank) +
                          " outside [1, " + std::to_string(limit) + "]");
  }
  const linalg::Svd svd = linalg::thin_svd(block.values);

  SignalEstimate est;
  est.block_index = block_index;
  est.rank = rank;
  est.left_basis = svd.u.leftCols(rank);
  est.singular_values = svd.s.head(rank);
  est.score_basis = svd.v.leftCols(rank);
  est.threshold = svd.s(rank - 1);
  est.full_spectrum = svd.s;
  est.left_complement = svd.u.rightCols(limit - rank);
  est.score_complement = svd.v.rightCols(limit - rank);

  const double numerical_zero = static_cast<double>(std::max(block.features(), block.objects())) *
                                std::numeric_limits<double>::epsilon() * svd.s(0);
  if (!(est.threshold > numerical_zero)) {
    throw NumericalError("block '" + block.name + "': singular value " + std::to_string(rank) +
                         " is zero; rank exceeds the numerical rank of the block");
  }
  if (rank < limit && svd.s(rank - 1) - svd.s(rank) < 1e-8 * svd.s(0)) {
    std::ostringstream msg;
    msg << "block '" << block.name << "': singular values " << rank << " and " << rank + 1
        << " are tied (" << svd.s(rank - 1) << " vs " << svd.s(rank)
        << "); the rank-" << rank << " score subspace is ill-determined";
    est.warnings.push_back(msg.str());
  }
  return est;
}

Matrix reconstruct(const SignalEstimate& estimate) {
  return estimate.left_basis * estimate.singular_values.asDiagonal() *
         estimate.score_basis.transpose();
}

}  // namespace jive
