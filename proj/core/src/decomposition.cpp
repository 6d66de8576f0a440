#include "jive/decomposition.hpp"

#include <algorithm>

#include "jive/error.hpp"

namespace jive {

PruneResult prune_joint_components(const MultiBlock& blocks,
                                   std::span<const SignalEstimate> estimates,
                                   const Matrix& candidate_basis) {
  if (estimates.size() != blocks.size()) {
    throw ValidationError("need one signal estimate per block");
  }
  PruneResult out;
  std::vector<Index> keep;
  for (Index j = 0; j < candidate_basis.cols(); ++j) {
    DroppedComponent failure{j, {}};
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const double energy = (blocks[k].values * candidate_basis.col(j)).norm();
      const double tau = estimates[k].threshold;
      if (energy < tau * (1.0 - kThresholdRelTol)) failure.failing_blocks.push_back(static_cast<Index>(k));
    }
    if (failure.failing_blocks.empty()) {
      keep.push_back(j);
    } else {
      out.dropped.push_back(std::move(failure));
    }
  }
  out.joint_basis.resize(candidate_basis.rows(), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.joint_basis.col(static_cast<Index>(i)) = candidate_basis.col(keep[i]);
  }
  return out;
}

JiveDecomposition final_decomposition(const MultiBlock& blocks,
                                      std::span<const SignalEstimate> estimates,
                                      const Matrix& joint_basis) {
  if (estimates.size() != blocks.size()) {
    throw ValidationError("need one signal estimate per block");
  }
  std::vector<double> thresholds;
  thresholds.reserve(estimates.size());
  for (const auto& e : estimates) thresholds.push_back(e.threshold);
  return final_decomposition(blocks, thresholds, joint_basis);
}

JiveDecomposition final_decomposition(const MultiBlock& blocks, std::span<const double> thresholds,
                                      const Matrix& joint_basis) {
  if (thresholds.size() != blocks.size()) throw ValidationError("need one threshold per block");
  if (joint_basis.rows() != blocks.objects()) {
    throw ValidationError("joint basis has " + std::to_string(joint_basis.rows()) +
                          " rows, blocks have " + std::to_string(blocks.objects()) + " objects");
  }

  JiveDecomposition dec;
  dec.joint_basis = joint_basis;
  dec.joint_rank = joint_basis.cols();

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Matrix& x = blocks[k].values;
    // X P_J without forming the n x n projection.
    Matrix joint = (x * joint_basis) * joint_basis.transpose();
    const Matrix orthogonal = x - joint;

    const linalg::Svd svd = linalg::thin_svd(orthogonal);
    const double cut = thresholds[k] * (1.0 - kThresholdRelTol);
    Index rank = 0;
    while (rank < svd.s.size() && svd.s(rank) > cut) ++rank;
    linalg::Svd kept = svd.truncated(rank);
    Matrix individual = kept.reconstruct();
    Matrix residual = x - joint - individual;

    dec.joint.push_back(std::move(joint));
    dec.individual.push_back(std::move(individual));
    dec.residual.push_back(std::move(residual));
    dec.individual_ranks.push_back(rank);
    dec.individual_factors.push_back(std::move(kept));
  }
  return dec;
}

Representations compute_representations(const JiveDecomposition& decomposition,
                                         const MultiBlock& blocks) {
  const Matrix& basis = decomposition.joint_basis;
  Representations rep;
  rep.cns = basis.transpose();

  for (std::size_t k = 0; k < decomposition.blocks(); ++k) {
    BlockRepresentation block;
    // J_k = (X_k V) V^T, so the SVD of the d x r_J factor X_k V gives J_k's SVD.
    const Matrix projected = blocks[k].values * basis;
    const linalg::Svd small = linalg::thin_svd(projected);
    block.joint.u = small.u;
    block.joint.s = small.s;
    block.joint.v = basis * small.v;
    linalg::canonicalize_signs(block.joint.u, block.joint.v);
    block.bss_joint = block.joint.s.asDiagonal() * block.joint.v.transpose();

    block.cns_loadings = projected;
    for (Index j = 0; j < projected.cols(); ++j) {
      const double norm = projected.col(j).norm();
      if (norm > 0.0) block.cns_loadings.col(j) /= norm;
    }

    block.individual = decomposition.individual_factors[k];
    block.bss_individual = block.individual.s.asDiagonal() * block.individual.v.transpose();
    block.ins = block.individual.v.transpose();
    rep.blocks.push_back(std::move(block));
  }
  return rep;
}

}  // namespace jive
