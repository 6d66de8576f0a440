#pragma once

#include <span>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/linalg.hpp"
#include "jive/signal_extraction.hpp"

namespace jive {

/// Relative slack used when comparing a norm or singular value to a Step-1
/// threshold, so exact ties survive round-off.
inline constexpr double kThresholdRelTol = 1e-10;

struct DroppedComponent {
  Index component = 0;              // 0-based column of the candidate basis
  std::vector<Index> failing_blocks;  // 0-based block indices
};

struct PruneResult {
  Matrix joint_basis;  // n x r_J surviving candidate columns
  std::vector<DroppedComponent> dropped;
};

/// Keeps a candidate joint direction v only if ||X_k v|| >= tau_k for every
/// block k.
PruneResult prune_joint_components(const MultiBlock& blocks,
                                   std::span<const SignalEstimate> estimates,
                                   const Matrix& candidate_basis);

/// Per-block joint/individual/residual split. X = J + I + E holds exactly
/// because E is formed by subtraction.
struct JiveDecomposition {
  Matrix joint_basis;  // n x r_J
  std::vector<Matrix> joint;
  std::vector<Matrix> individual;
  std::vector<Matrix> residual;
  Index joint_rank = 0;
  std::vector<Index> individual_ranks;
  std::vector<DroppedComponent> dropped;
  /// Rank-r_I truncated SVD of X_k (I - P_J); its product is the individual matrix.
  std::vector<linalg::Svd> individual_factors;

  std::size_t blocks() const { return joint.size(); }
  Index signal_rank(std::size_t k) const { return joint_rank + individual_ranks[k]; }
};

/// J_k = X_k V V^T, then the SVD of X_k (I - V V^T) keeps components with
/// singular value strictly above tau_k as I_k.
JiveDecomposition final_decomposition(const MultiBlock& blocks,
                                      std::span<const SignalEstimate> estimates,
                                      const Matrix& joint_basis);

/// Same, with explicit thresholds (one per block).
JiveDecomposition final_decomposition(const MultiBlock& blocks, std::span<const double> thresholds,
                                      const Matrix& joint_basis);

struct BlockRepresentation {
  linalg::Svd joint;       // U_J^k, S_J^k, V_J^k (V stored n x r_J)
  Matrix bss_joint;        // r_J x n: S_J^k V_J^k^T
  Matrix cns_loadings;     // d_k x r_J, unit columns
  linalg::Svd individual;  // U_I^k, S_I^k, V_I^k
  Matrix bss_individual;   // r_I x n
  Matrix ins;              // r_I x n
};

struct Representations {
  Matrix cns;  // r_J x n: V_J^T
  std::vector<BlockRepresentation> blocks;
};

/// Full, BSS, CNS and INS views. The CNS loading for block k and joint
/// score v_j is the regression coefficient vector X_k v_j scaled to unit norm.
Representations compute_representations(const JiveDecomposition& decomposition,
                                         const MultiBlock& blocks);

}  // namespace jive
