#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/decomposition.hpp"
#include "jive/joint_segmentation.hpp"
#include "jive/perturbation_bounds.hpp"
#include "jive/signal_extraction.hpp"

namespace jive {

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

/// Everything one run produces; serialized by diagnostics_json.
struct PipelineResult {
  PipelineConfig config;
  MultiBlock blocks;  // after optional centering
  std::vector<SignalEstimate> estimates;
  std::vector<PerturbationBound> bounds;
  StackedScores stacked;
  ThresholdEstimate sv_threshold;
  std::optional<ThresholdEstimate> angle_threshold;
  SegmentationDiagnostics segmentation;
  JiveDecomposition decomposition;
  Representations representations;
  std::vector<std::string> warnings;
  std::vector<StageTiming> timing;
  std::size_t svd_count = 0;
};

/// Load-free orchestration: (center) -> initial SVDs -> resampled bounds ->
/// stacked-score segmentation -> pruning and projection -> representations.
PipelineResult run_pipeline(const MultiBlock& blocks, const PipelineConfig& config);

/// Upper bound on SVD factorizations for K blocks: one per block in the
/// initial step, one for the stacked scores, then per block one for the
/// orthogonal projection and one each for the joint and individual parts.
constexpr std::size_t max_svd_count(std::size_t blocks) { return 4 * blocks + 1; }

/// Single JSON document with keys config, scree, wedin, segmentation,
/// decomposition, warnings, svd_count and (optionally) timing.
std::string diagnostics_json(const PipelineResult& result, bool include_timing = true);

/// Writes joint_/individual_/residual_/bss_joint_/ins_/cns_loadings_<block>.csv,
/// cns.csv and diagnostics.json into `out_dir` (created if missing).
void write_outputs(const PipelineResult& result, const std::filesystem::path& out_dir);

}  // namespace jive
