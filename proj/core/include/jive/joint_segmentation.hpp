#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/linalg.hpp"
#include "jive/perturbation_bounds.hpp"
#include "jive/signal_extraction.hpp"

namespace jive {

/// Absolute slack on sigma^2 comparisons; absorbs round-off when a direction
/// is shared exactly (sigma^2 == K up to a few ulps).
inline constexpr double kSquaredSingularValueTol = 1e-10;
/// Slack on angle comparisons, degrees (1e-6 rad); arccos near 1 only
/// resolves angles to about sqrt(eps).
inline constexpr double kAngleTolDeg = 1e-6 * 57.29577951308232;

/// M = [V_1^T; ...; V_K^T] and its SVD.
struct StackedScores {
  Matrix stacked;
  linalg::Svd svd;
  std::vector<std::pair<Index, Index>> block_row_ranges;  // [begin, end)
  std::vector<Index> ranks;

  std::size_t blocks() const { return ranks.size(); }
  Vector squared_singular_values() const { return svd.s.array().square(); }
};

StackedScores stack_scores(std::span<const SignalEstimate> estimates);

/// phi_i = arccos(clamp(sigma_{M,i}^2 - 1, -1, 1)) in degrees for
/// i <= min(r_1, r_2). Requires exactly two blocks.
std::vector<double> principal_angles(const StackedScores& stacked);

struct QuantileLevels {
  double point = 0.5;
  std::pair<double, double> ci{0.05, 0.95};
};

struct ThresholdEstimate {
  double value = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  std::vector<double> samples;
  std::vector<std::string> warnings;
};

/// Per replicate phi = min(asin s_1 + asin s_2, 90 deg); returns the point
/// quantile and CI (degrees) of those samples.
ThresholdEstimate two_block_angle_threshold(const PerturbationBound& first,
                                            const PerturbationBound& second,
                                            const QuantileLevels& levels = {});

/// Per replicate t = K - sum_k s_k^2. A larger noise quantile means a lower
/// threshold, so the point estimate is the (1 - q) order statistic and the
/// CI endpoints are the (1 - ci) order statistics.
ThresholdEstimate multi_block_sv_threshold(std::span<const PerturbationBound> bounds,
                                           const QuantileLevels& levels = {});

struct SegmentationDiagnostics {
  Criterion criterion = Criterion::multi_block_singular_value;
  std::optional<std::vector<double>> principal_angles_deg;  // K == 2 only
  std::vector<double> squared_singular_values;
  double threshold = 0.0;
  std::pair<double, double> threshold_ci{0.0, 0.0};
  Index provisional_joint_rank = 0;
  Matrix candidate_basis;  // n x r_J: leading right singular vectors of M

  /// Selection under the other criterion, for comparison (K == 2 only).
  std::optional<Index> alternate_joint_rank;
  std::optional<double> alternate_threshold;
};

/// Selected count under the angle rule: #{phi_i < threshold}.
Index count_angles_below(std::span<const double> angles_deg, double threshold_deg);
/// Selected count under the sigma^2 rule: #{sigma_i^2 >= threshold}.
Index count_squared_at_least(std::span<const double> squared, double threshold);

/// Applies the configured criterion (capped at min_k r_k). `angle` is needed
/// for the two-block criterion and, when present, reported alongside.
SegmentationDiagnostics select_joint_rank(const StackedScores& stacked, Criterion criterion,
                                          const ThresholdEstimate& sv_threshold,
                                          const std::optional<ThresholdEstimate>& angle_threshold);

}  // namespace jive
