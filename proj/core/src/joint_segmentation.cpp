#include "jive/joint_segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jive/error.hpp"

namespace jive {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

void require_same_replicates(std::span<const PerturbationBound> bounds) {
  for (const auto& b : bounds) {
    if (b.replicates() != bounds.front().replicates()) {
      throw ValidationError("perturbation bounds have different replicate counts (" +
                            std::to_string(b.replicates()) + " vs " +
                            std::to_string(bounds.front().replicates()) + ")");
    }
  }
  if (bounds.front().replicates() == 0) throw ValidationError("perturbation bounds are empty");
}

}  // namespace

StackedScores stack_scores(std::span<const SignalEstimate> estimates) {
  if (estimates.size() < 2) throw ValidationError("stacking needs at least two score bases");
  const Index n = estimates.front().objects();
  Index total = 0;
  for (const auto& e : estimates) {
    if (e.objects() != n) {
      throw ValidationError("score bases disagree on the object count (" +
                            std::to_string(e.objects()) + " vs " + std::to_string(n) + ")");
    }
    total += e.rank;
  }

  StackedScores out;
  out.stacked.resize(total, n);
  Index row = 0;
  for (const auto& e : estimates) {
    out.stacked.middleRows(row, e.rank) = e.score_basis.transpose();
    out.block_row_ranges.emplace_back(row, row + e.rank);
    out.ranks.push_back(e.rank);
    row += e.rank;
  }
  out.svd = linalg::thin_svd(out.stacked);
  return out;
}

std::vector<double> principal_angles(const StackedScores& stacked) {
  if (stacked.blocks() != 2) {
    throw ValidationError("principal angles from the stacked SVD need exactly 2 blocks, got " +
                          std::to_string(stacked.blocks()));
  }
  const Index count = std::min({stacked.ranks[0], stacked.ranks[1], stacked.svd.s.size()});
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double s = stacked.svd.s(i);
    angles.push_back(std::acos(std::clamp(s * s - 1.0, -1.0, 1.0)) * kDegPerRad);
  }
  return angles;
}

ThresholdEstimate two_block_angle_threshold(const PerturbationBound& first,
                                            const PerturbationBound& second,
                                            const QuantileLevels& levels) {
  if (first.replicates() != second.replicates()) {
    throw ValidationError("perturbation bounds have different replicate counts (" +
                          std::to_string(first.replicates()) + " vs " +
                          std::to_string(second.replicates()) + ")");
  }
  if (first.replicates() == 0) throw ValidationError("perturbation bounds are empty");

  ThresholdEstimate out;
  const std::size_t R = first.replicates();
  out.samples.resize(R);
  std::size_t saturated = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const double sum = (std::asin(first.sin_theta_samples[r]) + std::asin(second.sin_theta_samples[r])) *
                       kDegPerRad;
    if (sum >= 90.0) ++saturated;
    out.samples[r] = std::min(sum, 90.0);
  }
  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  out.value = linalg::order_statistic(sorted, levels.point);
  out.ci = {linalg::order_statistic(sorted, levels.ci.first),
            linalg::order_statistic(sorted, levels.ci.second)};
  if (out.value >= 90.0) {
    out.warnings.push_back("angle threshold saturated at 90 degrees; no component can be excluded");
  } else if (saturated > 0) {
    out.warnings.push_back(std::to_string(saturated) + " of " + std::to_string(R) +
                           " angle-threshold samples saturated at 90 degrees");
  }
  return out;
}

ThresholdEstimate multi_block_sv_threshold(std::span<const PerturbationBound> bounds,
                                           const QuantileLevels& levels) {
  if (bounds.size() < 2) throw ValidationError("the sigma^2 threshold needs at least two blocks");
  require_same_replicates(bounds);

  ThresholdEstimate out;
  const std::size_t R = bounds.front().replicates();
  const auto K = static_cast<double>(bounds.size());
  out.samples.assign(R, K);
  for (const auto& b : bounds) {
    for (std::size_t r = 0; r < R; ++r) {
      const double s = b.sin_theta_samples[r];
      out.samples[r] -= s * s;
    }
  }
  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  out.value = linalg::order_statistic(sorted, 1.0 - levels.point);
  out.ci = {linalg::order_statistic(sorted, 1.0 - levels.ci.first),
            linalg::order_statistic(sorted, 1.0 - levels.ci.second)};
  return out;
}

Index count_angles_below(std::span<const double> angles_deg, double threshold_deg) {
  Index count = 0;
  while (count < static_cast<Index>(angles_deg.size()) &&
         angles_deg[static_cast<std::size_t>(count)] < threshold_deg + kAngleTolDeg) {
    ++count;
  }
  return count;
}

Index count_squared_at_least(std::span<const double> squared, double threshold) {
  Index count = 0;
  while (count < static_cast<Index>(squared.size()) &&
         squared[static_cast<std::size_t>(count)] >= threshold - kSquaredSingularValueTol) {
    ++count;
  }
  return count;
}

SegmentationDiagnostics select_joint_rank(const StackedScores& stacked, Criterion criterion,
                                          const ThresholdEstimate& sv_threshold,
                                          const std::optional<ThresholdEstimate>& angle_threshold) {
  if (criterion == Criterion::two_block_angle && !angle_threshold) {
    throw ValidationError("two_block_angle criterion requires an angle threshold");
  }
  SegmentationDiagnostics diag;
  diag.criterion = criterion;
  const Vector squared = stacked.squared_singular_values();
  diag.squared_singular_values.assign(squared.data(), squared.data() + squared.size());

  const Index cap = *std::min_element(stacked.ranks.begin(), stacked.ranks.end());
  const auto capped = [cap](Index r) { return std::min(r, cap); };

  const Index by_sv = capped(count_squared_at_least(diag.squared_singular_values, sv_threshold.value));
  std::optional<Index> by_angle;
  if (stacked.blocks() == 2) {
    diag.principal_angles_deg = principal_angles(stacked);
    if (angle_threshold) {
      by_angle = capped(count_angles_below(*diag.principal_angles_deg, angle_threshold->value));
    }
  }

  if (criterion == Criterion::two_block_angle) {
    diag.threshold = angle_threshold->value;
    diag.threshold_ci = angle_threshold->ci;
    diag.provisional_joint_rank = *by_angle;
    diag.alternate_joint_rank = by_sv;
    diag.alternate_threshold = sv_threshold.value;
  } else {
    diag.threshold = sv_threshold.value;
    diag.threshold_ci = sv_threshold.ci;
    diag.provisional_joint_rank = by_sv;
    if (by_angle) {
      diag.alternate_joint_rank = by_angle;
      diag.alternate_threshold = angle_threshold->value;
    }
  }
  diag.candidate_basis = stacked.svd.v.leftCols(diag.provisional_joint_rank);
  return diag;
}

}  // namespace jive
