#include "jive/perturbation_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jive/error.hpp"

namespace jive {
namespace {

void require_resamplable(const SignalEstimate& estimate) {
  if (estimate.rank < 1) throw ValidationError("cannot resample for a rank-0 estimate");
  if (estimate.score_complement.cols() < 1 || estimate.left_complement.cols() < 1) {
    throw ValidationError("block " + std::to_string(estimate.block_index + 1) +
                          ": no residual directions to resample (rank equals min(d, n))");
  }
}

Matrix gather_columns(const Matrix& source, const std::vector<Index>& columns) {
  Matrix out(source.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.col(static_cast<Index>(j)) = source.col(columns[j]);
  return out;
}

}  // namespace

std::vector<Index> draw_columns(Index available, Index count, Engine& rng) {
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(count));
  if (available >= count) {
    // Partial Fisher-Yates: the first `count` entries are a uniform sample
    // without replacement.
    std::vector<Index> pool(static_cast<std::size_t>(available));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < count; ++i) {
      std::uniform_int_distribution<Index> pick(i, available - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
      picked.push_back(pool[static_cast<std::size_t>(i)]);
    }
  } else {
    std::uniform_int_distribution<Index> pick(0, available - 1);
    for (Index i = 0; i < count; ++i) picked.push_back(pick(rng));
  }
  return picked;
}

double resample_row_energy(const DataBlock& block, const SignalEstimate& estimate, Engine& rng) {
  require_resamplable(estimate);
  const auto cols = draw_columns(estimate.score_complement.cols(), estimate.rank, rng);
  return linalg::spectral_norm(block.values * gather_columns(estimate.score_complement, cols));
}

double resample_column_energy(const DataBlock& block, const SignalEstimate& estimate, Engine& rng) {
  require_resamplable(estimate);
  const auto cols = draw_columns(estimate.left_complement.cols(), estimate.rank, rng);
  return linalg::spectral_norm(block.values.transpose() *
                               gather_columns(estimate.left_complement, cols));
}

EnergyResampler::EnergyResampler(const DataBlock& block, const SignalEstimate& estimate)
    : rank_(estimate.rank),
      with_replacement_(estimate.score_complement.cols() < estimate.rank),
      row_projected_((require_resamplable(estimate), block.values * estimate.score_complement)),
      column_projected_(block.values.transpose() * estimate.left_complement) {}

double EnergyResampler::draw(const Matrix& projected, Engine& rng) const {
  const auto cols = draw_columns(projected.cols(), rank_, rng);
  return linalg::spectral_norm(gather_columns(projected, cols));
}

double EnergyResampler::row_energy(Engine& rng) const { return draw(row_projected_, rng); }

double EnergyResampler::column_energy(Engine& rng) const { return draw(column_projected_, rng); }

PerturbationBound estimate_wedin_bound(const DataBlock& block, const SignalEstimate& estimate,
                                       const PipelineConfig& config, const RandomStreams& streams) {
  if (config.n_resamples < 1) throw ValidationError("n_resamples must be positive");
  const EnergyResampler resampler(block, estimate);
  const double sigma_min = estimate.singular_values(estimate.rank - 1);
  const auto replicates = static_cast<std::size_t>(config.n_resamples);

  PerturbationBound bound;
  bound.block_index = estimate.block_index;
  bound.point_estimate_quantile = config.threshold_quantile;
  bound.sin_theta_samples.resize(replicates);
  bound.unclipped_samples.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Engine rng = streams.engine(r);
    const double row = resampler.row_energy(rng);
    const double column = resampler.column_energy(rng);
    const double ratio = std::max(row, column) / sigma_min;
    bound.unclipped_samples[r] = ratio;
    bound.sin_theta_samples[r] = std::min(ratio, 1.0);
  }

  std::vector<double> sorted = bound.sin_theta_samples;
  std::sort(sorted.begin(), sorted.end());
  bound.sin_theta_hat = linalg::order_statistic(sorted, config.threshold_quantile);
  bound.ci = {linalg::order_statistic(sorted, config.ci_quantiles.first),
              linalg::order_statistic(sorted, config.ci_quantiles.second)};

  if (resampler.with_replacement()) {
    bound.warnings.push_back("block " + std::to_string(estimate.block_index + 1) +
                             ": fewer residual directions than the rank; resampling with replacement");
  }
  const auto clipped = std::count_if(bound.unclipped_samples.begin(), bound.unclipped_samples.end(),
                                     [](double v) { return v > 1.0; });
  if (clipped > 0) {
    bound.warnings.push_back("block " + std::to_string(estimate.block_index + 1) + ": " +
                             std::to_string(clipped) +
                             " bound samples exceeded 1 and were clipped (noise comparable to signal)");
  }
  return bound;
}

double exact_wedin_bound(const Matrix& noise, const SignalEstimate& estimate) {
  const double row = linalg::spectral_norm(noise * estimate.score_basis);
  const double column = linalg::spectral_norm(noise.transpose() * estimate.left_basis);
  return std::max(row, column) / estimate.singular_values(estimate.rank - 1);
}

}  // namespace jive
