#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/random.hpp"
#include "jive/signal_extraction.hpp"

namespace jive {

/// Resampled distribution of the generalized sin-theta bound for one block:
/// max(||E V||, ||E^T U||) / sigma_min, with the unobservable noise energies
/// replaced by the energy of the data along resampled residual directions.
struct PerturbationBound {
  Index block_index = 0;
  std::vector<double> sin_theta_samples;  // clipped to [0, 1]
  std::vector<double> unclipped_samples;
  double point_estimate_quantile = 0.5;
  double sin_theta_hat = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  std::vector<std::string> warnings;

  std::size_t replicates() const { return sin_theta_samples.size(); }
};

/// Draws r columns V* of the score complement and returns ||X V*||.
/// Complement columns are drawn without replacement, or with replacement
/// when fewer than r exist.
double resample_row_energy(const DataBlock& block, const SignalEstimate& estimate, Engine& rng);

/// Mirror image: r columns U* of the left complement, returns ||X^T U*||.
double resample_column_energy(const DataBlock& block, const SignalEstimate& estimate, Engine& rng);

/// Same draws as the free functions, but with X V_perp and X^T U_perp
/// formed once so each replicate only touches r columns.
class EnergyResampler {
 public:
  EnergyResampler(const DataBlock& block, const SignalEstimate& estimate);

  double row_energy(Engine& rng) const;
  double column_energy(Engine& rng) const;

  bool with_replacement() const { return with_replacement_; }

 private:
  double draw(const Matrix& projected, Engine& rng) const;

  Index rank_;
  bool with_replacement_;
  Matrix row_projected_;     // X V_perp  (d x m)
  Matrix column_projected_;  // X^T U_perp (n x m)
};

/// Column indices drawn for one replicate (exposed for tests).
std::vector<Index> draw_columns(Index available, Index count, Engine& rng);

/// R paired replicates (one row and one column draw each) from per-replicate
/// substreams of `streams`; deterministic given the streams.
PerturbationBound estimate_wedin_bound(const DataBlock& block, const SignalEstimate& estimate,
                                       const PipelineConfig& config, const RandomStreams& streams);

/// The bound with the true noise matrix in the numerator (no resampling).
double exact_wedin_bound(const Matrix& noise, const SignalEstimate& estimate);

}  // namespace jive
