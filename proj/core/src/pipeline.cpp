#include "jive/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "json.hpp"

#include "jive/error.hpp"

namespace jive {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out), start_(Clock::now()) {}
  void lap(std::string stage) {
    const auto now = Clock::now();
    out_.push_back({std::move(stage),
                    std::chrono::duration<double, std::milli>(now - start_).count()});
    start_ = now;
  }

 private:
  std::vector<StageTiming>& out_;
  Clock::time_point start_;
};

std::string block_name(const MultiBlock& blocks, std::size_t k) {
  const auto& name = blocks[k].name;
  return name.empty() ? "block" + std::to_string(k + 1) : name;
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json pair_json(const std::pair<double, double>& p) { return json::array({p.first, p.second}); }

}  // namespace

PipelineResult run_pipeline(const MultiBlock& input, const PipelineConfig& config) {
  validate_config(config, input);
  const std::size_t svd_start = linalg::svd_call_count();
  std::vector<StageTiming> timing;
  StageClock clock(timing);

  MultiBlock blocks = config.center_rows ? center_rows(input) : input;
  if (config.center_rows) clock.lap("center");
  const std::size_t K = blocks.size();
  std::vector<std::string> warnings;
  auto note = [&](const std::vector<std::string>& ws, const std::string& prefix) {
    for (const auto& w : ws) warnings.push_back(prefix + w);
  };

  std::vector<SignalEstimate> estimates;
  estimates.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    estimates.push_back(initial_svd(blocks[k], config.initial_ranks[k], static_cast<Index>(k)));
    note(estimates.back().warnings, block_name(blocks, k) + ": ");
  }
  clock.lap("signal_extraction");

  const RandomStreams streams(config.rng_seed);
  std::vector<PerturbationBound> bounds;
  bounds.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    bounds.push_back(estimate_wedin_bound(blocks[k], estimates[k], config, streams.substream(k)));
    note(bounds.back().warnings, block_name(blocks, k) + ": ");
  }
  clock.lap("perturbation_bounds");

  const QuantileLevels levels{config.threshold_quantile, config.ci_quantiles};
  StackedScores stacked = stack_scores(estimates);
  ThresholdEstimate sv_threshold = multi_block_sv_threshold(bounds, levels);
  note(sv_threshold.warnings, "");
  std::optional<ThresholdEstimate> angle_threshold;
  if (K == 2) {
    angle_threshold = two_block_angle_threshold(bounds[0], bounds[1], levels);
    note(angle_threshold->warnings, "");
  }
  SegmentationDiagnostics segmentation =
      select_joint_rank(stacked, config.criterion, sv_threshold, angle_threshold);
  clock.lap("joint_segmentation");

  PruneResult pruned = prune_joint_components(blocks, estimates, segmentation.candidate_basis);
  JiveDecomposition decomposition = final_decomposition(blocks, estimates, pruned.joint_basis);
  decomposition.dropped = std::move(pruned.dropped);
  for (const auto& d : decomposition.dropped) {
    std::string names;
    for (Index b : d.failing_blocks) {
      names += (names.empty() ? "" : ", ") + block_name(blocks, static_cast<std::size_t>(b));
    }
    warnings.push_back("joint component " + std::to_string(d.component + 1) +
                       " dropped: projection norm below threshold in " + names);
  }
  if (decomposition.joint_rank == 0) {
    warnings.push_back("no joint component retained; all signal is individual");
  }
  clock.lap("decomposition");

  Representations representations = compute_representations(decomposition, blocks);
  clock.lap("representations");

  return PipelineResult{
      .config = config,
      .blocks = std::move(blocks),
      .estimates = std::move(estimates),
      .bounds = std::move(bounds),
      .stacked = std::move(stacked),
      .sv_threshold = std::move(sv_threshold),
      .angle_threshold = std::move(angle_threshold),
      .segmentation = std::move(segmentation),
      .decomposition = std::move(decomposition),
      .representations = std::move(representations),
      .warnings = std::move(warnings),
      .timing = std::move(timing),
      .svd_count = linalg::svd_call_count() - svd_start,
  };
}

std::string diagnostics_json(const PipelineResult& result, bool include_timing) {
  const MultiBlock& blocks = result.blocks;
  const std::size_t K = blocks.size();
  json doc;
  doc["config"] = json::parse(config_to_json(result.config));

  json scree = json::object();
  json wedin = json::object();
  for (std::size_t k = 0; k < K; ++k) {
    const std::string name = block_name(blocks, k);
    scree[name] = to_json(result.estimates[k].full_spectrum);
    const auto& b = result.bounds[k];
    std::vector<double> sorted = b.sin_theta_samples;
    std::sort(sorted.begin(), sorted.end());
    json summary = json::object();
    if (!sorted.empty()) {
      summary["min"] = sorted.front();
      summary["median"] = linalg::order_statistic(sorted, 0.5);
      summary["max"] = sorted.back();
    }
    wedin[name] = {
        {"sin_theta_median", b.sin_theta_hat},
        {"sin_theta_ci", pair_json(b.ci)},
        {"samples_summary", summary},
        {"n_resamples", b.replicates()},
    };
  }
  doc["scree"] = std::move(scree);
  doc["wedin"] = std::move(wedin);

  const auto& seg = result.segmentation;
  json segmentation = {
      {"criterion", std::string(to_string(seg.criterion))},
      {"squared_singular_values", seg.squared_singular_values},
      {"principal_angles_deg",
       seg.principal_angles_deg ? json(*seg.principal_angles_deg) : json(nullptr)},
      {"threshold", seg.threshold},
      {"threshold_ci", pair_json(seg.threshold_ci)},
      {"provisional_joint_rank", seg.provisional_joint_rank},
      {"sv_threshold", result.sv_threshold.value},
      {"sv_threshold_ci", pair_json(result.sv_threshold.ci)},
      {"angle_threshold_deg",
       result.angle_threshold ? json(result.angle_threshold->value) : json(nullptr)},
      {"angle_threshold_ci_deg",
       result.angle_threshold ? pair_json(result.angle_threshold->ci) : json(nullptr)},
      {"alternate_joint_rank",
       seg.alternate_joint_rank ? json(*seg.alternate_joint_rank) : json(nullptr)},
  };
  doc["segmentation"] = std::move(segmentation);

  const auto& dec = result.decomposition;
  json dropped = json::array();
  for (const auto& d : dec.dropped) {
    json failing = json::array();
    for (Index b : d.failing_blocks) failing.push_back(block_name(blocks, static_cast<std::size_t>(b)));
    dropped.push_back({{"component", d.component + 1}, {"failing_blocks", failing}});
  }
  json individual = json::object();
  json final_ranks = json::object();
  for (std::size_t k = 0; k < K; ++k) {
    individual[block_name(blocks, k)] = dec.individual_ranks[k];
    final_ranks[block_name(blocks, k)] = dec.signal_rank(k);
  }
  doc["decomposition"] = {
      {"joint_rank", dec.joint_rank},
      {"individual_ranks", individual},
      {"dropped_components", dropped},
      {"final_ranks", final_ranks},
  };
  doc["warnings"] = result.warnings;
  doc["svd_count"] = result.svd_count;
  if (include_timing) {
    json timing = json::object();
    double total = 0.0;
    for (const auto& t : result.timing) {
      timing[t.stage] = t.milliseconds;
      total += t.milliseconds;
    }
    timing["total"] = total;
    doc["timing"] = std::move(timing);
  }
  return doc.dump(2) + "\n";
}

void write_outputs(const PipelineResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const MultiBlock& blocks = result.blocks;
  const auto& dec = result.decomposition;
  const auto& rep = result.representations;
  bool labelled = false;
  for (const auto& b : blocks) labelled = labelled || !b.object_labels.empty();
  const std::vector<std::string> objects =
      labelled ? blocks.object_labels() : std::vector<std::string>{};

  auto component_labels = [](const std::string& prefix, Index count) {
    std::vector<std::string> out;
    for (Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
  };
  const bool headers = labelled;
  auto rows = [&](const std::string& prefix, Index count) {
    return headers ? component_labels(prefix, count) : std::vector<std::string>{};
  };

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string name = block_name(blocks, k);
    const auto& features = blocks[k].feature_labels;
    write_matrix_csv(out_dir / ("joint_" + name + ".csv"), dec.joint[k], features, objects);
    write_matrix_csv(out_dir / ("individual_" + name + ".csv"), dec.individual[k], features, objects);
    write_matrix_csv(out_dir / ("residual_" + name + ".csv"), dec.residual[k], features, objects);
    const auto& br = rep.blocks[k];
    write_matrix_csv(out_dir / ("bss_joint_" + name + ".csv"), br.bss_joint,
                     rows("joint_", br.bss_joint.rows()), objects);
    write_matrix_csv(out_dir / ("ins_" + name + ".csv"), br.ins,
                     rows("individual_", br.ins.rows()), objects);
    const std::vector<std::string> loading_cols =
        !features.empty() ? component_labels("cns_", br.cns_loadings.cols())
                          : std::vector<std::string>{};
    write_matrix_csv(out_dir / ("cns_loadings_" + name + ".csv"), br.cns_loadings, features,
                     loading_cols);
  }
  write_matrix_csv(out_dir / "cns.csv", rep.cns, rows("cns_", rep.cns.rows()), objects);

  std::ofstream out(out_dir / "diagnostics.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (out_dir / "diagnostics.json").string());
  out << diagnostics_json(result);
}

}  // namespace jive
