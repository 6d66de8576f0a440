#include "commands.hpp"

#include <cstdio>
#include <ostream>

#include "jive.hpp"

namespace jive::cli {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

PipelineConfig resolve_config(const RunOptions& o) {
  PipelineConfig config = o.config ? load_config(*o.config) : PipelineConfig{};
  if (o.seed) config.rng_seed = *o.seed;
  if (o.criterion) config.criterion = criterion_from_string(*o.criterion);
  if (o.quantile) config.threshold_quantile = *o.quantile;
  if (o.resamples) config.n_resamples = *o.resamples;
  if (o.ranks) config.initial_ranks.assign(o.ranks->begin(), o.ranks->end());
  if (o.ci) {
    if (o.ci->size() != 2) throw ValidationError("ci: expected two levels, e.g. --ci 0.05 0.95");
    config.ci_quantiles = {(*o.ci)[0], (*o.ci)[1]};
  }
  if (o.center) config.center_rows = true;
  if (config.initial_ranks.empty()) {
    throw ValidationError("initial_ranks: none given (use --ranks or the config file; "
                          "`jive scree` helps choose them)");
  }
  validate_config(config);
  return config;
}

void summarize(const PipelineResult& r, std::ostream& out) {
  const auto& seg = r.segmentation;
  out << "criterion: " << to_string(seg.criterion) << "\n";
  out << "squared singular values:";
  for (double s : seg.squared_singular_values) out << ' ' << fmt("%.4f", s);
  out << "\n";
  if (seg.principal_angles_deg) {
    out << "principal angles (deg):";
    for (double a : *seg.principal_angles_deg) out << ' ' << fmt("%.2f", a);
    out << "\n";
  }
  if (r.angle_threshold) {
    out << "angle bound (deg): " << fmt("%.2f", r.angle_threshold->value) << " ["
        << fmt("%.2f", r.angle_threshold->ci.first) << ", "
        << fmt("%.2f", r.angle_threshold->ci.second) << "]\n";
  }
  out << "sigma^2 threshold: " << fmt("%.4f", r.sv_threshold.value) << " ["
      << fmt("%.4f", r.sv_threshold.ci.first) << ", " << fmt("%.4f", r.sv_threshold.ci.second)
      << "]\n";
  out << "provisional joint rank: " << seg.provisional_joint_rank << "\n";
  const auto& dec = r.decomposition;
  out << "joint rank: " << dec.joint_rank << "\n";
  for (std::size_t k = 0; k < dec.blocks(); ++k) {
    out << "individual rank " << r.blocks[k].name << ": " << dec.individual_ranks[k] << "\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

}  // namespace

int run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const PipelineConfig config = resolve_config(o);
    const MultiBlock blocks = load_blocks(o.blocks, config);
    const PipelineResult result = run_pipeline(blocks, config);
    write_outputs(result, o.out);
    if (!o.quiet) {
      summarize(result, out);
      out << "outputs written to " << o.out.string() << "\n";
    }
    return result.decomposition.joint_rank == 0 ? 2 : 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int scree(const ScreeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const DataBlock block = load_block(o.block);
    validate_block(block);
    const Vector s = linalg::singular_values(block.values);
    out << "# " << block.name << ": " << block.features() << " x " << block.objects() << "\n";
    out << "index,singular_value,ratio_to_next\n";
    const Index shown = o.show > 0 ? std::min<Index>(o.show, s.size()) : s.size();
    for (Index i = 0; i < shown; ++i) {
      out << i + 1 << ',' << fmt("%.10g", s(i)) << ',';
      if (i + 1 < s.size() && s(i + 1) > 0.0) {
        out << fmt("%.6g", s(i) / s(i + 1));
      } else {
        out << "nan";
      }
      out << "\n";
    }
    // The trailing singular values of a noise matrix fall towards zero, so
    // unrestricted ratios peak at the tail; look at the leading half only.
    const Index limit = o.max_rank > 0 ? o.max_rank : std::max<Index>(1, s.size() / 2);
    const Index gap = largest_relative_gap_rank(s, limit);
    out << "# largest relative gap after component " << gap
        << " (heuristic only; inspect the spectrum)\n";
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int toygen(const ToygenOptions& o, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create " + o.out.string() + ": " + ec.message());
    const SyntheticInstance toy = generate_toy(o.seed);
    for (std::size_t k = 0; k < toy.blocks.size(); ++k) {
      const std::string& name = toy.blocks[k].name;
      save_block(toy.blocks[k], o.out / (name + ".csv"));
      write_matrix_csv(o.out / ("truth_joint_" + name + ".csv"), toy.truth.joint[k]);
      write_matrix_csv(o.out / ("truth_individual_" + name + ".csv"), toy.truth.individual[k]);
      write_matrix_csv(o.out / ("truth_individual_scores_" + name + ".csv"),
                       toy.truth.individual_scores[k]);
    }
    write_matrix_csv(o.out / "truth_joint_scores.csv", toy.truth.joint_scores);
    out << "toy blocks written to " << o.out.string() << " (suggested ranks: 2 3)\n";
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace jive::cli
