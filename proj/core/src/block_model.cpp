#include "jive/block_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "json.hpp"

#include "jive/error.hpp"

namespace jive {
namespace {

using json = nlohmann::json;

std::string block_tag(std::size_t k, const std::string& name) {
  std::string tag = "block " + std::to_string(k + 1);
  if (!name.empty()) tag += " ('" + name + "')";
  return tag;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate_block(const DataBlock& block) {
  const std::string who = block.name.empty() ? std::string("block") : "block '" + block.name + "'";
  if (block.values.rows() < 1) throw ValidationError(who + ": needs at least one feature row");
  if (block.values.cols() < 2) throw ValidationError(who + ": needs at least two object columns");
  if (!block.values.allFinite()) throw ValidationError(who + ": contains NaN or Inf");
  if (!block.object_labels.empty() &&
      static_cast<Index>(block.object_labels.size()) != block.values.cols()) {
    throw ValidationError(who + ": " + std::to_string(block.object_labels.size()) +
                          " object labels for " + std::to_string(block.values.cols()) + " columns");
  }
  if (!block.feature_labels.empty() &&
      static_cast<Index>(block.feature_labels.size()) != block.values.rows()) {
    throw ValidationError(who + ": " + std::to_string(block.feature_labels.size()) +
                          " feature labels for " + std::to_string(block.values.rows()) + " rows");
  }
}

std::vector<std::string> positional_object_labels(Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  char buf[32];
  for (Index j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof buf, "obj_%04lld", static_cast<long long>(j + 1));
    labels.emplace_back(buf);
  }
  return labels;
}

MultiBlock::MultiBlock(std::vector<DataBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.size() < 2) {
    throw ValidationError("at least two data blocks are required, got " +
                          std::to_string(blocks_.size()));
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].name.empty()) blocks_[k].name = "block" + std::to_string(k + 1);
    validate_block(blocks_[k]);
  }
  n_ = blocks_.front().values.cols();
  for (std::size_t k = 1; k < blocks_.size(); ++k) {
    if (blocks_[k].values.cols() != n_) {
      throw ValidationError("dimension mismatch: " + block_tag(k, blocks_[k].name) + " has " +
                            std::to_string(blocks_[k].values.cols()) + " columns, " +
                            block_tag(0, blocks_[0].name) + " has " + std::to_string(n_));
    }
  }
  const std::vector<std::string>* reference = nullptr;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& labels = blocks_[k].object_labels;
    if (labels.empty()) continue;
    if (reference == nullptr) {
      reference = &labels;
    } else if (labels != *reference) {
      throw ValidationError("object labels of " + block_tag(k, blocks_[k].name) +
                            " disagree with earlier blocks");
    }
  }
}

std::vector<std::string> MultiBlock::object_labels() const {
  for (const auto& b : blocks_) {
    if (!b.object_labels.empty()) return b.object_labels;
  }
  return positional_object_labels(n_);
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::multi_block_singular_value:
      return "multi_block_singular_value";
    case Criterion::two_block_angle:
      return "two_block_angle";
  }
  return "unknown";
}

Criterion criterion_from_string(std::string_view s) {
  if (s == "multi_block_singular_value") return Criterion::multi_block_singular_value;
  if (s == "two_block_angle") return Criterion::two_block_angle;
  throw ValidationError("unknown criterion '" + std::string(s) +
                        "' (expected multi_block_singular_value or two_block_angle)");
}

void validate_config(const PipelineConfig& config) {
  if (config.n_resamples < 1) throw ValidationError("n_resamples must be positive");
  if (!(config.threshold_quantile > 0.0 && config.threshold_quantile < 1.0)) {
    throw ValidationError("threshold_quantile must lie in (0, 1)");
  }
  const auto [lo, hi] = config.ci_quantiles;
  if (!(lo > 0.0 && lo < 1.0 && hi > 0.0 && hi < 1.0)) {
    throw ValidationError("ci_quantiles must lie in (0, 1)");
  }
  for (std::size_t k = 0; k < config.initial_ranks.size(); ++k) {
    if (config.initial_ranks[k] < 1) {
      throw ValidationError("initial rank for block " + std::to_string(k + 1) + " must be positive");
    }
  }
}

void validate_config(const PipelineConfig& config, const MultiBlock& blocks) {
  validate_config(config);
  if (config.initial_ranks.size() != blocks.size()) {
    throw ValidationError("initial_ranks has " + std::to_string(config.initial_ranks.size()) +
                          " entries for " + std::to_string(blocks.size()) + " blocks");
  }
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    const Index limit = std::min(b.features(), b.objects());
    if (config.initial_ranks[k] > limit) {
      throw ValidationError(block_tag(k, b.name) + ": initial rank " +
                            std::to_string(config.initial_ranks[k]) + " exceeds min(d, n) = " +
                            std::to_string(limit));
    }
  }
  if (config.criterion == Criterion::two_block_angle && blocks.size() != 2) {
    throw ValidationError("criterion two_block_angle requires exactly 2 blocks, got " +
                          std::to_string(blocks.size()));
  }
}

PipelineConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");

  static const std::vector<std::string> known = {"initial_ranks", "center_rows", "n_resamples",
                                                 "threshold_quantile", "ci_quantiles",
                                                 "criterion", "rng_seed"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("config: unknown field '" + key + "'");
    }
  }

  PipelineConfig config;
  try {
    if (doc.contains("initial_ranks")) {
      for (const auto& r : doc.at("initial_ranks")) {
        if (!r.is_number_integer()) throw ValidationError("config: initial_ranks must be integers");
        config.initial_ranks.push_back(r.get<Index>());
      }
    }
    if (doc.contains("center_rows")) config.center_rows = doc.at("center_rows").get<bool>();
    if (doc.contains("n_resamples")) config.n_resamples = doc.at("n_resamples").get<int>();
    if (doc.contains("threshold_quantile")) {
      config.threshold_quantile = doc.at("threshold_quantile").get<double>();
    }
    if (doc.contains("ci_quantiles")) {
      const auto& ci = doc.at("ci_quantiles");
      if (!ci.is_array() || ci.size() != 2) {
        throw ValidationError("config: ci_quantiles must be a pair of numbers");
      }
      config.ci_quantiles = {ci[0].get<double>(), ci[1].get<double>()};
    }
    if (doc.contains("criterion")) {
      config.criterion = criterion_from_string(doc.at("criterion").get<std::string>());
    }
    if (doc.contains("rng_seed")) config.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  validate_config(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const PipelineConfig& config) {
  json doc;
  doc["initial_ranks"] = config.initial_ranks;
  doc["center_rows"] = config.center_rows;
  doc["n_resamples"] = config.n_resamples;
  doc["threshold_quantile"] = config.threshold_quantile;
  doc["ci_quantiles"] = {config.ci_quantiles.first, config.ci_quantiles.second};
  doc["criterion"] = to_string(config.criterion);
  doc["rng_seed"] = config.rng_seed;
  return doc.dump(2);
}

DataBlock load_block(const std::filesystem::path& path, std::string name,
                     const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw IoError(path.string() + ": empty file");

  char delim = options.delimiter;
  if (delim == 0) {
    const auto& first = lines.front();
    delim = (first.find('\t') != std::string::npos && first.find(',') == std::string::npos) ? '\t'
                                                                                            : ',';
  }

  std::vector<std::vector<std::string_view>> cells;
  cells.reserve(lines.size());
  for (const auto& line : lines) cells.push_back(split(line, delim));

  double scratch = 0.0;
  const auto numeric = [&](std::string_view c) { return parse_double(c, scratch); };

  // Header row: any non-numeric cell after the first one.
  const auto& first = cells.front();
  bool header = std::any_of(first.begin() + 1, first.end(), [&](auto c) { return !numeric(c); });
  if (!header && first.size() == 1) header = !numeric(first.front());
  const std::size_t body_begin = header ? 1 : 0;
  if (body_begin >= cells.size()) throw IoError(path.string() + ": no data rows");

  bool feature_column = false;
  for (std::size_t i = body_begin; i < cells.size(); ++i) {
    if (!numeric(cells[i].front())) {
      feature_column = true;
      break;
    }
  }

  const std::size_t width = cells[body_begin].size();
  const std::size_t n = width - (feature_column ? 1 : 0);
  const std::size_t d = cells.size() - body_begin;
  if (n == 0) throw IoError(path.string() + ": no numeric columns");

  DataBlock block;
  block.name = name.empty() ? path.stem().string() : std::move(name);
  block.values.resize(static_cast<Index>(d), static_cast<Index>(n));

  for (std::size_t i = body_begin; i < cells.size(); ++i) {
    const auto& row = cells[i];
    if (row.size() != width) {
      throw IoError(path.string() + ": line " + std::to_string(i + 1) + " has " +
                    std::to_string(row.size()) + " cells, expected " + std::to_string(width));
    }
    const std::size_t offset = feature_column ? 1 : 0;
    if (feature_column) block.feature_labels.emplace_back(trim(row.front()));
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (!parse_double(row[j + offset], v)) {
        throw IoError(path.string() + ": non-numeric cell '" + std::string(row[j + offset]) +
                      "' at line " + std::to_string(i + 1) + ", column " +
                      std::to_string(j + offset + 1));
      }
      block.values(static_cast<Index>(i - body_begin), static_cast<Index>(j)) = v;
    }
  }

  if (header) {
    std::size_t skip = 0;
    if (first.size() == n + 1) {
      skip = 1;
    } else if (first.size() != n) {
      throw IoError(path.string() + ": header has " + std::to_string(first.size()) +
                    " cells for " + std::to_string(n) + " data columns");
    }
    for (std::size_t j = skip; j < first.size(); ++j) block.object_labels.emplace_back(trim(first[j]));
  }

  validate_block(block);
  return block;
}

MultiBlock load_blocks(const std::vector<std::filesystem::path>& paths,
                       const std::optional<PipelineConfig>& config, const CsvOptions& options) {
  if (paths.size() < 2) {
    throw ValidationError("at least two block files are required, got " +
                          std::to_string(paths.size()));
  }
  std::vector<std::future<DataBlock>> pending;
  pending.reserve(paths.size());
  for (const auto& p : paths) {
    pending.push_back(std::async(std::launch::async, [&p, &options] {
      return load_block(p, {}, options);
    }));
  }
  std::vector<DataBlock> blocks;
  blocks.reserve(paths.size());
  for (auto& f : pending) blocks.push_back(f.get());

  MultiBlock multi(std::move(blocks));
  if (config) validate_config(*config, multi);
  return multi;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& column_labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const bool rows = !row_labels.empty();
  if (!column_labels.empty()) {
    if (rows) out << "feature,";
    for (std::size_t j = 0; j < column_labels.size(); ++j) {
      if (j) out << ',';
      out << column_labels[j];
    }
    out << '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    if (rows) out << row_labels[static_cast<std::size_t>(i)] << ',';
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void save_block(const DataBlock& block, const std::filesystem::path& path) {
  write_matrix_csv(path, block.values, block.feature_labels, block.object_labels);
}

MultiBlock center_rows(const MultiBlock& blocks) {
  std::vector<DataBlock> centered(blocks.blocks());
  for (auto& b : centered) {
    const Vector means = b.values.rowwise().mean();
    b.values.colwise() -= means;
  }
  return MultiBlock(std::move(centered));
}

Index largest_relative_gap_rank(const Vector& spectrum, Index max_rank) {
  Index positive = 0;
  while (positive < spectrum.size() && spectrum(positive) > 0.0) ++positive;
  Index limit = positive - 1;
  if (max_rank > 0) limit = std::min(limit, max_rank);
  Index best = 0;
  double best_ratio = 0.0;
  for (Index r = 1; r <= limit; ++r) {
    const double ratio = spectrum(r - 1) / spectrum(r);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = r;
    }
  }
  return best;
}

}  // namespace jive
