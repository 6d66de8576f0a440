#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jive/linalg.hpp"

namespace jive {

/// One d_k x n data block. Rows are features, columns are the data objects
/// shared by every block.
struct DataBlock {
  std::string name;
  Matrix values;
  std::vector<std::string> feature_labels;  // empty when absent
  std::vector<std::string> object_labels;   // empty when absent

  Index features() const { return values.rows(); }
  Index objects() const { return values.cols(); }
};

/// Throws ValidationError unless d >= 1, n >= 2, entries finite and label
/// lengths match.
void validate_block(const DataBlock& block);

/// Positional object labels "obj_0001", ... used when a block has none.
std::vector<std::string> positional_object_labels(Index n);

/// K >= 2 validated blocks sharing n columns. Immutable after construction.
class MultiBlock {
 public:
  explicit MultiBlock(std::vector<DataBlock> blocks);

  std::size_t size() const { return blocks_.size(); }
  Index objects() const { return n_; }
  const DataBlock& operator[](std::size_t k) const { return blocks_[k]; }
  const std::vector<DataBlock>& blocks() const { return blocks_; }
  auto begin() const { return blocks_.begin(); }
  auto end() const { return blocks_.end(); }

  /// Object labels of the first block that has them, else positional labels.
  std::vector<std::string> object_labels() const;

 private:
  std::vector<DataBlock> blocks_;
  Index n_ = 0;
};

enum class Criterion { multi_block_singular_value, two_block_angle };

std::string_view to_string(Criterion c);
Criterion criterion_from_string(std::string_view s);

struct PipelineConfig {
  std::vector<Index> initial_ranks;
  bool center_rows = false;
  int n_resamples = 1000;
  double threshold_quantile = 0.5;
  std::pair<double, double> ci_quantiles{0.05, 0.95};
  Criterion criterion = Criterion::multi_block_singular_value;
  std::uint64_t rng_seed = 0;
};

/// Field-level checks that do not need the data.
void validate_config(const PipelineConfig& config);
/// Full check against the blocks: rank count, r_k <= min(d_k, n), criterion
/// vs K. Messages cite the offending block by 1-based index and name.
void validate_config(const PipelineConfig& config, const MultiBlock& blocks);

/// JSON document whose keys mirror the PipelineConfig field names.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

struct CsvOptions {
  /// 0 selects automatically: tab when the first line has tabs but no commas.
  char delimiter = 0;
};

/// Reads one delimited-text matrix. A header row of object labels and a
/// first column of feature labels are detected by non-numeric cells.
DataBlock load_block(const std::filesystem::path& path, std::string name = {},
                     const CsvOptions& options = {});

/// Loads K >= 2 files (concurrently) and validates them as a MultiBlock. When
/// `config` is given its ranks are validated against the loaded shapes.
MultiBlock load_blocks(const std::vector<std::filesystem::path>& paths,
                       const std::optional<PipelineConfig>& config = std::nullopt,
                       const CsvOptions& options = {});

/// Writes a matrix as CSV with 17 significant digits. Labels are written
/// only when non-empty.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& row_labels = {},
                      const std::vector<std::string>& column_labels = {});

void save_block(const DataBlock& block, const std::filesystem::path& path);

/// Subtracts each row's mean from every block.
MultiBlock center_rows(const MultiBlock& blocks);

/// Heuristic only: index r (1-based rank) maximizing sigma_r / sigma_{r+1}
/// over the strictly positive part of a descending spectrum. Returns 0 when
/// no ratio is defined.
Index largest_relative_gap_rank(const Vector& spectrum, Index max_rank = -1);

}  // namespace jive
