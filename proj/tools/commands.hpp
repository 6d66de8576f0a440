#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jive::cli {

struct RunOptions {
  std::vector<std::filesystem::path> blocks;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "jive_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> criterion;
  std::optional<double> quantile;
  std::optional<int> resamples;
  std::optional<std::vector<long>> ranks;
  std::optional<std::vector<double>> ci;
  bool center = false;
  bool quiet = false;
};

// Exit codes: 0 ok, 1 validation or IO failure, 2 no joint component.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct ScreeOptions {
  std::filesystem::path block;
  long max_rank = -1;
  long show = 20;
};

int scree(const ScreeOptions& options, std::ostream& out, std::ostream& err);

struct ToygenOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out = "toy";
};

int toygen(const ToygenOptions& options, std::ostream& out, std::ostream& err);

}  // namespace jive::cli
