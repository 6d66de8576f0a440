#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Non-iterative joint and individual variation explained"};
  app.require_subcommand(1);

  jive::cli::RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Decompose K >= 2 blocks sharing the same objects");
  run_cmd->add_option("blocks", run.blocks, "Block files (features x objects), in block order")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--config", run.config, "JSON config")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "RNG seed (overrides config)");
  run_cmd->add_option("--criterion", run.criterion,
                      "multi_block_singular_value | two_block_angle");
  run_cmd->add_option("--quantile", run.quantile, "Noise quantile for the threshold");
  run_cmd->add_option("--resamples", run.resamples, "Resampling replicates");
  run_cmd->add_option("--ranks", run.ranks, "Initial signal ranks, one per block");
  run_cmd->add_option("--ci", run.ci, "Two CI levels, e.g. 0.05 0.95")->expected(2);
  run_cmd->add_flag("--center", run.center, "Subtract row means first");
  run_cmd->add_flag("-q,--quiet", run.quiet, "No summary on stdout");

  jive::cli::ScreeOptions scree;
  auto* scree_cmd = app.add_subcommand("scree", "Print the singular value spectrum of a block");
  scree_cmd->add_option("block", scree.block, "Block file")->required()->check(CLI::ExistingFile);
  scree_cmd->add_option("--max-rank", scree.max_rank, "Largest rank the gap heuristic considers (default: half the spectrum)");
  scree_cmd->add_option("--show", scree.show, "Values to print (0 = all)")->capture_default_str();

  jive::cli::ToygenOptions toygen;
  auto* toy_cmd = app.add_subcommand("toygen", "Write the two-block toy example and its truth");
  toy_cmd->add_option("--seed", toygen.seed, "Noise seed")->capture_default_str();
  toy_cmd->add_option("--out", toygen.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) return jive::cli::run(run, std::cout, std::cerr);
  if (*scree_cmd) return jive::cli::scree(scree, std::cout, std::cerr);
  return jive::cli::toygen(toygen, std::cout, std::cerr);
}
