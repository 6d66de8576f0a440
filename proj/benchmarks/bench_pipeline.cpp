#include <benchmark/benchmark.h>

#include <jive.hpp>

namespace {

using namespace jive;

DataBlock toy_block(Index which) {
  return generate_toy(1).blocks[static_cast<std::size_t>(which)];
}

void BM_InitialSvd(benchmark::State& state) {
  const Index d = state.range(0);
  const Index n = state.range(1);
  Engine rng = RandomStreams(7).engine(0);
  std::normal_distribution<double> g;
  Matrix x = Matrix::NullaryExpr(d, n, [&] { return g(rng); });
  DataBlock block;
  block.name = "bench";
  block.values = std::move(x);
  for (auto _ : state) benchmark::DoNotOptimize(initial_svd(block, 5));
}
BENCHMARK(BM_InitialSvd)->Args({100, 100})->Args({1000, 100})->Args({5000, 200})->Unit(benchmark::kMillisecond);

void BM_WedinResampling(benchmark::State& state) {
  const DataBlock block = toy_block(1);
  const SignalEstimate est = initial_svd(block, 3);
  PipelineConfig config;
  config.n_resamples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_wedin_bound(block, est, config, RandomStreams(1)));
}
BENCHMARK(BM_WedinResampling)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ToyPipeline(benchmark::State& state) {
  const auto toy = generate_toy(1);
  PipelineConfig config;
  config.initial_ranks = {2, 3};
  config.rng_seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(toy.blocks, config));
}
BENCHMARK(BM_ToyPipeline)->Unit(benchmark::kMillisecond);

void BM_RandomPipeline(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  RandomInstanceSpec spec{.objects = 200, .joint_rank = 2, .noise_level = 0.1};
  for (std::size_t k = 0; k < K; ++k) {
    spec.features.push_back(300);
    spec.individual_ranks.push_back(2);
  }
  const auto inst = generate_random_instance(spec, 3);
  PipelineConfig config;
  config.initial_ranks.assign(K, 4);
  config.n_resamples = 200;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(inst.blocks, config));
}
BENCHMARK(BM_RandomPipeline)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
