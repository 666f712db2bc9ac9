// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "codemin/distsim.hpp"
#include "codemin/evaluators.hpp"
#include "codemin/ga.hpp"

using namespace codemin;

namespace {

const MulticastInstance& instance() {
  static const MulticastInstance g = generate_random_instance({.nodes = 50, .links = 87, .sinks = 10, .rate = 5});
  return g;
}

std::vector<Chromosome> population(const Layout& l, int n) {
  Rng rng(1);
  std::vector<Chromosome> pop;
  for (int i = 0; i < n; ++i) pop.push_back(sample_chromosome(l, Representation::BlockWise, rng));
  return pop;
}

void BM_DecompositionSerial(benchmark::State& state) {
  const DecompositionEvaluator ev(instance());
  const auto pop = population(ev.layout(), 150);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_population_serial(ev, pop, 1));
}

void BM_DecompositionParallel(benchmark::State& state) {
  const DecompositionEvaluator ev(instance());
  const auto pop = population(ev.layout(), 150);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_population(ev, pop, 1, threads));
}

void BM_AlgebraicSerial(benchmark::State& state) {
  const AlgebraicEvaluator ev(instance());
  const auto pop = population(ev.layout(), 150);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_population_serial(ev, pop, 1));
}

void BM_AlgebraicParallel(benchmark::State& state) {
  const AlgebraicEvaluator ev(instance());
  const auto pop = population(ev.layout(), 150);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_population(ev, pop, 1, threads));
}

void BM_DistributedGeneration(benchmark::State& state) {
  GAParams p = GAParams::defaults(Representation::BlockWise);
  p.population_size = 50;
  p.tournament_size = 30;
  dist::Network net(instance(), p, {.threads = static_cast<int>(state.range(0))});
  net.optimize();
  net.run_generation(false);
  for (auto _ : state) benchmark::DoNotOptimize(net.run_generation(false));
}

}  // namespace

BENCHMARK(BM_DecompositionSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecompositionParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlgebraicSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlgebraicParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistributedGeneration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
