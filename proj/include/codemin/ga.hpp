#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "codemin/chromosome.hpp"
#include "codemin/evaluators.hpp"
#include "codemin/rng.hpp"
#include "codemin/topology.hpp"

namespace codemin {

enum class EvaluatorKind { Decomposition, Algebraic };

const char* to_string(EvaluatorKind k);
EvaluatorKind parse_evaluator_kind(const std::string& s);

struct GAParams {
  int population_size = 150;
  int generations = 1000;
  int tournament_size = 100;
  double crossover_probability = 0.8;
  double mutation_rate = 0.012;
  Representation representation = Representation::BlockWise;
  EvaluatorKind evaluator = EvaluatorKind::Decomposition;
  int field_bits = 16;
  int trials = 2;
  std::uint64_t seed = 1;
  int threads = 1;  // population evaluation workers; never affects results

  /// Experiment defaults: block-wise uses tournament 100 and rate 0.012,
  /// bit-wise tournament 10 and rate 0.006.
  static GAParams defaults(Representation repr);
  /// Defaults adapted to a smaller population and instance: the tournament
  /// keeps its fraction of the population (100/150 block-wise, 10/150
  /// bit-wise, at least 2) and the mutation rate is raised so that each
  /// chromosome sees at least 1.2 expected block (bit-wise: bit) mutations.
  static GAParams scaled(Representation repr, int population_size, int generations, const Layout& layout);
  void validate() const;  // throws Error(Invalid)
};

using Population = std::vector<Chromosome>;

struct GenerationStats {
  int generation = 0;
  Fitness best;                // best in this generation's population
  std::optional<double> mean;  // mean over feasible members; none if all infeasible
  int feasible = 0;
  Fitness best_so_far;
};

/// Per-generation summary; `best_index` receives the lowest index holding the
/// generation's best fitness.
GenerationStats summarize_generation(int generation, std::span<const Fitness> fitness,
                                     int* best_index = nullptr);

struct RunStats {
  std::vector<GenerationStats> generations;
  Chromosome best_before_sweep;
  Fitness fitness_before_sweep;
  Chromosome best;  // after the greedy sweep
  Fitness best_fitness;
  std::int64_t evaluations = 0;
  double wall_seconds = 0.0;
};

/// The all-one chromosome at index 0, then N-1 samples drawn per the
/// representation.
Population init_population(const Layout& l, const GAParams& params, Rng& rng);

/// Indices of N tournament winners. Each tournament draws tournament_size
/// indices uniformly with replacement and keeps the lowest fitness, ties to
/// the lowest index.
std::vector<int> tournament_select(std::span<const Fitness> fitness, int tournament_size, Rng& rng);

/// Selection plus pairing decisions for one generation. Winners are paired
/// in draw order (0,1), (2,3), ...; crossover[p] says whether pair p is
/// crossed. Shared by the centralized engine and the distributed source so
/// both consume identical random streams.
struct GenerationPlan {
  std::vector<int> selected;
  std::vector<std::uint8_t> crossover;
};

GenerationPlan plan_generation(std::span<const Fitness> fitness, const GAParams& params, Rng& rng);

/// Unconditional exchange: bit-wise swaps each bit, block-wise each whole
/// block, independently with probability 1/2.
void exchange(Chromosome& a, Chromosome& b, const Layout& l, Representation repr, Rng& rng);

/// Crosses the pair with probability p_c, otherwise returns it unchanged.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, const Layout& l,
                                            Representation repr, double p_c, Rng& rng);

/// Block-wise: each block, with probability alpha, becomes one of the other
/// k+1 allowed strings chosen uniformly. Bit-wise: each bit flips with
/// probability alpha.
Chromosome mutate(const Chromosome& c, const Layout& l, Representation repr, double alpha, Rng& rng);
void mutate_block(std::span<std::uint8_t> block, Representation repr, double alpha, Rng& rng);

/// Repeated left-to-right passes switching 1 -> 0 while the chromosome stays
/// feasible, until a pass changes nothing. Throws Error(Infeasible) if the
/// input is infeasible.
Chromosome greedy_sweep(const Chromosome& c, const DecompositionEvaluator& ev);

/// Coding-link bound after a greedy sweep: R^3 d^2 on acyclic networks,
/// (2B+1) R^3 d^2 with B the minimum feedback link set size otherwise.
std::int64_t sweep_bound(const MulticastInstance& g, int feedback_links = 0);

/// Generational GA with best-so-far tracking followed by a greedy sweep of
/// the best chromosome. Throws Error(Infeasible) when the target rate is
/// unreachable even with coding everywhere.
RunStats evolve(const MulticastInstance& g, const GAParams& params);

}  // namespace codemin
