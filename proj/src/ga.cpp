#include "codemin/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <unordered_map>

#include "codemin/error.hpp"

namespace codemin {

const char* to_string(EvaluatorKind k) {
  return k == EvaluatorKind::Decomposition ? "decomposition" : "algebraic";
}

EvaluatorKind parse_evaluator_kind(const std::string& s) {
  if (s == "decomposition" || s == "maxflow") return EvaluatorKind::Decomposition;
  if (s == "algebraic") return EvaluatorKind::Algebraic;
  throw Error(ErrorKind::Invalid, "unknown evaluator '" + s + "' (expected decomposition|algebraic)");
}

GAParams GAParams::defaults(Representation repr) {
  GAParams p;
  p.representation = repr;
  if (repr == Representation::BitWise) {
    p.tournament_size = 10;
    p.mutation_rate = 0.006;
  }
  return p;
}

GAParams GAParams::scaled(Representation repr, int population_size, int generations,
                          const Layout& layout) {
  GAParams p = defaults(repr);
  const GAParams ref;
  const double fraction = static_cast<double>(p.tournament_size) / ref.population_size;
  p.population_size = population_size;
  p.generations = generations;
  p.tournament_size = std::clamp(static_cast<int>(std::lround(fraction * population_size)), 2,
                                 std::max(2, population_size));
  const int units = repr == Representation::BlockWise ? layout.block_count() : layout.bit_count();
  if (units > 0) p.mutation_rate = std::min(1.0, std::max(p.mutation_rate, 1.2 / units));
  return p;
}

void GAParams::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Invalid, "GA parameters: " + m); };
  if (population_size < 2) fail("population size must be >= 2");
  if (generations < 0) fail("generations must be >= 0");
  if (tournament_size < 1 || tournament_size > population_size)
    fail("tournament size must lie in [1, population size]");
  if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0))
    fail("crossover probability must lie in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation rate must lie in [0, 1]");
  if (field_bits < 1 || field_bits > 16) fail("field bits must lie in [1, 16]");
  if (trials < 1) fail("trials must be >= 1");
}

Population init_population(const Layout& l, const GAParams& params, Rng& rng) {
  Population pop;
  pop.reserve(params.population_size);
  pop.push_back(Chromosome::all_one(l));
  for (int i = 1; i < params.population_size; ++i) {
    pop.push_back(sample_chromosome(l, params.representation, rng));
  }
  return pop;
}

std::vector<int> tournament_select(std::span<const Fitness> fitness, int tournament_size, Rng& rng) {
  const auto n = fitness.size();
  std::vector<int> winners(n);
  for (auto& w : winners) {
    int best = static_cast<int>(rng.below(n));
    for (int k = 1; k < tournament_size; ++k) {
      const int pick = static_cast<int>(rng.below(n));
      if (fitness[pick] < fitness[best] || (fitness[pick] == fitness[best] && pick < best)) {
        best = pick;
      }
    }
    w = best;
  }
  return winners;
}

GenerationPlan plan_generation(std::span<const Fitness> fitness, const GAParams& params, Rng& rng) {
  GenerationPlan plan;
  plan.selected = tournament_select(fitness, params.tournament_size, rng);
  plan.crossover.resize(plan.selected.size() / 2);
  for (auto& flag : plan.crossover) flag = rng.bernoulli(params.crossover_probability);
  return plan;
}

void exchange(Chromosome& a, Chromosome& b, const Layout& l, Representation repr, Rng& rng) {
  if (repr == Representation::BitWise) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (rng.below(2)) std::swap(a[i], b[i]);
    }
    return;
  }
  for (const Block& blk : l.blocks()) {
    if (!rng.below(2)) continue;
    auto x = a.block(blk);
    auto y = b.block(blk);
    std::swap_ranges(x.begin(), x.end(), y.begin());
  }
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, const Layout& l,
                                            Representation repr, double p_c, Rng& rng) {
  std::pair<Chromosome, Chromosome> out{a, b};
  if (rng.bernoulli(p_c)) exchange(out.first, out.second, l, repr, rng);
  return out;
}

void mutate_block(std::span<std::uint8_t> block, Representation repr, double alpha, Rng& rng) {
  if (repr == Representation::BitWise) {
    for (auto& bit : block) {
      if (rng.bernoulli(alpha)) bit ^= 1;
    }
    return;
  }
  if (!rng.bernoulli(alpha)) return;
  const auto current = block_string_index(block);
  if (!current) throw Error(ErrorKind::Invalid, "block-wise mutation on an invalid block string");
  const int k = static_cast<int>(block.size());
  int next = static_cast<int>(rng.below(k + 1));
  if (next >= *current) ++next;
  write_block_string(block, next);
}

Chromosome mutate(const Chromosome& c, const Layout& l, Representation repr, double alpha, Rng& rng) {
  Chromosome out = c;
  for (const Block& b : l.blocks()) mutate_block(out.block(b), repr, alpha, rng);
  return out;
}

Chromosome greedy_sweep(const Chromosome& c, const DecompositionEvaluator& ev) {
  if (!ev.feasible(c)) throw Error(ErrorKind::Infeasible, "greedy sweep needs a feasible chromosome");
  Chromosome z = c;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!z[i]) continue;
      z[i] = 0;
      if (ev.feasible(z)) {
        changed = true;
      } else {
        z[i] = 1;
      }
    }
  }
  return z;
}

std::int64_t sweep_bound(const MulticastInstance& g, int feedback_links) {
  const std::int64_t r = g.rate();
  const std::int64_t d = static_cast<std::int64_t>(g.sinks().size());
  return (2 * static_cast<std::int64_t>(feedback_links) + 1) * r * r * r * d * d;
}

GenerationStats summarize_generation(int generation, std::span<const Fitness> fitness,
                                     int* best_index) {
  GenerationStats gs;
  gs.generation = generation;
  int best = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (fitness[i] < fitness[best]) best = static_cast<int>(i);
    if (fitness[i].feasible()) {
      ++gs.feasible;
      sum += fitness[i].count();
    }
  }
  if (!fitness.empty()) gs.best = fitness[best];
  if (gs.feasible > 0) gs.mean = sum / gs.feasible;
  if (best_index) *best_index = best;
  return gs;
}

namespace {

// Evaluates a population, memoizing a deterministic evaluator's verdicts.
class PopulationEvaluator {
 public:
  PopulationEvaluator(const Evaluator& ev, int threads) : ev_(ev), threads_(threads) {}

  std::vector<Fitness> operator()(const Population& pop, std::uint64_t seed) {
    if (!ev_.deterministic()) {
      evaluations_ += static_cast<std::int64_t>(pop.size());
      return evaluate_population(ev_, pop, seed, threads_);
    }
    Population misses;
    std::vector<std::string> keys(pop.size());
    std::unordered_map<std::string, int> pending;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      auto bits = pop[i].bits();
      keys[i].assign(bits.begin(), bits.end());
      if (cache_.count(keys[i]) || pending.count(keys[i])) continue;
      pending.emplace(keys[i], static_cast<int>(misses.size()));
      misses.push_back(pop[i]);
    }
    const auto fresh = evaluate_population(ev_, misses, seed, threads_);
    evaluations_ += static_cast<std::int64_t>(misses.size());
    for (const auto& [key, idx] : pending) cache_.emplace(key, fresh[idx]);
    std::vector<Fitness> out;
    out.reserve(pop.size());
    for (const auto& k : keys) out.push_back(cache_.at(k));
    return out;
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const Evaluator& ev_;
  int threads_;
  std::unordered_map<std::string, Fitness> cache_;
  std::int64_t evaluations_ = 0;
};

}  // namespace

RunStats evolve(const MulticastInstance& g, const GAParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  const DecompositionEvaluator exact(g);
  const Layout& layout = exact.layout();
  const Chromosome all_one = Chromosome::all_one(layout);
  if (!exact.feasible(all_one)) {
    throw Error(ErrorKind::Infeasible, "target rate " + std::to_string(g.rate()) +
                                           " is not achievable even with coding at every node");
  }
  std::unique_ptr<Evaluator> algebraic;
  if (params.evaluator == EvaluatorKind::Algebraic) {
    algebraic = std::make_unique<AlgebraicEvaluator>(g, params.field_bits, params.trials);
  }
  const Evaluator& ev = algebraic ? *algebraic : static_cast<const Evaluator&>(exact);
  PopulationEvaluator evaluate(ev, params.threads);

  Rng init_rng(derive_seed(params.seed, kStreamInit));
  Rng select_rng(derive_seed(params.seed, kStreamSelect));
  Rng vary_rng(derive_seed(params.seed, kStreamVary));

  RunStats stats;
  Population pop = init_population(layout, params, init_rng);
  Chromosome best_so_far = all_one;
  Fitness best_fit = Fitness::infeasible();
  std::vector<Fitness> fitness;

  for (int gen = 0; gen <= params.generations; ++gen) {
    if (gen > 0) {
      const GenerationPlan plan = plan_generation(fitness, params, select_rng);
      Population next;
      next.reserve(pop.size());
      for (int idx : plan.selected) next.push_back(pop[idx]);
      for (std::size_t p = 0; p < plan.crossover.size(); ++p) {
        if (plan.crossover[p]) {
          exchange(next[2 * p], next[2 * p + 1], layout, params.representation, vary_rng);
        }
      }
      for (auto& c : next) {
        for (const Block& b : layout.blocks()) {
          mutate_block(c.block(b), params.representation, params.mutation_rate, vary_rng);
        }
      }
      pop = std::move(next);
    }
    fitness = evaluate(pop, derive_seed(params.seed, kStreamEval, static_cast<std::uint64_t>(gen)));

    int best_idx = 0;
    GenerationStats gs = summarize_generation(gen, fitness, &best_idx);
    if (fitness[best_idx] < best_fit) {
      best_fit = fitness[best_idx];
      best_so_far = pop[best_idx];
    }
    gs.best_so_far = best_fit;
    stats.generations.push_back(gs);
  }

  if (!best_fit.feasible()) {
    // randomized evaluator rejected everything; fall back to the known-feasible start
    best_so_far = all_one;
    best_fit = exact.evaluate(all_one);
  }
  stats.best_before_sweep = best_so_far;
  stats.fitness_before_sweep = best_fit;
  stats.best = greedy_sweep(best_so_far, exact);
  stats.best_fitness = exact.evaluate(stats.best);
  stats.evaluations = evaluate.evaluations();
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

}  // namespace codemin
