#include <cmath>
#include <set>

#include "codemin/error.hpp"
#include "codemin/ga.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace codemin;

namespace {

std::vector<Fitness> fits(std::initializer_list<int> v) {
  std::vector<Fitness> out;
  for (int x : v) out.push_back(x < 0 ? Fitness::infeasible() : Fitness::finite(x));
  return out;
}

}  // namespace

TEST_SUITE("ga") {

TEST_CASE("parameter defaults and validation") {
  const GAParams block = GAParams::defaults(Representation::BlockWise);
  CHECK(block.population_size == 150);
  CHECK(block.generations == 1000);
  CHECK(block.tournament_size == 100);
  CHECK(block.mutation_rate == doctest::Approx(0.012));
  CHECK(block.crossover_probability == doctest::Approx(0.8));
  const GAParams bit = GAParams::defaults(Representation::BitWise);
  CHECK(bit.tournament_size == 10);
  CHECK(bit.mutation_rate == doctest::Approx(0.006));

  GAParams p;
  p.tournament_size = 200;
  CHECK_THROWS_AS(p.validate(), Error);
  p = GAParams{};
  p.mutation_rate = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);

  const Layout l = layout_of(fixture::butterfly_prime());
  const GAParams s = GAParams::scaled(Representation::BlockWise, 20, 30, l);
  CHECK(s.tournament_size == 13);
  CHECK(s.mutation_rate == doctest::Approx(0.3));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("initial population starts with the all-one chromosome") {
  const Layout l = layout_of(fixture::butterfly_prime());
  GAParams p;
  p.population_size = 2;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto pop = init_population(l, p, rng);
    REQUIRE(pop.size() == 2);
    CHECK(pop[0] == Chromosome::all_one(l));
    CHECK(is_block_valid(pop[1], l));
  }
}

TEST_CASE("tournament selection") {
  Rng rng(1);
  // a tournament of 100 draws contains the global best with overwhelming probability
  const auto f = fits({5, 3, -1, 1, 4});
  for (int i = 0; i < 50; ++i) {
    for (int w : tournament_select(f, 100, rng)) CHECK(w == 3);
  }
  // N=2, one infeasible: with size 2 the feasible one wins whenever drawn
  const auto two = fits({-1, 2});
  long feasible_wins = 0;
  for (int i = 0; i < 1000; ++i)
    for (int w : tournament_select(two, 2, rng)) feasible_wins += w == 1;
  CHECK(feasible_wins == doctest::Approx(2000 * 0.75).epsilon(0.08));
  // ties go to the lowest index
  const auto tie = fits({2, 2, 2});
  for (int i = 0; i < 100; ++i)
    for (int w : tournament_select(tie, 3, rng)) CHECK(w <= 2);
  // size 1 is uniform
  std::vector<long> counts(5, 0);
  for (int i = 0; i < 20000; ++i)
    for (int w : tournament_select(f, 1, rng)) ++counts[w];
  CHECK(oracle::chi_square_uniform(counts) < oracle::chi_square_critical(4));
}

TEST_CASE("selection pressure lowers the mean") {
  Rng rng(2);
  std::vector<Fitness> f;
  double mean = 0;
  for (int i = 0; i < 50; ++i) {
    f.push_back(Fitness::finite(static_cast<int>(rng.below(20))));
    mean += f.back().count();
  }
  mean /= 50;
  double winners = 0;
  long n = 0;
  for (int i = 0; i < 200; ++i) {
    for (int w : tournament_select(f, 3, rng)) {
      winners += f[w].count();
      ++n;
    }
  }
  CHECK(winners / n < mean);
}

TEST_CASE("crossover preserves per-position contents") {
  Rng rng(3);
  const auto g = fixture::small_acyclic(rng);
  const Layout l = layout_of(g);
  for (Representation repr : {Representation::BlockWise, Representation::BitWise}) {
    for (int i = 0; i < 200; ++i) {
      const Chromosome a = sample_chromosome(l, repr, rng);
      const Chromosome b = sample_chromosome(l, repr, rng);
      const auto [x, y] = crossover(a, b, l, repr, 0.8, rng);
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(std::multiset<int>{a[k], b[k]} == std::multiset<int>{x[k], y[k]});
      }
      if (repr == Representation::BlockWise) {
        CHECK(is_block_valid(x, l));
        CHECK(is_block_valid(y, l));
        for (const Block& blk : l.blocks()) {
          const bool kept = std::equal(x.block(blk).begin(), x.block(blk).end(), a.block(blk).begin());
          const bool swapped = std::equal(x.block(blk).begin(), x.block(blk).end(), b.block(blk).begin());
          CHECK((kept || swapped));
        }
      }
      const auto [p, q] = crossover(a, a, l, repr, 1.0, rng);
      CHECK(p == a);
      CHECK(q == a);
    }
  }
}

TEST_CASE("block swap frequency is one half") {
  const Layout l = layout_of(fixture::butterfly_prime());
  Rng rng(4);
  const Chromosome a = Chromosome::all_one(l);
  const Chromosome b(l.bit_count());
  long swaps = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    Chromosome x = a, y = b;
    exchange(x, y, l, Representation::BlockWise, rng);
    swaps += x[l.block(2).offset] == 0;
  }
  const double sigma = std::sqrt(trials * 0.25);
  CHECK(std::abs(swaps - trials * 0.5) < 4 * sigma);
}

TEST_CASE("mutation") {
  Rng rng(5);
  const auto g = fixture::small_acyclic(rng);
  const Layout l = layout_of(g);
  for (Representation repr : {Representation::BlockWise, Representation::BitWise}) {
    const Chromosome c = sample_chromosome(l, repr, rng);
    CHECK(mutate(c, l, repr, 0.0, rng) == c);
  }
  for (int i = 0; i < 500; ++i) {
    const Chromosome c = sample_chromosome(l, Representation::BlockWise, rng);
    const Chromosome m = mutate(c, l, Representation::BlockWise, 0.3, rng);
    CHECK(is_block_valid(m, l));
  }
  // with rate 1 every block changes, to each other string equally often
  std::vector<std::uint8_t> block(3);
  write_block_string(block, 2);
  std::vector<long> counts(5, 0);
  for (int i = 0; i < 40000; ++i) {
    std::vector<std::uint8_t> v = block;
    mutate_block(v, Representation::BlockWise, 1.0, rng);
    ++counts[*block_string_index(v)];
  }
  CHECK(counts[2] == 0);
  counts.erase(counts.begin() + 2);
  CHECK(oracle::chi_square_uniform(counts) < oracle::chi_square_critical(3));

  std::vector<std::uint8_t> invalid{1, 1, 0};
  CHECK_THROWS_AS(mutate_block(invalid, Representation::BlockWise, 1.0, rng), Error);
}

TEST_CASE("block-wise mutation flips 4k^2/((k+1)(k+2)) alpha bits on average") {
  Rng rng(6);
  for (int k = 2; k <= 4; ++k) {
    const double alpha = 0.25;
    const int samples = 100000;
    double flips = 0;
    for (int i = 0; i < samples; ++i) {
      std::vector<std::uint8_t> v(k);
      write_block_string(v, static_cast<int>(rng.below(k + 2)));
      const auto before = v;
      mutate_block(v, Representation::BlockWise, alpha, rng);
      for (int j = 0; j < k; ++j) flips += v[j] != before[j];
    }
    const double expect = 4.0 * k * k / ((k + 1) * (k + 2)) * alpha;
    CHECK(flips / samples == doctest::Approx(expect).epsilon(0.03));
  }
}

TEST_CASE("greedy sweep") {
  const auto b = fixture::butterfly();
  const DecompositionEvaluator ev(b);
  const Chromosome swept = greedy_sweep(Chromosome::all_one(ev.layout()), ev);
  CHECK(ev.evaluate(swept) == Fitness::finite(1));
  CHECK(greedy_sweep(swept, ev) == swept);
  CHECK_THROWS_AS(greedy_sweep(Chromosome(2), ev), Error);

  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const auto g = fixture::small_acyclic(rng);
    const DecompositionEvaluator e(g);
    const Chromosome one = Chromosome::all_one(e.layout());
    const Chromosome z = greedy_sweep(one, e);
    CHECK(e.evaluate(z) <= e.evaluate(one));
    CHECK(e.evaluate(z).count() <= sweep_bound(g));
    // fixpoint: no single set bit can be cleared
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (!z[k]) continue;
      Chromosome t = z;
      t[k] = 0;
      CHECK_FALSE(e.feasible(t));
    }
  }
  CHECK(sweep_bound(b) == 8 * 4);
  CHECK(sweep_bound(b, 1) == 3 * 8 * 4);
}

TEST_CASE("evolve on the butterflies") {
  const auto b = fixture::butterfly();
  const auto bp = fixture::butterfly_prime();
  GAParams p = GAParams::scaled(Representation::BlockWise, 20, 30, layout_of(b));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    p.seed = seed;
    CHECK(evolve(b, p).best_fitness == Fitness::finite(1));
  }
  GAParams q = GAParams::scaled(Representation::BlockWise, 50, 100, layout_of(bp));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    q.seed = seed;
    const RunStats s = evolve(bp, q);
    CHECK(s.best_fitness == Fitness::finite(0));
    CHECK(s.best_fitness <= s.fitness_before_sweep);
  }
}

TEST_CASE("evolve is reproducible and tracks best-so-far") {
  Rng rng(12);
  const auto g = fixture::small_acyclic(rng);
  for (EvaluatorKind kind : {EvaluatorKind::Decomposition, EvaluatorKind::Algebraic}) {
    GAParams p = GAParams::scaled(Representation::BlockWise, 16, 15, layout_of(g));
    p.evaluator = kind;
    p.seed = 4;
    const RunStats a = evolve(g, p);
    p.threads = 3;
    const RunStats b = evolve(g, p);
    REQUIRE(a.generations.size() == 16);
    CHECK(a.best == b.best);
    for (std::size_t i = 0; i < a.generations.size(); ++i) {
      CHECK(a.generations[i].best == b.generations[i].best);
      CHECK(a.generations[i].mean == b.generations[i].mean);
      if (i > 0) CHECK(a.generations[i].best_so_far <= a.generations[i - 1].best_so_far);
      CHECK(a.generations[i].best_so_far <= a.generations[i].best);
    }
    CHECK(a.best_fitness <= a.fitness_before_sweep);
  }
}

TEST_CASE("evolve rejects unreachable rates") {
  const MulticastInstance g({"s", "a", "t"}, {{0, 0, 1}, {1, 1, 2}}, 0, {2}, 2);
  GAParams p;
  p.population_size = 4;
  p.tournament_size = 2;
  p.generations = 1;
  try {
    evolve(g, p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("generation plan draws selection then pairing flags") {
  const auto f = fits({3, 1, 2, -1});
  GAParams p;
  p.population_size = 4;
  p.tournament_size = 2;
  Rng a(77), b(77);
  const GenerationPlan plan = plan_generation(f, p, a);
  const auto selected = tournament_select(f, 2, b);
  CHECK(plan.selected == selected);
  REQUIRE(plan.crossover.size() == 2);
  for (auto flag : plan.crossover) CHECK(flag == (b.unit() < p.crossover_probability));
}

}  // TEST_SUITE
