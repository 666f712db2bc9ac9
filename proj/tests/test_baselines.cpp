#include <set>

#include "codemin/baselines.hpp"
#include "codemin/error.hpp"
#include "codemin/evaluators.hpp"
#include "codemin/ga.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace codemin;

TEST_SUITE("baselines") {

TEST_CASE("butterflies") {
  const auto b = fixture::butterfly();
  const auto bp = fixture::butterfly_prime();
  int best2 = 1;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (BaselineMethod m : {BaselineMethod::Minimal1, BaselineMethod::Minimal2}) {
      Rng r(seed);
      CHECK(run_baseline(m, b, r).coding_links == 1);
    }
    // every B' link but the parallel pair is essential for the max-flows, so
    // link removal always drops one z->w copy and leaves B
    Rng r1(seed);
    CHECK(minimal1(bp, r1).coding_links == 1);
    Rng r2(seed);
    const int links = minimal2(bp, r2).coding_links;
    CHECK(links <= 1);
    best2 = std::min(best2, links);
  }
  CHECK(best2 == 0);
}

TEST_CASE("minimal2 on B' ends at a minimal feasible configuration") {
  // every bit-minimal feasible chromosome of B' is reachable by some removal
  // order; check the outputs against that enumerated set
  const auto bp = fixture::butterfly_prime();
  const DecompositionEvaluator ev(bp);
  std::set<std::string> minimal;
  for (int mask = 0; mask < 256; ++mask) {
    Chromosome c(8);
    for (int i = 0; i < 8; ++i) c[i] = mask >> i & 1;
    if (!oracle::feasible(bp, ev.layout(), c)) continue;
    bool is_min = true;
    for (int i = 0; i < 8 && is_min; ++i) {
      if (!c[i]) continue;
      Chromosome t = c;
      t[i] = 0;
      is_min = !oracle::feasible(bp, ev.layout(), t);
    }
    if (is_min) minimal.insert(c.to_bitstring());
  }
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng r(seed);
    const auto res = minimal2(bp, r);
    CHECK(minimal.count(res.chromosome.to_bitstring()) == 1);
    CHECK(res.coding_links == oracle::coding_links(ev.layout(), res.chromosome));
  }
}

TEST_CASE("outputs are feasible, bounded, and no better than the optimum") {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const auto g = fixture::small_acyclic(rng, 10);
    const DecompositionEvaluator ev(g);
    const bool small = search_space_size(ev.layout(), Representation::BlockWise) <= 4096;
    const int opt = small ? oracle::blockwise_optimum(g, ev.layout()) : -1;
    for (BaselineMethod m : {BaselineMethod::Minimal1, BaselineMethod::Minimal2}) {
      Rng r(rng.next());
      const auto res = run_baseline(m, g, r);
      CHECK(oracle::feasible(g, ev.layout(), res.chromosome));
      CHECK(res.coding_links == count_coding_links(res.chromosome, ev.layout()));
      CHECK(res.coding_links <= sweep_bound(g));
      // the block-wise optimum is also the overall optimum: a feasible
      // chromosome stays feasible when each coding block is set to all ones
      // and every other block keeps at most one bit
      if (opt >= 0) CHECK(res.coding_links >= opt);
    }
  }
}

TEST_CASE("minimal1 keeps a subgraph and is reproducible") {
  GeneratorParams p;
  p.nodes = 20;
  p.links = 40;
  p.sinks = 4;
  p.rate = 2;
  const auto g = generate_random_instance(p);
  Rng a(3), b(3);
  const auto x = minimal1(g, a);
  const auto y = minimal1(g, b);
  CHECK(x.chromosome == y.chromosome);
  CHECK(x.links_kept <= g.link_count());
  CHECK(x.links_kept >= g.rate());
}

TEST_CASE("infeasible input is rejected") {
  const MulticastInstance g({"s", "a", "t"}, {{0, 0, 1}, {1, 1, 2}}, 0, {2}, 2);
  Rng r(1);
  CHECK_THROWS_AS(minimal1(g, r), Error);
  CHECK_THROWS_AS(minimal2(g, r), Error);
  CHECK(parse_baseline_method("minimal2") == BaselineMethod::Minimal2);
  CHECK_THROWS_AS(parse_baseline_method("minimal3"), Error);
}

}  // TEST_SUITE
