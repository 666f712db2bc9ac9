#pragma once

#include <string>

#include "codemin/chromosome.hpp"
#include "codemin/rng.hpp"
#include "codemin/topology.hpp"

namespace codemin {

enum class BaselineMethod { Minimal1, Minimal2 };

const char* to_string(BaselineMethod m);
BaselineMethod parse_baseline_method(const std::string& s);

struct BaselineResult {
  int coding_links = 0;
  Chromosome chromosome;  // on layout_of(g)
  int links_kept = 0;     // original links surviving subgraph selection
};

/// Randomized greedy reference in two stages: remove whole links in random
/// order while every sink keeps max-flow >= R, then remove inter-aux links of
/// the remaining subgraph in random order while feasible.
BaselineResult minimal1(const MulticastInstance& g, Rng& rng);

/// Randomized greedy reference on the full decomposition: remove inter-aux
/// links in random order while feasible.
BaselineResult minimal2(const MulticastInstance& g, Rng& rng);

BaselineResult run_baseline(BaselineMethod m, const MulticastInstance& g, Rng& rng);

}  // namespace codemin
