#pragma once

#include <string>
#include <vector>

#include "codemin/error.hpp"
#include "codemin/rng.hpp"
#include "codemin/topology.hpp"

namespace fixture {

inline std::string data_path(const std::string& name) { return std::string(CODEMIN_DATA_DIR) + "/" + name; }

inline codemin::MulticastInstance butterfly() { return codemin::load_topology(data_path("butterfly_B.json")); }
inline codemin::MulticastInstance butterfly_prime() {
  return codemin::load_topology(data_path("butterfly_Bprime.json"));
}

// Small random acyclic instance from the library generator; sizes drawn
// from `rng`, at most `max_nodes` nodes.
inline codemin::MulticastInstance small_acyclic(codemin::Rng& rng, int max_nodes = 15) {
  for (;;) {
    codemin::GeneratorParams p;
    p.nodes = 5 + static_cast<int>(rng.below(max_nodes - 4));
    p.sinks = 1 + static_cast<int>(rng.below(3));
    p.rate = 1 + static_cast<int>(rng.below(3));
    p.links = p.nodes + static_cast<int>(rng.below(p.nodes + 1)) + p.rate * p.sinks;
    p.seed = rng.next();
    p.max_attempts = 50;
    try {
      return codemin::generate_random_instance(p);
    } catch (const codemin::Error&) {
    }
  }
}

// Random directed multigraph, possibly cyclic. Source is node 0; the rate is
// the smallest receiver max-flow, so the instance is always feasible. Retries
// until that rate is at least 1.
inline codemin::MulticastInstance small_digraph(codemin::Rng& rng, int nodes, int links, int sinks) {
  using namespace codemin;
  for (;;) {
    std::vector<std::string> names;
    for (int v = 0; v < nodes; ++v) names.push_back("v" + std::to_string(v));
    std::vector<Link> ls;
    for (int e = 0; e < links; ++e) {
      int u = static_cast<int>(rng.below(nodes));
      int v = static_cast<int>(rng.below(nodes - 1));
      if (v >= u) ++v;
      if (v == 0) continue;  // nothing flows into the source
      ls.push_back({static_cast<LinkId>(ls.size()), u, v});
    }
    std::vector<NodeId> ts;
    while (static_cast<int>(ts.size()) < sinks) {
      const NodeId t = 1 + static_cast<NodeId>(rng.below(nodes - 1));
      if (std::find(ts.begin(), ts.end(), t) == ts.end()) ts.push_back(t);
    }
    MulticastInstance probe(names, ls, 0, ts, 1);
    const int rate = min_sink_max_flow(probe);
    if (rate < 1) continue;
    return MulticastInstance(names, ls, 0, ts, std::min(rate, 3));
  }
}

}  // namespace fixture
