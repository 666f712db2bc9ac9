#include <algorithm>
#include <string>
#include <vector>

#include "codemin/error.hpp"
#include "codemin/rng.hpp"
#include "codemin/topology.hpp"

namespace codemin {

namespace {

// Small augmenting-path flow that exposes the residual reachability sets the
// generator needs. Nodes are positions in the layer order.
struct ResidualFlow {
  int n;
  const std::vector<std::pair<int, int>>& links;
  std::vector<int> flow;  // 0/1 per link

  ResidualFlow(int nodes, const std::vector<std::pair<int, int>>& l)
      : n(nodes), links(l), flow(l.size(), 0) {}

  // BFS in the residual graph from `root`; forward=false walks arcs backwards
  std::vector<char> reach(int root, bool forward, std::vector<int>* parent_link = nullptr) const {
    std::vector<char> seen(n, 0);
    std::vector<int> queue{root};
    seen[root] = 1;
    if (parent_link) parent_link->assign(n, -1);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const int x = queue[i];
      for (std::size_t e = 0; e < links.size(); ++e) {
        const auto [u, v] = links[e];
        // residual arc u->v when flow 0, v->u when flow 1
        int from = flow[e] ? v : u;
        int to = flow[e] ? u : v;
        if (!forward) std::swap(from, to);
        if (from == x && !seen[to]) {
          seen[to] = 1;
          if (parent_link) (*parent_link)[to] = static_cast<int>(e);
          queue.push_back(to);
        }
      }
    }
    return seen;
  }

  int augment_to(int s, int t, int need) {
    int value = 0;
    while (value < need) {
      std::vector<int> parent;
      auto seen = reach(s, true, &parent);
      if (!seen[t]) break;
      for (int x = t; x != s;) {
        const int e = parent[x];
        flow[e] ^= 1;
        x = (links[e].first == x) ? links[e].second : links[e].first;
      }
      ++value;
    }
    return value;
  }
};

}  // namespace

MulticastInstance generate_random_instance(const GeneratorParams& p) {
  if (p.nodes < 2 || p.sinks < 1 || p.rate < 1 || p.links < 1) {
    throw Error(ErrorKind::Invalid, "generator: nodes >= 2, sinks >= 1, rate >= 1, links >= 1");
  }
  if (p.sinks > p.nodes - 1) {
    throw Error(ErrorKind::Infeasible, "generator: more sinks than non-source nodes");
  }
  if (p.links < p.rate) {
    throw Error(ErrorKind::Infeasible, "generator: " + std::to_string(p.links) +
                                           " links cannot carry rate " + std::to_string(p.rate));
  }

  const int n = p.nodes;
  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    Rng rng(derive_seed(p.seed, kStreamGenerator, static_cast<std::uint64_t>(attempt)));

    // Node i sits at layer position i; links always go forward, so the
    // result is acyclic. Sinks live in the later 60% of positions.
    const int first_sink_pos = std::max(1, n - std::max(p.sinks, (3 * (n - 1) + 4) / 5));
    std::vector<int> candidates;
    for (int v = first_sink_pos; v < n; ++v) candidates.push_back(v);
    rng.shuffle(std::span<int>(candidates));
    std::vector<int> sinks(candidates.begin(), candidates.begin() + p.sinks);
    std::vector<char> is_sink(n, 0);
    for (int t : sinks) is_sink[t] = 1;

    std::vector<std::pair<int, int>> links;
    bool over_budget = false;
    for (int t : sinks) {
      for (;;) {
        ResidualFlow rf(n, links);
        // a short augmentation leaves a maximum flow, so the residual sets
        // below separate s from t
        if (rf.augment_to(0, t, p.rate) >= p.rate) break;
        auto from_source = rf.reach(0, true);
        auto to_sink = rf.reach(t, false);
        std::vector<int> heads;
        for (int v = 1; v < n; ++v)
          if (to_sink[v]) heads.push_back(v);
        const int v = heads[rng.below(heads.size())];
        std::vector<int> tails;
        for (int u = 0; u < v; ++u)
          if (from_source[u]) tails.push_back(u);
        const int u = tails[rng.below(tails.size())];

        std::vector<int> mids;
        for (int w = u + 1; w < v; ++w)
          if (!is_sink[w]) mids.push_back(w);
        if (!mids.empty() && rng.bernoulli(0.5)) {
          const int w = mids[rng.below(mids.size())];
          links.emplace_back(u, w);
          links.emplace_back(w, v);
        } else {
          links.emplace_back(u, v);
        }
        if (static_cast<int>(links.size()) > p.links) {
          over_budget = true;
          break;
        }
      }
      if (over_budget) break;
    }
    if (over_budget) continue;

    // Spare budget goes to forward links that avoid sinks, so every sink
    // keeps the in-degree the construction gave it.
    std::vector<int> fill_heads;
    for (int v = 1; v < n; ++v)
      if (!is_sink[v]) fill_heads.push_back(v);
    while (static_cast<int>(links.size()) < p.links && !fill_heads.empty()) {
      const int v = fill_heads[rng.below(fill_heads.size())];
      const int u = static_cast<int>(rng.below(v));
      links.emplace_back(u, v);
    }
    if (static_cast<int>(links.size()) < p.links) continue;
    // shuffle link ids so that id order carries no construction history
    rng.shuffle(std::span<std::pair<int, int>>(links));

    std::vector<std::string> names;
    for (int v = 0; v < n; ++v) names.push_back(v == 0 ? "s" : "n" + std::to_string(v));
    std::vector<Link> typed;
    for (std::size_t e = 0; e < links.size(); ++e) {
      typed.push_back({static_cast<LinkId>(e), links[e].first, links[e].second});
    }
    std::sort(sinks.begin(), sinks.end());
    MulticastInstance g(std::move(names), std::move(typed), 0, std::move(sinks), p.rate);
    if (rate_achievable(g)) return g;
  }
  throw Error(ErrorKind::Infeasible,
              "generator: no instance with min-cut >= " + std::to_string(p.rate) + " after " +
                  std::to_string(p.max_attempts) + " attempts (nodes=" + std::to_string(p.nodes) +
                  ", links=" + std::to_string(p.links) + ", sinks=" + std::to_string(p.sinks) +
                  ")");
}

Subgraph make_acyclic_subgraph(const MulticastInstance& g) {
  if (!rate_achievable(g)) {
    throw Error(ErrorKind::Infeasible, "acyclic pruning: target rate is not achievable on input");
  }
  std::vector<std::uint8_t> keep(g.link_count(), 1);

  auto reaches = [&](NodeId from, NodeId to) {
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (LinkId e : g.out_links(x)) {
        if (!keep[e]) continue;
        const NodeId y = g.link(e).head;
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    return false;
  };

  for (;;) {
    if (topological_order(keep_links(g, keep).graph).acyclic()) break;
    bool removed = false;
    for (const Link& l : g.links()) {
      if (!keep[l.id] || !reaches(l.head, l.tail)) continue;
      keep[l.id] = 0;
      if (rate_achievable(keep_links(g, keep).graph)) {
        removed = true;
      } else {
        keep[l.id] = 1;
      }
    }
    if (!removed) {
      auto cyc = topological_order(keep_links(g, keep).graph).cycle;
      std::string desc;
      for (NodeId v : cyc) desc += g.node_name(v) + " -> ";
      if (!cyc.empty()) desc += g.node_name(cyc.front());
      throw Error(ErrorKind::Cyclic,
                  "acyclic pruning: every remaining cycle link is needed for the target rate (" +
                      desc + ")");
    }
  }
  return keep_links(g, keep);
}

}  // namespace codemin
