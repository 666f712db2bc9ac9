#include <algorithm>
#include <vector>

#include "codemin/topology.hpp"

namespace codemin {

namespace {

// Dinic on a residual graph stored in CSR form. Every forward arc has
// capacity 1; its reverse arc starts at 0.
class Dinic {
 public:
  Dinic(int n, std::span<const std::pair<int, int>> edges) : n_(n), start_(n + 1, 0) {
    for (const auto& [u, v] : edges) {
      ++start_[u + 1];
      ++start_[v + 1];
    }
    for (int i = 0; i < n; ++i) start_[i + 1] += start_[i];
    const int arcs = start_[n];
    to_.resize(arcs);
    rev_.resize(arcs);
    cap_.resize(arcs);
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (const auto& [u, v] : edges) {
      const int a = fill[u]++;
      const int b = fill[v]++;
      to_[a] = v;
      cap_[a] = 1;
      rev_[a] = b;
      to_[b] = u;
      cap_[b] = 0;
      rev_[b] = a;
    }
    initial_cap_ = cap_;
    level_.resize(n);
    iter_.resize(n);
  }

  void reset() {
    cap_ = initial_cap_;
  }

  int run(int s, int t, int limit) {
    if (s == t) return limit;
    int flow = 0;
    while (flow < limit && bfs(s, t)) {
      std::copy(start_.begin(), start_.end() - 1, iter_.begin());
      while (flow < limit) {
        if (!dfs(s, t)) break;
        ++flow;
      }
    }
    return flow;
  }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    queue_.push_back(s);
    level_[s] = 0;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      const int u = queue_[i];
      for (int a = start_[u]; a < start_[u + 1]; ++a) {
        if (cap_[a] > 0 && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[u] + 1;
          queue_.push_back(to_[a]);
        }
      }
    }
    return level_[t] >= 0;
  }

  // one unit augmenting path in the level graph, iterative
  bool dfs(int s, int t) {
    path_.clear();
    int u = s;
    while (u != t) {
      int& a = iter_[u];
      for (; a < start_[u + 1]; ++a) {
        if (cap_[a] > 0 && level_[to_[a]] == level_[u] + 1) break;
      }
      if (a == start_[u + 1]) {
        if (path_.empty()) return false;
        level_[u] = -1;  // dead end
        const int back = path_.back();
        path_.pop_back();
        u = to_[rev_[back]];
        ++iter_[u];
        continue;
      }
      path_.push_back(a);
      u = to_[a];
    }
    for (int a : path_) {
      --cap_[a];
      ++cap_[rev_[a]];
    }
    return true;
  }

  int n_;
  std::vector<int> start_, to_, rev_, cap_, initial_cap_, level_, iter_, queue_, path_;
};

}  // namespace

int FlowNetwork::max_flow(int s, int t, int limit) const {
  Dinic d(nodes_, edges_);
  return d.run(s, t, limit);
}

bool FlowNetwork::all_sinks_reach(int s, std::span<const int> sinks, int need) const {
  Dinic d(nodes_, edges_);
  bool first = true;
  for (int t : sinks) {
    if (!first) d.reset();
    first = false;
    if (d.run(s, t, need) < need) return false;
  }
  return true;
}

FlowNetwork flow_network(const MulticastInstance& g) {
  FlowNetwork net(g.node_count());
  for (const Link& l : g.links()) net.add_edge(l.tail, l.head);
  return net;
}

int max_flow(const MulticastInstance& g, NodeId s, NodeId t) {
  return flow_network(g).max_flow(s, t);
}

int min_sink_max_flow(const MulticastInstance& g) {
  const FlowNetwork net = flow_network(g);
  int best = std::numeric_limits<int>::max();
  for (NodeId t : g.sinks()) best = std::min(best, net.max_flow(g.source(), t));
  return best;
}

bool rate_achievable(const MulticastInstance& g) {
  const FlowNetwork net = flow_network(g);
  for (NodeId t : g.sinks()) {
    if (net.max_flow(g.source(), t, g.rate()) < g.rate()) return false;
  }
  return true;
}

}  // namespace codemin
