#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codemin {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

struct Link {
  LinkId id;
  NodeId tail;
  NodeId head;
};

/// Directed multigraph with unit-capacity links, a source, a sink set and a
/// target multicast rate. Immutable once constructed; the constructor checks
/// every structural invariant and throws codemin::Error on violation.
class MulticastInstance {
 public:
  MulticastInstance(std::vector<std::string> node_names, std::vector<Link> links, NodeId source,
                    std::vector<NodeId> sinks, int rate);

  int node_count() const { return static_cast<int>(names_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  int rate() const { return rate_; }
  NodeId source() const { return source_; }
  std::span<const NodeId> sinks() const { return sinks_; }
  bool is_sink(NodeId v) const { return sink_flag_[v] != 0; }

  std::span<const Link> links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }
  const std::string& node_name(NodeId v) const { return names_[v]; }
  std::span<const std::string> node_names() const { return names_; }
  std::optional<NodeId> find_node(std::string_view name) const;

  // incident links, ascending link id
  std::span<const LinkId> in_links(NodeId v) const { return in_[v]; }
  std::span<const LinkId> out_links(NodeId v) const { return out_[v]; }
  int in_degree(NodeId v) const { return static_cast<int>(in_[v].size()); }
  int out_degree(NodeId v) const { return static_cast<int>(out_[v].size()); }

  friend bool operator==(const MulticastInstance& a, const MulticastInstance& b);

 private:
  std::vector<std::string> names_;
  std::vector<Link> links_;
  NodeId source_;
  std::vector<NodeId> sinks_;
  std::vector<char> sink_flag_;
  int rate_;
  std::vector<std::vector<LinkId>> in_;
  std::vector<std::vector<LinkId>> out_;
};

/// A link-subset of some parent instance. Links are renumbered densely;
/// original_link maps each new id back to the parent id. Nodes are kept.
struct Subgraph {
  MulticastInstance graph;
  std::vector<LinkId> original_link;
};

MulticastInstance parse_topology(std::string_view text);
MulticastInstance load_topology(const std::string& path);
std::string to_json(const MulticastInstance& g);

/// Nodes with in-degree >= 2, ascending.
std::vector<NodeId> merging_nodes(const MulticastInstance& g);

struct TopologicalOrder {
  std::vector<NodeId> order;  // valid only when acyclic
  std::vector<NodeId> cycle;  // one directed cycle, empty when acyclic
  bool acyclic() const { return cycle.empty(); }
};

TopologicalOrder topological_order(const MulticastInstance& g);

/// Keeps the links whose flag is nonzero.
Subgraph keep_links(const MulticastInstance& g, std::span<const std::uint8_t> keep);

/// For every sink with out-degree > 0, appends a virtual sink fed by `rate`
/// parallel links and moves the sink role onto it. Appended links get ids
/// link_count(), link_count()+1, ... so original ids are preserved.
MulticastInstance with_virtual_sinks(const MulticastInstance& g);

/// Drops every link that does not lie on some source-to-sink path.
Subgraph prune_to_multicast_paths(const MulticastInstance& g);

// --------------------------------------------------------------------------
// max-flow

/// Unit-capacity directed multigraph used for flow computations.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes = 0) : nodes_(nodes) {}

  int add_node() { return nodes_++; }
  void add_edge(int from, int to) { edges_.emplace_back(from, to); }
  int node_count() const { return nodes_; }
  std::span<const std::pair<int, int>> edges() const { return edges_; }

  /// Maximum integral s-t flow, stopping early once `limit` is reached.
  /// Dinic's algorithm: O(E * sqrt(V)) phases bound on unit networks.
  int max_flow(int s, int t, int limit = std::numeric_limits<int>::max()) const;

  /// True when every t in `sinks` has max_flow(s, t) >= need. Stops at the
  /// first sink that falls short.
  bool all_sinks_reach(int s, std::span<const int> sinks, int need) const;

 private:
  int nodes_;
  std::vector<std::pair<int, int>> edges_;
};

FlowNetwork flow_network(const MulticastInstance& g);
int max_flow(const MulticastInstance& g, NodeId s, NodeId t);
/// min over sinks of the source-to-sink max-flow
int min_sink_max_flow(const MulticastInstance& g);
bool rate_achievable(const MulticastInstance& g);

// --------------------------------------------------------------------------
// graph decomposition

struct InterAuxLink {
  NodeId node;       // merging node of the instance the decomposition was built on
  int in_index;      // position of in_link among the node's incoming links
  int out_index;     // position of out_link among the node's outgoing links
  LinkId in_link;
  LinkId out_link;
  int from;          // incoming auxiliary node (decomposed numbering)
  int to;            // outgoing auxiliary node (decomposed numbering)
};

/// Merging-node expansion. Built on with_virtual_sinks(g); every non-sink,
/// non-source merging node v is replaced by d_in incoming auxiliary nodes and
/// d_out outgoing auxiliary nodes joined by d_in * d_out inter-aux links.
/// Inter-aux links are indexed in chromosome bit order: merging nodes
/// ascending, then outgoing link id, then incoming link id.
struct DecomposedGraph {
  MulticastInstance augmented;
  int node_count = 0;
  // endpoints of every augmented link in decomposed numbering
  std::vector<std::pair<int, int>> link_endpoints;
  std::vector<InterAuxLink> inter_aux_links;
  // outgoing auxiliary node -> block index; -1 for other nodes
  std::vector<int> block_of_node;
  // block index -> outgoing auxiliary node
  std::vector<int> block_node;
  std::vector<NodeId> decomposed_nodes;  // merging nodes that were expanded
  int source = 0;
  std::vector<int> sinks;

  int bit_count() const { return static_cast<int>(inter_aux_links.size()); }
  int block_count() const { return static_cast<int>(block_node.size()); }
};

DecomposedGraph decompose(const MulticastInstance& g);

/// Flow network of the decomposition with exactly the inter-aux links whose
/// bit is set. Outgoing auxiliary nodes with a single active input are
/// contracted, those with none are dropped. A nonempty `link_active` (indexed
/// by augmented link id) additionally removes the links flagged 0.
FlowNetwork decomposed_network(const DecomposedGraph& dg, std::span<const std::uint8_t> bits,
                               std::span<const std::uint8_t> link_active = {});

// --------------------------------------------------------------------------
// instance generation and cleanup

struct GeneratorParams {
  int nodes = 50;
  int links = 87;
  int sinks = 10;
  int rate = 5;
  std::uint64_t seed = 1;
  int max_attempts = 2000;
};

/// Layered acyclic multigraph whose source-to-sink max-flows are all >= rate.
/// Deterministic in the seed; throws Error(Infeasible) when the parameters
/// cannot be met within max_attempts rejection rounds.
MulticastInstance generate_random_instance(const GeneratorParams& p);

/// Greedily deletes cycle links in link-id order whenever every sink keeps
/// max-flow >= rate. Throws Error(Cyclic) if cycles remain.
Subgraph make_acyclic_subgraph(const MulticastInstance& g);

}  // namespace codemin
