#include "codemin/topology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "codemin/error.hpp"
#include "json.hpp"

namespace codemin {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::Invalid, msg); }

}  // namespace

MulticastInstance::MulticastInstance(std::vector<std::string> node_names, std::vector<Link> links,
                                     NodeId source, std::vector<NodeId> sinks, int rate)
    : names_(std::move(node_names)),
      links_(std::move(links)),
      source_(source),
      sinks_(std::move(sinks)),
      rate_(rate) {
  const auto n = static_cast<NodeId>(names_.size());
  auto valid_node = [n](NodeId v) { return v >= 0 && v < n; };

  {
    std::vector<std::string> sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) invalid("duplicate node name '" + *dup + "'");
  }
  if (rate_ < 1) invalid("rate must be >= 1, got " + std::to_string(rate_));
  if (!valid_node(source_)) invalid("source is not a declared node");
  if (sinks_.empty()) invalid("sink set is empty");

  std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    if (l.id != static_cast<LinkId>(i)) {
      invalid("link ids must be unique and dense 0.." + std::to_string(links_.size() - 1) +
              "; offending id " + std::to_string(l.id));
    }
    if (!valid_node(l.tail) || !valid_node(l.head)) {
      invalid("link " + std::to_string(l.id) + " references an undeclared node");
    }
    if (l.tail == l.head) invalid("link " + std::to_string(l.id) + " is a self-loop");
  }

  sink_flag_.assign(names_.size(), 0);
  for (NodeId t : sinks_) {
    if (!valid_node(t)) invalid("sink is not a declared node");
    if (t == source_) invalid("source must not be a sink");
    if (sink_flag_[t]) invalid("duplicate sink '" + names_[t] + "'");
    sink_flag_[t] = 1;
  }

  in_.assign(names_.size(), {});
  out_.assign(names_.size(), {});
  for (const Link& l : links_) {
    out_[l.tail].push_back(l.id);
    in_[l.head].push_back(l.id);
  }
}

std::optional<NodeId> MulticastInstance::find_node(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<NodeId>(i);
  }
  return std::nullopt;
}

bool operator==(const MulticastInstance& a, const MulticastInstance& b) {
  if (a.names_ != b.names_ || a.source_ != b.source_ || a.sinks_ != b.sinks_ || a.rate_ != b.rate_)
    return false;
  if (a.links_.size() != b.links_.size()) return false;
  for (std::size_t i = 0; i < a.links_.size(); ++i) {
    if (a.links_[i].tail != b.links_[i].tail || a.links_[i].head != b.links_[i].head) return false;
  }
  return true;
}

// --------------------------------------------------------------------------

MulticastInstance parse_topology(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("topology: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) invalid("topology: document root must be an object");

  auto require = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) invalid(std::string("topology: missing key /") + key);
    return *it;
  };

  const json& nodes = require("nodes");
  if (!nodes.is_array()) invalid("topology: /nodes must be an array");
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_string()) invalid("topology: /nodes/" + std::to_string(i) + " must be a string");
    std::string name = nodes[i].get<std::string>();
    if (!index.emplace(name, static_cast<NodeId>(names.size())).second) {
      invalid("topology: /nodes/" + std::to_string(i) + " duplicates node '" + name + "'");
    }
    names.push_back(std::move(name));
  }

  auto lookup = [&](const json& v, const std::string& where) -> NodeId {
    if (!v.is_string()) invalid("topology: " + where + " must be a node name string");
    auto it = index.find(v.get<std::string>());
    if (it == index.end()) {
      invalid("topology: " + where + " references undeclared node '" + v.get<std::string>() + "'");
    }
    return it->second;
  };

  const json& links = require("links");
  if (!links.is_array()) invalid("topology: /links must be an array");
  std::vector<Link> parsed;
  std::vector<char> seen(links.size(), 0);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "/links/" + std::to_string(i);
    const json& l = links[i];
    if (!l.is_object()) invalid("topology: " + where + " must be an object");
    if (!l.contains("id") || !l["id"].is_number_integer()) {
      invalid("topology: " + where + "/id must be an integer");
    }
    const auto id = l["id"].get<std::int64_t>();
    if (id < 0 || id >= static_cast<std::int64_t>(links.size()) || seen[id]) {
      invalid("topology: " + where + "/id " + std::to_string(id) +
              " is not unique in 0..|links|-1");
    }
    seen[id] = 1;
    if (!l.contains("from")) invalid("topology: " + where + "/from missing");
    if (!l.contains("to")) invalid("topology: " + where + "/to missing");
    const NodeId from = lookup(l["from"], where + "/from");
    const NodeId to = lookup(l["to"], where + "/to");
    if (from == to) invalid("topology: " + where + " is a self-loop");
    parsed.push_back({static_cast<LinkId>(id), from, to});
  }

  const NodeId source = lookup(require("source"), "/source");
  const json& sinks = require("sinks");
  if (!sinks.is_array()) invalid("topology: /sinks must be an array");
  if (sinks.empty()) invalid("topology: /sinks is empty");
  std::vector<NodeId> sink_ids;
  for (std::size_t i = 0; i < sinks.size(); ++i) {
    sink_ids.push_back(lookup(sinks[i], "/sinks/" + std::to_string(i)));
  }
  const json& rate = require("rate");
  if (!rate.is_number_integer()) invalid("topology: /rate must be an integer");
  const auto r = rate.get<std::int64_t>();
  if (r < 1) invalid("topology: /rate must be >= 1, got " + std::to_string(r));

  try {
    return MulticastInstance(std::move(names), std::move(parsed), source, std::move(sink_ids),
                             static_cast<int>(r));
  } catch (const Error& e) {
    invalid(std::string("topology: ") + e.what());
  }
}

MulticastInstance load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open topology file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_topology(buf.str());
  } catch (const Error& e) {
    invalid(path + ": " + e.what());
  }
}

std::string to_json(const MulticastInstance& g) {
  nlohmann::ordered_json doc;
  doc["nodes"] = g.node_names();
  auto links = nlohmann::ordered_json::array();
  for (const Link& l : g.links()) {
    links.push_back({{"id", l.id}, {"from", g.node_name(l.tail)}, {"to", g.node_name(l.head)}});
  }
  doc["links"] = std::move(links);
  doc["source"] = g.node_name(g.source());
  auto sinks = nlohmann::ordered_json::array();
  for (NodeId t : g.sinks()) sinks.push_back(g.node_name(t));
  doc["sinks"] = std::move(sinks);
  doc["rate"] = g.rate();
  return doc.dump(2) + "\n";
}

// --------------------------------------------------------------------------

std::vector<NodeId> merging_nodes(const MulticastInstance& g) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.in_degree(v) >= 2) out.push_back(v);
  }
  return out;
}

TopologicalOrder topological_order(const MulticastInstance& g) {
  const int n = g.node_count();
  TopologicalOrder result;
  std::vector<int> indeg(n);
  for (NodeId v = 0; v < n; ++v) indeg[v] = g.in_degree(v);
  // Kahn with a min-heap would also work; a FIFO seeded in id order is enough
  // for determinism.
  std::vector<NodeId> queue;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const NodeId v = queue[i];
    result.order.push_back(v);
    for (LinkId e : g.out_links(v)) {
      const NodeId w = g.link(e).head;
      if (--indeg[w] == 0) queue.push_back(w);
    }
  }
  if (static_cast<int>(result.order.size()) == n) return result;

  // Every remaining node has an incoming link from another remaining node;
  // walk backwards until a node repeats.
  std::vector<int> pos(n, -1);
  NodeId v = 0;
  while (indeg[v] == 0) ++v;
  std::vector<NodeId> walk;
  while (pos[v] < 0) {
    pos[v] = static_cast<int>(walk.size());
    walk.push_back(v);
    for (LinkId e : g.in_links(v)) {
      const NodeId u = g.link(e).tail;
      if (indeg[u] > 0) {
        v = u;
        break;
      }
    }
  }
  result.cycle.assign(walk.begin() + pos[v], walk.end());
  std::reverse(result.cycle.begin(), result.cycle.end());
  result.order.clear();
  return result;
}

Subgraph keep_links(const MulticastInstance& g, std::span<const std::uint8_t> keep) {
  std::vector<Link> links;
  std::vector<LinkId> original;
  for (const Link& l : g.links()) {
    if (!keep[l.id]) continue;
    links.push_back({static_cast<LinkId>(links.size()), l.tail, l.head});
    original.push_back(l.id);
  }
  std::vector<std::string> names(g.node_names().begin(), g.node_names().end());
  std::vector<NodeId> sinks(g.sinks().begin(), g.sinks().end());
  return {MulticastInstance(std::move(names), std::move(links), g.source(), std::move(sinks),
                            g.rate()),
          std::move(original)};
}

MulticastInstance with_virtual_sinks(const MulticastInstance& g) {
  std::vector<std::string> names(g.node_names().begin(), g.node_names().end());
  std::vector<Link> links(g.links().begin(), g.links().end());
  std::vector<NodeId> sinks;
  for (NodeId t : g.sinks()) {
    if (g.out_degree(t) == 0) {
      sinks.push_back(t);
      continue;
    }
    std::string name = g.node_name(t) + "#virtual";
    while (g.find_node(name)) name += "'";
    const auto virt = static_cast<NodeId>(names.size());
    names.push_back(std::move(name));
    for (int r = 0; r < g.rate(); ++r) {
      links.push_back({static_cast<LinkId>(links.size()), t, virt});
    }
    sinks.push_back(virt);
  }
  return MulticastInstance(std::move(names), std::move(links), g.source(), std::move(sinks),
                           g.rate());
}

Subgraph prune_to_multicast_paths(const MulticastInstance& g) {
  const int n = g.node_count();
  std::vector<char> from_source(n, 0), to_sink(n, 0);
  std::vector<NodeId> stack{g.source()};
  from_source[g.source()] = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (LinkId e : g.out_links(v)) {
      const NodeId w = g.link(e).head;
      if (!from_source[w]) {
        from_source[w] = 1;
        stack.push_back(w);
      }
    }
  }
  for (NodeId t : g.sinks()) {
    to_sink[t] = 1;
    stack.push_back(t);
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (LinkId e : g.in_links(v)) {
      const NodeId u = g.link(e).tail;
      if (!to_sink[u]) {
        to_sink[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<std::uint8_t> keep(g.link_count(), 0);
  for (const Link& l : g.links()) {
    // links into the source can never carry source data
    keep[l.id] = from_source[l.tail] && to_sink[l.head] && l.head != g.source();
  }
  return keep_links(g, keep);
}

// --------------------------------------------------------------------------

DecomposedGraph decompose(const MulticastInstance& g) {
  DecomposedGraph dg{.augmented = with_virtual_sinks(g), .node_count = 0, .link_endpoints = {}, .inter_aux_links = {},
                     .block_of_node = {}, .block_node = {}, .decomposed_nodes = {}, .source = 0, .sinks = {}};
  const MulticastInstance& a = dg.augmented;
  dg.node_count = a.node_count();
  dg.link_endpoints.resize(a.link_count());
  for (const Link& l : a.links()) dg.link_endpoints[l.id] = {l.tail, l.head};

  for (NodeId v = 0; v < a.node_count(); ++v) {
    if (a.in_degree(v) < 2 || a.is_sink(v) || v == a.source()) continue;
    dg.decomposed_nodes.push_back(v);
    auto ins = a.in_links(v);
    auto outs = a.out_links(v);
    std::vector<int> in_aux(ins.size()), out_aux(outs.size());
    for (std::size_t i = 0; i < ins.size(); ++i) {
      in_aux[i] = dg.node_count++;
      dg.link_endpoints[ins[i]].second = in_aux[i];
    }
    for (std::size_t j = 0; j < outs.size(); ++j) {
      out_aux[j] = dg.node_count++;
      dg.link_endpoints[outs[j]].first = out_aux[j];
    }
    for (std::size_t j = 0; j < outs.size(); ++j) {
      dg.block_node.push_back(out_aux[j]);
      for (std::size_t i = 0; i < ins.size(); ++i) {
        dg.inter_aux_links.push_back({v, static_cast<int>(i), static_cast<int>(j), ins[i], outs[j],
                                      in_aux[i], out_aux[j]});
      }
    }
  }
  dg.block_of_node.assign(dg.node_count, -1);
  for (std::size_t b = 0; b < dg.block_node.size(); ++b) {
    dg.block_of_node[dg.block_node[b]] = static_cast<int>(b);
  }
  dg.source = a.source();
  dg.sinks.assign(a.sinks().begin(), a.sinks().end());
  return dg;
}

FlowNetwork decomposed_network(const DecomposedGraph& dg, std::span<const std::uint8_t> bits,
                               std::span<const std::uint8_t> link_active) {
  const int blocks = dg.block_count();
  std::vector<int> active(blocks, 0);
  std::vector<int> only_input(blocks, -1);
  for (std::size_t b = 0; b < dg.inter_aux_links.size(); ++b) {
    if (!bits[b]) continue;
    const int block = dg.block_of_node[dg.inter_aux_links[b].to];
    ++active[block];
    only_input[block] = dg.inter_aux_links[b].from;
  }

  FlowNetwork net(dg.node_count);
  for (std::size_t e = 0; e < dg.link_endpoints.size(); ++e) {
    if (!link_active.empty() && !link_active[e]) continue;
    const auto [from, to] = dg.link_endpoints[e];
    const int block = dg.block_of_node[from];
    if (block < 0 || active[block] >= 2) {
      net.add_edge(from, to);
    } else if (active[block] == 1) {
      net.add_edge(only_input[block], to);
    }
  }
  for (std::size_t b = 0; b < dg.inter_aux_links.size(); ++b) {
    const InterAuxLink& x = dg.inter_aux_links[b];
    if (bits[b] && active[dg.block_of_node[x.to]] >= 2) net.add_edge(x.from, x.to);
  }
  return net;
}

}  // namespace codemin
