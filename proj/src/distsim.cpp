#include "codemin/distsim.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <exception>
#include <ostream>
#include <string>

#include "json.hpp"

#include "codemin/error.hpp"

#ifdef CODEMIN_HAVE_OPENMP
#include <omp.h>
#endif

namespace codemin::dist {

namespace {

constexpr std::uint64_t kNodeTag = 0x6e6f6465;

std::uint32_t saturating_add(std::uint32_t a, std::uint32_t b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  const std::uint64_t s = std::uint64_t{a} + b;
  return s >= kInfinity ? kInfinity : static_cast<std::uint32_t>(s);
}

void init_shard(NodeState& node) {
  const int n = node.params.population;
  node.shard.assign(static_cast<std::size_t>(n) * node.d_out() * node.d_in(), 0);
  Rng rng(derive_seed(node.seed, kStreamInit));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < node.d_out(); ++j) {
      auto v = node.coding_vector(i, j);
      if (i == 0) {
        std::fill(v.begin(), v.end(), std::uint8_t{1});
      } else if (node.params.representation == Representation::BitWise) {
        for (auto& b : v) b = static_cast<std::uint8_t>(rng.below(2));
      } else {
        write_block_string(v, static_cast<int>(rng.below(allowed_block_strings(node.d_in()))));
      }
    }
  }
}

void archive_member(NodeState& node, int index) {
  const std::size_t width = static_cast<std::size_t>(node.d_out()) * node.d_in();
  const auto first = node.shard.begin() + static_cast<std::ptrdiff_t>(index * width);
  node.archive.assign(first, first + static_cast<std::ptrdiff_t>(width));
  node.has_archive = true;
}

}  // namespace

int fitness_component_bits(int link_count) {
  int bits = 0;
  while ((std::int64_t{1} << bits) < std::int64_t{link_count} + 2) ++bits;
  return bits;
}

int NodeState::local_coding_links(int chromosome) const {
  if (!merging()) return 0;
  int count = 0;
  for (int j = 0; j < d_out(); ++j) {
    const auto v = coding_vector(chromosome, j);
    if (std::count(v.begin(), v.end(), std::uint8_t{1}) >= 2) ++count;
  }
  return count;
}

std::vector<PilotPacket> forward_round(NodeState& node, std::span<const PilotPacket> inputs,
                                       const GaloisField& field) {
  if (inputs.empty()) throw Error(ErrorKind::Protocol, "forward round without input");
  const PilotPacket& head = inputs[0];
  std::vector<PilotPacket> out(node.out_links.size());

  if (head.kind == PilotPacket::Kind::Optimize) {
    if (!head.optimize) throw Error(ErrorKind::Protocol, "optimize packet without parameters");
    if (!node.initialized) {
      node.params = *head.optimize;
      node.initialized = true;
      if (node.merging()) init_shard(node);
      if (node.role == NodeRole::Sink) node.decodable.assign(node.params.population, 0);
    }
    for (auto& p : out) p = head;
    return out;
  }
  if (!node.initialized) throw Error(ErrorKind::Protocol, "pilot packet before optimize signal");

  const auto& cv = head.coordination;
  if (head.kind == PilotPacket::Kind::Finalize) {
    if (node.merging() && cv && cv->best_changed) archive_member(node, cv->best_index);
    for (auto& p : out) p = head;
    return out;
  }

  if (node.merging() && cv) apply_local_genetic_ops(node, *cv);

  const int n = node.params.population;
  const int r = node.params.rate;
  const std::size_t width = static_cast<std::size_t>(n) * r;
  for (const auto& p : inputs) {
    if (p.vectors.size() != width || p.generation != head.generation) {
      throw Error(ErrorKind::Protocol, "pilot packet shape or generation mismatch at node " +
                                           std::to_string(node.id));
    }
  }
  for (auto& p : out) {
    p.kind = PilotPacket::Kind::Pilot;
    p.generation = head.generation;
    p.population = n;
    p.rate = r;
    p.coordination = cv;
  }

  switch (node.role) {
    case NodeRole::Source: {
      Rng rng(derive_seed(node.seed, kStreamPilot, static_cast<std::uint64_t>(head.generation)));
      for (auto& p : out) {
        p.vectors.resize(width);
        for (auto& x : p.vectors) x = field.random_element(rng);
      }
      break;
    }
    case NodeRole::Interior:
      if (!node.merging()) {
        for (auto& p : out) p.vectors = head.vectors;
        break;
      } else {
        Rng rng(derive_seed(node.seed, kStreamCombine, static_cast<std::uint64_t>(head.generation)));
        for (auto& p : out) p.vectors.assign(width, 0);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < node.d_out(); ++j) {
            const auto bits = node.coding_vector(i, j);
            FieldElement* u = out[j].vectors.data() + static_cast<std::size_t>(i) * r;
            for (int k = 0; k < node.d_in(); ++k) {
              if (!bits[k]) continue;
              const FieldElement coef = field.random_element(rng);
              const FieldElement* w = inputs[k].vectors.data() + static_cast<std::size_t>(i) * r;
              for (int x = 0; x < r; ++x) u[x] ^= field.mul(coef, w[x]);
              node.counters.forward_macs += static_cast<std::uint64_t>(r);
            }
          }
        }
      }
      break;
    case NodeRole::Sink: {
      std::vector<FieldElement> rows(static_cast<std::size_t>(node.d_in()) * r);
      for (int i = 0; i < n; ++i) {
        if (node.d_in() < r) {
          node.decodable[i] = 0;
          continue;
        }
        for (int k = 0; k < node.d_in(); ++k) {
          std::copy_n(inputs[k].vectors.begin() + static_cast<std::ptrdiff_t>(i) * r, r,
                      rows.begin() + static_cast<std::ptrdiff_t>(k) * r);
        }
        node.decodable[i] = rank_of_rows(rows, node.d_in(), r, field, r) >= r ? 1 : 0;
      }
      break;
    }
  }
  node.counters.chromosomes += static_cast<std::uint64_t>(n);
  node.counters.messages_sent += out.size();
  return out;
}

std::vector<FitnessPacket> backward_round(NodeState& node, std::span<const FitnessPacket> inputs) {
  const int n = node.params.population;
  if (inputs.size() != node.out_links.size()) {
    throw Error(ErrorKind::Protocol, "backward round expects one packet per outgoing link");
  }
  std::vector<std::uint32_t> sum(n, 0);
  for (int i = 0; i < n; ++i) {
    if (node.role == NodeRole::Sink) {
      sum[i] = node.decodable[i] ? 0 : kInfinity;
    } else {
      sum[i] = static_cast<std::uint32_t>(node.local_coding_links(i));
    }
  }
  int generation = 0;
  for (const auto& p : inputs) {
    if (p.components.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::Protocol, "fitness packet size mismatch at node " + std::to_string(node.id));
    }
    generation = p.generation;
    for (int i = 0; i < n; ++i) sum[i] = saturating_add(sum[i], p.components[i]);
  }
  node.counters.backward_updates += static_cast<std::uint64_t>(n) * (inputs.size() + 1);

  std::vector<FitnessPacket> out(node.in_links.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].generation = generation;
    if (k == 0) {
      out[k].components = sum;
    } else {
      out[k].components.assign(n, 0);
    }
  }
  node.counters.messages_sent += out.size();
  return out;
}

CoordinationVector source_aggregate_and_coordinate(SourceState& source,
                                                   std::span<const FitnessPacket> inputs,
                                                   const GAParams& params, int generation,
                                                   bool final, std::vector<Fitness>* fitness_out) {
  const int n = params.population_size;
  std::vector<std::uint32_t> sum(n, 0);
  for (const auto& p : inputs) {
    if (p.components.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::Protocol, "fitness packet size mismatch at the source");
    }
    for (int i = 0; i < n; ++i) sum[i] = saturating_add(sum[i], p.components[i]);
  }
  std::vector<Fitness> fitness(n);
  for (int i = 0; i < n; ++i) {
    fitness[i] = sum[i] == kInfinity ? Fitness::infeasible() : Fitness::finite(static_cast<int>(sum[i]));
  }
  if (generation == 0 && source.require_feasible_start &&
      std::none_of(fitness.begin(), fitness.end(), [](const Fitness& f) { return f.feasible(); })) {
    throw Error(ErrorKind::Infeasible, "no member of the initial population is feasible");
  }

  CoordinationVector cv;
  cv.generation = generation + 1;
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (fitness[i] < fitness[best]) best = i;
  }
  cv.best_index = best;
  if (fitness[best] < source.best) {
    source.best = fitness[best];
    source.best_generation = generation;
    cv.best_changed = true;
  }
  if (final) {
    cv.final = true;
  } else {
    GenerationPlan plan = plan_generation(fitness, params, source.select_rng);
    cv.selected = std::move(plan.selected);
    cv.crossover = std::move(plan.crossover);
  }
  if (fitness_out) *fitness_out = std::move(fitness);
  return cv;
}

void apply_local_genetic_ops(NodeState& node, const CoordinationVector& cv) {
  if (!node.merging()) return;
  const int n = node.params.population;
  if (cv.best_changed) {
    if (cv.best_index < 0 || cv.best_index >= n) {
      throw Error(ErrorKind::Protocol, "best index out of range");
    }
    archive_member(node, cv.best_index);
  }
  if (cv.final) return;
  if (cv.selected.size() != static_cast<std::size_t>(n) ||
      cv.crossover.size() != static_cast<std::size_t>(n / 2)) {
    throw Error(ErrorKind::Protocol, "coordination vector has the wrong size");
  }
  const std::size_t width = static_cast<std::size_t>(node.d_out()) * node.d_in();
  std::vector<std::uint8_t> next(node.shard.size());
  for (int s = 0; s < n; ++s) {
    const int from = cv.selected[s];
    if (from < 0 || from >= n) throw Error(ErrorKind::Protocol, "selection index out of range");
    std::copy_n(node.shard.begin() + static_cast<std::ptrdiff_t>(from * width), width,
                next.begin() + static_cast<std::ptrdiff_t>(s * width));
  }
  node.shard = std::move(next);

  Rng rng(derive_seed(node.seed, kStreamLocalOps, static_cast<std::uint64_t>(cv.generation)));
  const bool bitwise = node.params.representation == Representation::BitWise;
  for (std::size_t p = 0; p < cv.crossover.size(); ++p) {
    if (!cv.crossover[p]) continue;
    for (int j = 0; j < node.d_out(); ++j) {
      auto a = node.coding_vector(static_cast<int>(2 * p), j);
      auto b = node.coding_vector(static_cast<int>(2 * p + 1), j);
      if (bitwise) {
        for (int k = 0; k < node.d_in(); ++k) {
          if (rng.below(2)) std::swap(a[k], b[k]);
        }
      } else if (rng.below(2)) {
        std::swap_ranges(a.begin(), a.end(), b.begin());
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < node.d_out(); ++j) {
      mutate_block(node.coding_vector(i, j), node.params.representation, node.params.mutation_rate, rng);
    }
  }
}

// --------------------------------------------------------------------------

Network::Network(const MulticastInstance& g, const GAParams& params, SimOptions options)
    : params_(params),
      options_(options),
      sub_(prune_to_multicast_paths(with_virtual_sinks(g))),
      layout_(layout_of(sub_.graph)),
      field_(params.field_bits),
      source_(params.seed) {
  params_.validate();
  const MulticastInstance& h = sub_.graph;
  if (!topological_order(h).acyclic()) {
    throw Error(ErrorKind::Cyclic, "the distributed protocol needs an acyclic network");
  }
  nodes_.resize(h.node_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    NodeState& s = nodes_[v];
    s.id = v;
    s.role = v == h.source() ? NodeRole::Source : h.is_sink(v) ? NodeRole::Sink : NodeRole::Interior;
    s.in_links.assign(h.in_links(v).begin(), h.in_links(v).end());
    s.out_links.assign(h.out_links(v).begin(), h.out_links(v).end());
    s.seed = derive_seed(params.seed, kNodeTag, static_cast<std::uint64_t>(v));
    if (v == h.source() || h.in_degree(v) > 0 || h.out_degree(v) > 0) participants_.push_back(v);
  }
  first_block_.assign(h.node_count(), -1);
  for (int b = layout_.block_count() - 1; b >= 0; --b) first_block_[layout_.block(b).node] = b;
}

void Network::trace_line(const char* phase, NodeId node, const char* kind, LinkId link,
                         std::size_t vectors, std::size_t elements) {
  if (!options_.trace) return;
  nlohmann::ordered_json j;
  j["t"] = time_;
  j["phase"] = phase;
  j["node"] = sub_.graph.node_name(node);
  j["kind"] = kind;
  j["link"] = link;
  j["vectors"] = vectors;
  j["elements"] = elements;
  *options_.trace << j.dump() << '\n';
}

namespace {

const char* kind_name(PilotPacket::Kind k) {
  switch (k) {
    case PilotPacket::Kind::Optimize: return "optimize";
    case PilotPacket::Kind::Pilot: return "pilot";
    case PilotPacket::Kind::Finalize: return "finalize";
  }
  return "?";
}

// Runs body(k) for k in [0, count), in parallel when threads > 1. Rethrows
// the error of the lowest failing k.
template <typename F>
void run_wave(std::size_t count, int threads, F&& body) {
  std::vector<std::exception_ptr> errors(count);
#ifdef CODEMIN_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
#endif
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  (void)threads;
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void Network::forward_phase(PilotPacket trigger) {
  const MulticastInstance& h = sub_.graph;
  std::vector<std::deque<PilotPacket>> channel(h.link_count());
  std::vector<char> fired(h.node_count(), 0);
  std::vector<NodeId> ready{h.source()};
  const int threads = std::max(1, options_.threads);

  while (!ready.empty()) {
    std::vector<std::vector<PilotPacket>> in(ready.size());
    for (std::size_t k = 0; k < ready.size(); ++k) {
      const NodeId v = ready[k];
      fired[v] = 1;
      if (v == h.source()) {
        in[k].push_back(trigger);
        continue;
      }
      for (LinkId e : nodes_[v].in_links) {
        in[k].push_back(std::move(channel[e].front()));
        channel[e].pop_front();
      }
    }
    std::vector<std::vector<PilotPacket>> out(ready.size());
    run_wave(ready.size(), threads,
             [&](std::size_t k) { out[k] = forward_round(nodes_[ready[k]], in[k], field_); });

    std::vector<NodeId> next;
    for (std::size_t k = 0; k < ready.size(); ++k) {
      const NodeState& s = nodes_[ready[k]];
      for (std::size_t j = 0; j < s.out_links.size(); ++j) {
        const LinkId e = s.out_links[j];
        PilotPacket& p = out[k][j];
        trace_line("forward", s.id, kind_name(p.kind), e, p.vectors.size() / std::max(1, p.rate),
                   p.vectors.size());
        channel[e].push_back(std::move(p));
        const NodeId w = h.link(e).head;
        if (fired[w] || std::find(next.begin(), next.end(), w) != next.end()) continue;
        const auto& ins = nodes_[w].in_links;
        if (std::all_of(ins.begin(), ins.end(), [&](LinkId x) { return !channel[x].empty(); })) {
          next.push_back(w);
        }
      }
    }
    std::sort(next.begin(), next.end());
    ready = std::move(next);
    ++time_;
  }
  for (NodeId v : participants_) {
    if (!fired[v]) {
      throw Error(ErrorKind::Protocol, "node " + h.node_name(v) + " never fired in the forward phase");
    }
  }
}

void Network::backward_phase(bool last) {
  const MulticastInstance& h = sub_.graph;
  std::vector<std::deque<FitnessPacket>> channel(h.link_count());
  std::vector<char> fired(h.node_count(), 0);
  std::vector<NodeId> ready;
  for (NodeId v : participants_) {
    if (nodes_[v].role == NodeRole::Sink) ready.push_back(v);
  }
  const int threads = std::max(1, options_.threads);
  bool source_done = false;

  while (!ready.empty()) {
    std::vector<std::vector<FitnessPacket>> in(ready.size());
    for (std::size_t k = 0; k < ready.size(); ++k) {
      const NodeId v = ready[k];
      fired[v] = 1;
      for (LinkId e : nodes_[v].out_links) {
        in[k].push_back(std::move(channel[e].front()));
        channel[e].pop_front();
      }
    }
    std::vector<std::vector<FitnessPacket>> out(ready.size());
    run_wave(ready.size(), threads, [&](std::size_t k) {
      if (ready[k] != h.source()) out[k] = backward_round(nodes_[ready[k]], in[k]);
    });

    std::vector<NodeId> next;
    for (std::size_t k = 0; k < ready.size(); ++k) {
      const NodeState& s = nodes_[ready[k]];
      if (s.id == h.source()) {
        pending_ = source_aggregate_and_coordinate(source_, in[k], params_, generation_, last,
                                                   &last_fitness_);
        source_done = true;
        continue;
      }
      for (std::size_t j = 0; j < s.in_links.size(); ++j) {
        const LinkId e = s.in_links[j];
        FitnessPacket& p = out[k][j];
        trace_line("backward", s.id, "fitness", e, 1, p.components.size());
        channel[e].push_back(std::move(p));
        const NodeId w = h.link(e).tail;
        if (fired[w] || std::find(next.begin(), next.end(), w) != next.end()) continue;
        const auto& outs = nodes_[w].out_links;
        if (std::all_of(outs.begin(), outs.end(), [&](LinkId x) { return !channel[x].empty(); })) {
          next.push_back(w);
        }
      }
    }
    std::sort(next.begin(), next.end());
    ready = std::move(next);
    ++time_;
  }
  for (NodeId v : participants_) {
    if (!fired[v]) {
      throw Error(ErrorKind::Protocol, "node " + h.node_name(v) + " never fired in the backward phase");
    }
  }
  if (!source_done) throw Error(ErrorKind::Protocol, "fitness never reached the source");
}

void Network::optimize() {
  PilotPacket trigger;
  trigger.kind = PilotPacket::Kind::Optimize;
  OptimizeSignal sig;
  sig.rate = sub_.graph.rate();
  sig.population = params_.population_size;
  sig.field_bits = params_.field_bits;
  sig.crossover_probability = params_.crossover_probability;
  sig.mutation_rate = params_.mutation_rate;
  sig.representation = params_.representation;
  sig.seed = params_.seed;
  trigger.optimize = sig;
  trigger.population = sig.population;
  trigger.rate = sig.rate;
  forward_phase(std::move(trigger));
}

void Network::load_population(std::span<const Chromosome> population) {
  if (population.size() != static_cast<std::size_t>(params_.population_size)) {
    throw Error(ErrorKind::Invalid, "population size does not match the parameters");
  }
  if (!nodes_[sub_.graph.source()].initialized) optimize();
  for (const auto& c : population) {
    if (c.size() != static_cast<std::size_t>(layout_.bit_count())) {
      throw Error(ErrorKind::Invalid, "chromosome length does not match the simulated layout");
    }
  }
  for (NodeState& s : nodes_) {
    if (!s.merging()) continue;
    for (std::size_t i = 0; i < population.size(); ++i) {
      for (int j = 0; j < s.d_out(); ++j) {
        const auto bits = population[i].block(layout_.block(first_block_[s.id] + j));
        std::copy(bits.begin(), bits.end(), s.coding_vector(static_cast<int>(i), j).begin());
      }
    }
  }
  source_.require_feasible_start = false;
  pending_.reset();
}

std::vector<Fitness> Network::run_generation(bool last) {
  PilotPacket trigger;
  trigger.kind = PilotPacket::Kind::Pilot;
  trigger.generation = generation_;
  trigger.population = params_.population_size;
  trigger.rate = sub_.graph.rate();
  trigger.vectors.assign(static_cast<std::size_t>(trigger.population) * trigger.rate, 0);
  trigger.coordination = pending_;
  forward_phase(std::move(trigger));
  backward_phase(last);
  ++generation_;
  return last_fitness_;
}

void Network::finalize() {
  if (!pending_ || !pending_->final) {
    throw Error(ErrorKind::Protocol, "finalize before the last generation");
  }
  PilotPacket trigger;
  trigger.kind = PilotPacket::Kind::Finalize;
  trigger.generation = generation_;
  trigger.coordination = pending_;
  forward_phase(std::move(trigger));
}

Chromosome Network::collect_best() const {
  Chromosome c(layout_.bit_count());
  for (int b = 0; b < layout_.block_count(); ++b) {
    const Block& blk = layout_.block(b);
    const NodeState& s = nodes_[blk.node];
    if (!s.has_archive) throw Error(ErrorKind::Internal, "node " + std::to_string(s.id) + " has no archive");
    const int j = b - first_block_[blk.node];
    std::copy_n(s.archive.begin() + static_cast<std::ptrdiff_t>(j) * s.d_in(), s.d_in(),
                c.block(blk).begin());
  }
  return c;
}

Chromosome Network::lift(const Chromosome& c, const MulticastInstance& original) const {
  const MulticastInstance aug = with_virtual_sinks(original);
  const Layout full = layout_of(original);
  if (aug.link_count() < static_cast<int>(sub_.original_link.size()) ||
      aug.node_count() != sub_.graph.node_count()) {
    throw Error(ErrorKind::Invalid, "lift target is not the simulated instance");
  }
  std::vector<LinkId> to_sim(aug.link_count(), -1);
  for (std::size_t e = 0; e < sub_.original_link.size(); ++e) to_sim[sub_.original_link[e]] = static_cast<LinkId>(e);

  Chromosome out(full.bit_count());
  for (const Block& fb : full.blocks()) {
    const LinkId so = to_sim[fb.out_link];
    const NodeState& s = nodes_[fb.node];
    auto dst = out.block(fb);
    for (int k = 0; k < fb.length; ++k) {
      const LinkId si = to_sim[fb.in_links[k]];
      if (so < 0 || si < 0) continue;
      if (!s.merging()) {
        dst[k] = 1;
        continue;
      }
      const auto jo = std::find(s.out_links.begin(), s.out_links.end(), so) - s.out_links.begin();
      const auto ki = std::find(s.in_links.begin(), s.in_links.end(), si) - s.in_links.begin();
      dst[k] = c.block(layout_.block(first_block_[fb.node] + static_cast<int>(jo)))[ki];
    }
  }
  return out;
}

RunStats run_distributed(const MulticastInstance& g, const GAParams& params, SimOptions options) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  if (!topological_order(with_virtual_sinks(g)).acyclic()) {
    throw Error(ErrorKind::Cyclic,
                "the distributed protocol needs an acyclic network; prune cycles first");
  }
  if (!rate_achievable(g)) {
    throw Error(ErrorKind::Infeasible, "target rate " + std::to_string(g.rate()) + " is not achievable");
  }
  Network net(g, params, options);
  net.optimize();

  RunStats stats;
  for (int gen = 0; gen <= params.generations; ++gen) {
    const std::vector<Fitness> fitness = net.run_generation(gen == params.generations);
    GenerationStats gs = summarize_generation(gen, fitness);
    gs.best_so_far = net.source_state().best;
    stats.generations.push_back(gs);
  }
  net.finalize();

  const DecompositionEvaluator exact(g);
  stats.best_before_sweep = net.lift(net.collect_best(), g);
  stats.fitness_before_sweep = net.source_state().best;
  if (!exact.feasible(stats.best_before_sweep)) {
    throw Error(ErrorKind::Internal, "archived best chromosome fails the exact feasibility test");
  }
  stats.best = greedy_sweep(stats.best_before_sweep, exact);
  stats.best_fitness = exact.evaluate(stats.best);
  stats.evaluations = static_cast<std::int64_t>(params.population_size) * (params.generations + 1);
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

}  // namespace codemin::dist
