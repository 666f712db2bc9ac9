#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "codemin/chromosome.hpp"
#include "codemin/finite_field.hpp"
#include "codemin/ga.hpp"
#include "codemin/topology.hpp"

// Message-passing simulation of the distributed optimization protocol. Every
// participating node keeps its own slice of the population and talks to its
// neighbours only through per-link FIFO channels: pilot packets travel
// downstream, fitness packets upstream. A node fires once every input channel
// of the current phase holds a packet.
namespace codemin::dist {

inline constexpr std::uint32_t kInfinity = 0xFFFFFFFFu;

/// Directives computed at the source after each generation.
struct CoordinationVector {
  int generation = 0;                   // generation the next population belongs to
  std::vector<int> selected;            // N indices into the previous population
  std::vector<std::uint8_t> crossover;  // one flag per pair (0,1), (2,3), ...
  int best_index = 0;                   // best-so-far member of the previous population
  bool best_changed = false;            // archive best_index before applying the ops
  bool final = false;                   // optimization ends; no genetic ops
};

struct OptimizeSignal {
  int rate = 0;
  int population = 0;
  int field_bits = 16;
  double crossover_probability = 0.8;
  double mutation_rate = 0.012;
  Representation representation = Representation::BlockWise;
  std::uint64_t seed = 0;
};

struct PilotPacket {
  enum class Kind : std::uint8_t { Optimize, Pilot, Finalize };
  Kind kind = Kind::Pilot;
  int generation = 0;
  int population = 0;
  int rate = 0;
  std::vector<FieldElement> vectors;  // population x rate, chromosome-major
  std::optional<CoordinationVector> coordination;
  std::optional<OptimizeSignal> optimize;
};

struct FitnessPacket {
  int generation = 0;
  std::vector<std::uint32_t> components;  // coding-link counts or kInfinity
};

/// Bits needed per fitness component: ceil(log2(|E| + 2)).
int fitness_component_bits(int link_count);

enum class NodeRole : std::uint8_t { Source, Interior, Sink };

struct NodeCounters {
  std::uint64_t forward_macs = 0;       // field multiply-accumulates at merging nodes
  std::uint64_t chromosomes = 0;        // chromosomes pushed through the forward phase
  std::uint64_t backward_updates = 0;   // fitness component updates
  std::uint64_t messages_sent = 0;
};

struct NodeState {
  NodeId id = 0;
  NodeRole role = NodeRole::Interior;
  std::vector<LinkId> in_links;   // ascending
  std::vector<LinkId> out_links;  // ascending
  std::uint64_t seed = 0;

  OptimizeSignal params;
  bool initialized = false;
  // population x d_out x d_in coding vectors, merging interior nodes only
  std::vector<std::uint8_t> shard;
  std::vector<std::uint8_t> archive;  // d_out x d_in snapshot of the best member
  bool has_archive = false;
  std::vector<std::uint8_t> decodable;  // sinks: rank test per chromosome
  NodeCounters counters;

  int d_in() const { return static_cast<int>(in_links.size()); }
  int d_out() const { return static_cast<int>(out_links.size()); }
  bool merging() const { return role == NodeRole::Interior && d_in() >= 2; }
  std::span<std::uint8_t> coding_vector(int chromosome, int out_index) {
    return std::span<std::uint8_t>(shard).subspan(
        (static_cast<std::size_t>(chromosome) * d_out() + out_index) * d_in(), d_in());
  }
  std::span<const std::uint8_t> coding_vector(int chromosome, int out_index) const {
    return std::span<const std::uint8_t>(shard).subspan(
        (static_cast<std::size_t>(chromosome) * d_out() + out_index) * d_in(), d_in());
  }
  /// coding links this node uses for one chromosome
  int local_coding_links(int chromosome) const;
};

/// Handles one forward packet set. `inputs` follow in_links order; the source
/// receives a single locally injected trigger packet instead. Applies any
/// piggybacked coordination before coding, and returns one packet per
/// outgoing link (none for sinks).
std::vector<PilotPacket> forward_round(NodeState& node, std::span<const PilotPacket> inputs,
                                       const GaloisField& field);

/// Handles one backward packet set (`inputs` follow out_links order; empty
/// for sinks). Returns one packet per incoming link: the full vector on the
/// first, all-zero vectors on the rest.
std::vector<FitnessPacket> backward_round(NodeState& node, std::span<const FitnessPacket> inputs);

struct SourceState {
  explicit SourceState(std::uint64_t seed) : select_rng(derive_seed(seed, kStreamSelect)) {}
  Rng select_rng;
  Fitness best = Fitness::infeasible();
  int best_generation = -1;
  bool require_feasible_start = true;
};

/// Component-wise sum at the source, then selection and pairing for the next
/// generation. Uses the same selection stream as the centralized engine.
/// Throws Error(Infeasible) if every member of generation 0 is infeasible
/// and require_feasible_start is set.
CoordinationVector source_aggregate_and_coordinate(SourceState& source,
                                                   std::span<const FitnessPacket> inputs,
                                                   const GAParams& params, int generation,
                                                   bool final, std::vector<Fitness>* fitness_out);

/// Selection, block crossover and mutation on the node's shard, driven by the
/// coordination vector and a node-local random stream.
void apply_local_genetic_ops(NodeState& node, const CoordinationVector& cv);

struct SimOptions {
  int threads = 1;                // workers per scheduling wave; results do not depend on it
  std::ostream* trace = nullptr;  // line-delimited JSON event log
};

/// The simulated network. Built on prune_to_multicast_paths(with_virtual_sinks(g)).
class Network {
 public:
  Network(const MulticastInstance& g, const GAParams& params, SimOptions options = {});

  const MulticastInstance& graph() const { return sub_.graph; }
  const Layout& layout() const { return layout_; }
  std::span<const NodeState> nodes() const { return nodes_; }
  const NodeState& node(NodeId v) const { return nodes_[v]; }
  SourceState& source_state() { return source_; }

  /// Optimize-signal flood; every participating node initializes its shard.
  void optimize();
  /// Replaces every shard with the given chromosomes (on layout()).
  void load_population(std::span<const Chromosome> population);
  /// One forward and one backward phase. Returns the fitness computed at the
  /// source and stages the coordination vector for the next forward phase.
  std::vector<Fitness> run_generation(bool last);
  /// Final forward phase; nodes archive the best member.
  void finalize();
  /// Best chromosome assembled from the node archives, on layout().
  Chromosome collect_best() const;
  /// Same chromosome expressed on layout_of(original instance).
  Chromosome lift(const Chromosome& c, const MulticastInstance& original) const;

  int generation() const { return generation_; }
  std::int64_t logical_time() const { return time_; }

 private:
  void forward_phase(PilotPacket trigger);
  void backward_phase(bool last);
  void trace_line(const char* phase, NodeId node, const char* kind, LinkId link, std::size_t vectors,
                  std::size_t elements);

  GAParams params_;
  SimOptions options_;
  Subgraph sub_;
  Layout layout_;
  GaloisField field_;
  std::vector<NodeState> nodes_;
  std::vector<NodeId> participants_;
  std::vector<int> first_block_;  // first layout block of each merging node, else -1
  SourceState source_;
  std::optional<CoordinationVector> pending_;
  std::vector<Fitness> last_fitness_;
  int generation_ = 0;
  std::int64_t time_ = 0;
};

/// Full protocol run followed by a centralized greedy sweep of the best
/// chromosome. The chromosomes in the result live on layout_of(g).
RunStats run_distributed(const MulticastInstance& g, const GAParams& params, SimOptions options = {});

}  // namespace codemin::dist
