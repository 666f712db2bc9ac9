#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "codemin/chromosome.hpp"
#include "codemin/finite_field.hpp"
#include "codemin/topology.hpp"

namespace codemin {

/// Maps a chromosome to its fitness. Implementations are stateless after
/// construction and safe to call concurrently. `seed` feeds randomized
/// evaluators and is ignored by deterministic ones.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Fitness evaluate(const Chromosome& c, std::uint64_t seed) const = 0;
  virtual bool deterministic() const = 0;
  virtual const Layout& layout() const = 0;
};

/// Exact feasibility through max-flows on the decomposed graph. Works on
/// cyclic networks.
class DecompositionEvaluator final : public Evaluator {
 public:
  explicit DecompositionEvaluator(const MulticastInstance& g);

  Fitness evaluate(const Chromosome& c) const;
  Fitness evaluate(const Chromosome& c, std::uint64_t) const override { return evaluate(c); }
  bool deterministic() const override { return true; }
  const Layout& layout() const override { return layout_; }

  bool feasible(const Chromosome& c) const;
  /// Same test with the augmented links flagged 0 in `link_active` removed.
  bool feasible(const Chromosome& c, std::span<const std::uint8_t> link_active) const;

  const DecomposedGraph& decomposition() const { return dg_; }
  int rate() const { return dg_.augmented.rate(); }

 private:
  DecomposedGraph dg_;
  Layout layout_;
};

/// Randomized test: builds a random linear code restricted to the active
/// link states and checks the rank of what every sink receives. Error is
/// one-sided: a feasible chromosome can be reported infeasible, never the
/// reverse. Acyclic networks only.
class AlgebraicEvaluator final : public Evaluator {
 public:
  AlgebraicEvaluator(const MulticastInstance& g, int field_bits = 16, int trials = 2,
                     bool nonzero_coefficients = false);

  Fitness evaluate(const Chromosome& c, Rng& rng) const;
  Fitness evaluate(const Chromosome& c, std::uint64_t seed) const override;
  bool deterministic() const override { return false; }
  const Layout& layout() const override { return layout_; }

  const GaloisField& field() const { return field_; }
  int trials() const { return trials_; }

 private:
  enum class Role : std::uint8_t { Source, Idle, Copy, Merge, Sink };
  struct NodePlan {
    NodeId node;
    Role role;
    std::vector<int> out_blocks;  // block index per outgoing link (Merge only)
  };

  MulticastInstance augmented_;
  Layout layout_;
  GaloisField field_;
  int trials_;
  bool nonzero_;
  std::vector<NodePlan> plan_;  // topological order
};

std::unique_ptr<Evaluator> make_evaluator(const MulticastInstance& g, bool algebraic,
                                          int field_bits = 16, int trials = 2);

/// Reference kernel: evaluates in order on the calling thread. Chromosome i
/// uses derive_seed(seed, kStreamEval, i).
std::vector<Fitness> evaluate_population_serial(const Evaluator& ev,
                                                std::span<const Chromosome> population,
                                                std::uint64_t seed);

/// Parallel kernel with the same per-chromosome seeds as the serial one, so
/// the result does not depend on the schedule. threads <= 0 uses the OpenMP
/// default. Rethrows the error of the lowest failing index.
std::vector<Fitness> evaluate_population(const Evaluator& ev, std::span<const Chromosome> population,
                                         std::uint64_t seed, int threads = 0);

}  // namespace codemin
