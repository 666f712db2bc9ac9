#include "codemin/evaluators.hpp"

#include <algorithm>
#include <exception>

#include "codemin/error.hpp"

#ifdef CODEMIN_HAVE_OPENMP
#include <omp.h>
#endif

namespace codemin {

DecompositionEvaluator::DecompositionEvaluator(const MulticastInstance& g)
    : dg_(decompose(g)), layout_(layout_of(dg_)) {}

bool DecompositionEvaluator::feasible(const Chromosome& c) const { return feasible(c, {}); }

bool DecompositionEvaluator::feasible(const Chromosome& c,
                                      std::span<const std::uint8_t> link_active) const {
  if (c.size() != static_cast<std::size_t>(layout_.bit_count())) {
    throw Error(ErrorKind::Invalid, "chromosome length does not match the layout");
  }
  const FlowNetwork net = decomposed_network(dg_, c.bits(), link_active);
  return net.all_sinks_reach(dg_.source, dg_.sinks, rate());
}

Fitness DecompositionEvaluator::evaluate(const Chromosome& c) const {
  if (!feasible(c)) return Fitness::infeasible();
  return Fitness::finite(count_coding_links(c, layout_));
}

// --------------------------------------------------------------------------

AlgebraicEvaluator::AlgebraicEvaluator(const MulticastInstance& g, int field_bits, int trials,
                                       bool nonzero_coefficients)
    : augmented_(with_virtual_sinks(g)),
      layout_(layout_of(g)),
      field_(field_bits),
      trials_(trials),
      nonzero_(nonzero_coefficients) {
  if (trials < 1) throw Error(ErrorKind::Invalid, "algebraic evaluator needs trials >= 1");
  const TopologicalOrder topo = topological_order(augmented_);
  if (!topo.acyclic()) {
    throw Error(ErrorKind::Cyclic,
                "algebraic evaluation applies only to acyclic networks; prune cycles first");
  }
  std::vector<int> block_of_out(augmented_.link_count(), -1);
  for (int b = 0; b < layout_.block_count(); ++b) block_of_out[layout_.block(b).out_link] = b;

  for (NodeId v : topo.order) {
    NodePlan p{v, Role::Idle, {}};
    if (v == augmented_.source()) {
      p.role = Role::Source;
    } else if (augmented_.is_sink(v)) {
      p.role = Role::Sink;
    } else if (augmented_.in_degree(v) == 1) {
      p.role = Role::Copy;
    } else if (augmented_.in_degree(v) >= 2) {
      p.role = Role::Merge;
      for (LinkId e : augmented_.out_links(v)) p.out_blocks.push_back(block_of_out[e]);
    }
    plan_.push_back(std::move(p));
  }
}

Fitness AlgebraicEvaluator::evaluate(const Chromosome& c, std::uint64_t seed) const {
  Rng rng(seed);
  return evaluate(c, rng);
}

Fitness AlgebraicEvaluator::evaluate(const Chromosome& c, Rng& rng) const {
  if (c.size() != static_cast<std::size_t>(layout_.bit_count())) {
    throw Error(ErrorKind::Invalid, "chromosome length does not match the layout");
  }
  const int rate = augmented_.rate();
  const auto stride = static_cast<std::size_t>(rate);
  std::vector<FieldElement> vec(static_cast<std::size_t>(augmented_.link_count()) * stride);
  std::vector<FieldElement> received;
  const auto sinks = augmented_.sinks();
  std::vector<char> decoded(sinks.size(), 0);
  std::size_t remaining = sinks.size();

  auto link_vec = [&](LinkId e) { return std::span<FieldElement>(vec).subspan(e * stride, stride); };

  for (int trial = 0; trial < trials_ && remaining > 0; ++trial) {
    std::fill(vec.begin(), vec.end(), FieldElement{0});
    for (const NodePlan& p : plan_) {
      const NodeId v = p.node;
      switch (p.role) {
        case Role::Source:
          for (LinkId e : augmented_.out_links(v)) {
            for (auto& x : link_vec(e)) x = field_.random_element(rng);
          }
          break;
        case Role::Copy: {
          auto in = link_vec(augmented_.in_links(v)[0]);
          for (LinkId e : augmented_.out_links(v)) std::copy(in.begin(), in.end(), link_vec(e).begin());
          break;
        }
        case Role::Merge: {
          auto ins = augmented_.in_links(v);
          auto outs = augmented_.out_links(v);
          for (std::size_t j = 0; j < outs.size(); ++j) {
            auto out = link_vec(outs[j]);
            auto block = c.block(layout_.block(p.out_blocks[j]));
            for (std::size_t i = 0; i < ins.size(); ++i) {
              if (!block[i]) continue;
              const FieldElement coef = field_.random_element(rng, nonzero_);
              if (coef == 0) continue;
              auto in = link_vec(ins[i]);
              for (std::size_t r = 0; r < stride; ++r) out[r] ^= field_.mul(coef, in[r]);
            }
          }
          break;
        }
        case Role::Idle:
        case Role::Sink:
          break;
      }
    }
    for (std::size_t s = 0; s < sinks.size(); ++s) {
      if (decoded[s]) continue;
      auto ins = augmented_.in_links(sinks[s]);
      if (static_cast<int>(ins.size()) < rate) continue;
      received.clear();
      for (LinkId e : ins) {
        auto v = link_vec(e);
        received.insert(received.end(), v.begin(), v.end());
      }
      if (rank_of_rows(received, static_cast<int>(ins.size()), rate, field_, rate) >= rate) {
        decoded[s] = 1;
        --remaining;
      }
    }
  }
  if (remaining > 0) return Fitness::infeasible();
  return Fitness::finite(count_coding_links(c, layout_));
}

std::unique_ptr<Evaluator> make_evaluator(const MulticastInstance& g, bool algebraic,
                                          int field_bits, int trials) {
  if (algebraic) return std::make_unique<AlgebraicEvaluator>(g, field_bits, trials);
  return std::make_unique<DecompositionEvaluator>(g);
}

// --------------------------------------------------------------------------

std::vector<Fitness> evaluate_population_serial(const Evaluator& ev,
                                                std::span<const Chromosome> population,
                                                std::uint64_t seed) {
  std::vector<Fitness> out;
  out.reserve(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    out.push_back(ev.evaluate(population[i], derive_seed(seed, kStreamEval, i)));
  }
  return out;
}

std::vector<Fitness> evaluate_population(const Evaluator& ev, std::span<const Chromosome> population,
                                         std::uint64_t seed, int threads) {
#ifdef CODEMIN_HAVE_OPENMP
  const auto n = static_cast<std::int64_t>(population.size());
  std::vector<Fitness> out(population.size());
  std::vector<std::exception_ptr> errors(population.size());
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = ev.evaluate(population[i], derive_seed(seed, kStreamEval, static_cast<std::uint64_t>(i)));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
#else
  (void)threads;
  return evaluate_population_serial(ev, population, seed);
#endif
}

}  // namespace codemin
