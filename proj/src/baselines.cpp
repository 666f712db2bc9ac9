#include "codemin/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "codemin/error.hpp"
#include "codemin/evaluators.hpp"

namespace codemin {

const char* to_string(BaselineMethod m) { return m == BaselineMethod::Minimal1 ? "minimal1" : "minimal2"; }

BaselineMethod parse_baseline_method(const std::string& s) {
  if (s == "minimal1") return BaselineMethod::Minimal1;
  if (s == "minimal2") return BaselineMethod::Minimal2;
  throw Error(ErrorKind::Invalid, "unknown baseline '" + s + "' (expected minimal1|minimal2)");
}

namespace {

void require_feasible(const MulticastInstance& g) {
  if (!rate_achievable(g)) {
    throw Error(ErrorKind::Infeasible, "baseline: target rate is not achievable on the instance");
  }
}

// Removes set bits in random order while the chromosome stays feasible.
void greedy_bit_removal(Chromosome& c, const DecompositionEvaluator& ev,
                        std::span<const std::uint8_t> link_active, Rng& rng) {
  std::vector<int> order;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) order.push_back(static_cast<int>(i));
  rng.shuffle(std::span<int>(order));
  for (int i : order) {
    c[i] = 0;
    if (!ev.feasible(c, link_active)) c[i] = 1;
  }
}

}  // namespace

BaselineResult minimal1(const MulticastInstance& g, Rng& rng) {
  require_feasible(g);
  const DecompositionEvaluator ev(g);
  const MulticastInstance& aug = ev.decomposition().augmented;

  // stage 1: subgraph of the original links, coding assumed everywhere
  std::vector<std::uint8_t> keep(g.link_count(), 1);
  std::vector<int> order(g.link_count());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  for (int e : order) {
    keep[e] = 0;
    if (!rate_achievable(keep_links(g, keep).graph)) keep[e] = 1;
  }

  // stage 2: on the decomposition restricted to the kept links
  std::vector<std::uint8_t> active(aug.link_count(), 1);
  for (LinkId e = 0; e < g.link_count(); ++e) active[e] = keep[e];
  const Layout& l = ev.layout();
  Chromosome c(l.bit_count());
  for (const Block& b : l.blocks()) {
    auto block = c.block(b);
    for (int i = 0; i < b.length; ++i) block[i] = active[b.in_links[i]] && active[b.out_link];
  }
  greedy_bit_removal(c, ev, active, rng);

  if (!ev.feasible(c, active) || !ev.feasible(c)) {
    throw Error(ErrorKind::Internal, "minimal1 produced an infeasible configuration");
  }
  BaselineResult r;
  r.coding_links = count_coding_links(c, l);
  r.chromosome = std::move(c);
  r.links_kept = static_cast<int>(std::count(keep.begin(), keep.end(), std::uint8_t{1}));
  return r;
}

BaselineResult minimal2(const MulticastInstance& g, Rng& rng) {
  require_feasible(g);
  const DecompositionEvaluator ev(g);
  Chromosome c = Chromosome::all_one(ev.layout());
  greedy_bit_removal(c, ev, {}, rng);
  if (!ev.feasible(c)) throw Error(ErrorKind::Internal, "minimal2 produced an infeasible configuration");
  BaselineResult r;
  r.coding_links = count_coding_links(c, ev.layout());
  r.chromosome = std::move(c);
  r.links_kept = g.link_count();
  return r;
}

BaselineResult run_baseline(BaselineMethod m, const MulticastInstance& g, Rng& rng) {
  return m == BaselineMethod::Minimal1 ? minimal1(g, rng) : minimal2(g, rng);
}

}  // namespace codemin
