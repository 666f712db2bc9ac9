// codemin: command-line front end.
//
//   codemin gen      --nodes N --links E --sinks D --rate R [--seed S] [-o FILE]
//   codemin opt      TOPOLOGY [--mode central|dist] [--method decomposition|algebraic] ...
//   codemin baseline TOPOLOGY --method minimal1|minimal2 [--trials T] [-o FILE]
//   codemin compare  TOPOLOGY [--trials T] [--gens G] [-o FILE]
//   codemin eval     TOPOLOGY (--chromosome HEX | --bits 0101.. | --all-one)
//
// Exit codes: 0 ok, 2 usage or invalid input, 3 infeasible instance, 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "codemin/baselines.hpp"
#include "codemin/distsim.hpp"
#include "codemin/error.hpp"
#include "codemin/evaluators.hpp"
#include "codemin/ga.hpp"
#include "codemin/report.hpp"
#include "codemin/topology.hpp"

using namespace codemin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Invalid:
    case ErrorKind::Cyclic:
      return kExitUsage;
    case ErrorKind::Infeasible:
      return kExitInfeasible;
    case ErrorKind::Protocol:
    case ErrorKind::Internal:
      break;
  }
  return kExitInternal;
}

// Writes through `body` to `path`, or to stdout when path is empty or "-".
template <typename F>
void emit(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Invalid, "cannot write " + path);
  body(out);
  if (!out) throw Error(ErrorKind::Internal, "write failed: " + path);
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("CODEMIN_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Invalid, std::string("CODEMIN_SEED is not an unsigned integer: ") + s);
    }
  }
  return 1;
}

struct GenArgs {
  GeneratorParams p;
  std::string output;
};

struct OptArgs {
  std::string topology;
  std::string mode = "central";
  std::string method = "decomposition";
  std::string repr = "block";
  int pop = 0;
  int gens = 0;
  int tournament = 0;
  double pc = 0.0;
  double alpha = 0.0;
  int field_bits = 16;
  int trials = 2;
  std::uint64_t seed = 1;
  std::string config;
  std::string csv;
  std::string json;
  std::string trace;
  bool acyclic_prune = false;
  int jobs = 1;
};

struct BaselineArgs {
  std::string topology;
  std::string method;
  int trials = 30;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string output;
};

struct CompareArgs {
  std::string topology;
  CompareOptions opt;
  std::string output;
};

struct EvalArgs {
  std::string topology;
  std::string hex;
  std::string bits;
  bool all_one = false;
  std::string method = "decomposition";
  int field_bits = 16;
  int trials = 2;
  std::uint64_t seed = 1;
  bool acyclic_prune = false;
};

int cmd_gen(const GenArgs& a) {
  const MulticastInstance g = generate_random_instance(a.p);
  const std::string text = to_json(g);
  emit(a.output, [&](std::ostream& o) { o << text; });
  std::ostream& info = (a.output.empty() || a.output == "-") ? std::cerr : std::cout;
  info << "min_sink_max_flow=" << min_sink_max_flow(g) << '\n';
  return kExitOk;
}

int cmd_opt(const OptArgs& a, const CLI::App& sub) {
  MulticastInstance g = load_topology(a.topology);
  if (a.acyclic_prune) g = make_acyclic_subgraph(g).graph;

  GAParams p = GAParams::defaults(parse_representation(a.repr));
  bool config_seed = false;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error(ErrorKind::Invalid, "cannot read " + a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Invalid, a.config + ": " + e.what());
    }
    if (sub.count("--repr") == 0 && j.contains("representation")) {
      p = GAParams::defaults(parse_representation(j["representation"].get<std::string>()));
    }
    p = params_from_json(j, p);
    config_seed = j.contains("seed");
  }
  if (sub.count("--repr")) p.representation = parse_representation(a.repr);
  if (sub.count("--method")) p.evaluator = parse_evaluator_kind(a.method);
  if (sub.count("--pop")) p.population_size = a.pop;
  if (sub.count("--gens")) p.generations = a.gens;
  if (sub.count("--tournament")) p.tournament_size = a.tournament;
  if (sub.count("--pc")) p.crossover_probability = a.pc;
  if (sub.count("--alpha")) p.mutation_rate = a.alpha;
  if (sub.count("--field-bits")) p.field_bits = a.field_bits;
  if (sub.count("--trials")) p.trials = a.trials;
  if (sub.count("--seed")) {
    p.seed = a.seed;
  } else if (!config_seed) {
    p.seed = default_seed();
  }
  p.threads = a.jobs;
  // a tournament larger than the population is meaningless; clamp defaults only
  if (!sub.count("--tournament") && p.tournament_size > p.population_size) {
    p.tournament_size = p.population_size;
  }

  RunStats stats;
  if (a.mode == "central") {
    stats = evolve(g, p);
  } else if (a.mode == "dist") {
    dist::SimOptions so;
    so.threads = a.jobs;
    std::ofstream trace;
    if (!a.trace.empty()) {
      trace.open(a.trace, std::ios::binary);
      if (!trace) throw Error(ErrorKind::Invalid, "cannot write " + a.trace);
      so.trace = &trace;
    }
    stats = dist::run_distributed(g, p, so);
  } else {
    throw Error(ErrorKind::Invalid, "unknown mode '" + a.mode + "' (expected central|dist)");
  }

  const Layout layout = layout_of(g);
  if (!a.csv.empty()) emit(a.csv, [&](std::ostream& o) { write_stats_csv(o, stats); });
  const auto summary = summary_json(stats, p, layout, a.mode);
  if (!a.json.empty()) emit(a.json, [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  std::cout << "best=" << stats.best_fitness.to_string()
            << " best_before_sweep=" << stats.fitness_before_sweep.to_string() << " seed=" << p.seed
            << " mode=" << a.mode << '\n';
  return kExitOk;
}

int cmd_baseline(const BaselineArgs& a, const CLI::App& sub) {
  const MulticastInstance g = load_topology(a.topology);
  const BaselineMethod m = parse_baseline_method(a.method);
  const std::uint64_t seed = sub.count("--seed") ? a.seed : default_seed();
  const auto rows = run_baseline_batch(m, g, a.trials, seed, a.jobs);
  emit(a.output, [&](std::ostream& o) { write_baseline_csv(o, m, rows); });
  return kExitOk;
}

int cmd_compare(CompareArgs a, const CLI::App& sub) {
  const MulticastInstance g = load_topology(a.topology);
  if (!sub.count("--seed")) a.opt.first_seed = default_seed();
  const auto rows = compare_methods(g, a.opt);
  emit(a.output, [&](std::ostream& o) { write_compare_csv(o, rows, a.opt); });
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, const CLI::App& sub) {
  MulticastInstance g = load_topology(a.topology);
  if (a.acyclic_prune) g = make_acyclic_subgraph(g).graph;
  const Layout layout = layout_of(g);
  Chromosome c;
  const int given = (a.hex.empty() ? 0 : 1) + (a.bits.empty() ? 0 : 1) + (a.all_one ? 1 : 0);
  if (given != 1) throw Error(ErrorKind::Invalid, "give exactly one of --chromosome, --bits, --all-one");
  if (!a.hex.empty()) {
    c = from_hex(a.hex, layout);
  } else if (!a.bits.empty()) {
    c = Chromosome::from_bitstring(a.bits);
    if (c.size() != static_cast<std::size_t>(layout.bit_count())) {
      throw Error(ErrorKind::Invalid, "expected " + std::to_string(layout.bit_count()) + " bits");
    }
  } else {
    c = Chromosome::all_one(layout);
  }
  const std::uint64_t seed = sub.count("--seed") ? a.seed : default_seed();
  const auto ev = make_evaluator(g, parse_evaluator_kind(a.method) == EvaluatorKind::Algebraic, a.field_bits,
                                 a.trials);
  const Fitness f = ev->evaluate(c, seed);
  std::cout << "fitness=" << f.to_string() << " coding_links=" << count_coding_links(c, layout)
            << " bits=" << layout.bit_count() << " blocks=" << layout.block_count()
            << " block_valid=" << (is_block_valid(c, layout) ? 1 : 0) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimize network coding resources for multicast"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random layered multicast instance");
  gen_cmd->add_option("--nodes", gen.p.nodes, "Node count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--links", gen.p.links, "Link count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--sinks", gen.p.sinks, "Sink count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--rate", gen.p.rate, "Target multicast rate")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.p.seed, "Random seed");
  gen_cmd->add_option("--max-attempts", gen.p.max_attempts, "Rejection-sampling rounds")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("-o,--output", gen.output, "Output file (stdout if omitted)");

  OptArgs opt;
  auto* opt_cmd = app.add_subcommand("opt", "Run the genetic algorithm");
  opt_cmd->add_option("topology", opt.topology, "Topology JSON")->required();
  opt_cmd->add_option("--mode", opt.mode, "central or dist")->check(CLI::IsMember({"central", "dist"}));
  opt_cmd->add_option("--method", opt.method, "Fitness evaluator")
      ->check(CLI::IsMember({"decomposition", "algebraic"}));
  opt_cmd->add_option("--repr", opt.repr, "Chromosome representation")->check(CLI::IsMember({"block", "bit"}));
  opt_cmd->add_option("--pop", opt.pop, "Population size");
  opt_cmd->add_option("--gens", opt.gens, "Generations");
  opt_cmd->add_option("--tournament", opt.tournament, "Tournament size");
  opt_cmd->add_option("--pc", opt.pc, "Crossover probability");
  opt_cmd->add_option("--alpha", opt.alpha, "Mutation rate");
  opt_cmd->add_option("--field-bits", opt.field_bits, "m for GF(2^m)");
  opt_cmd->add_option("--trials", opt.trials, "Algebraic trials per evaluation");
  opt_cmd->add_option("--seed", opt.seed, "Random seed (default: CODEMIN_SEED or 1)");
  opt_cmd->add_option("--config", opt.config, "JSON run configuration");
  opt_cmd->add_option("--csv", opt.csv, "Per-generation CSV output");
  opt_cmd->add_option("--json", opt.json, "JSON summary output");
  opt_cmd->add_option("--trace", opt.trace, "Distributed event trace (line-delimited JSON)");
  opt_cmd->add_flag("--acyclic-prune", opt.acyclic_prune, "Remove cycle links first");
  opt_cmd->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BaselineArgs base;
  auto* base_cmd = app.add_subcommand("baseline", "Run a greedy baseline for several seeds");
  base_cmd->add_option("topology", base.topology, "Topology JSON")->required();
  base_cmd->add_option("--method", base.method, "minimal1 or minimal2")
      ->required()
      ->check(CLI::IsMember({"minimal1", "minimal2"}));
  base_cmd->add_option("--trials", base.trials, "Number of seeds")->check(CLI::PositiveNumber);
  base_cmd->add_option("--seed", base.seed, "First seed");
  base_cmd->add_option("--jobs", base.jobs, "Worker threads")->check(CLI::PositiveNumber);
  base_cmd->add_option("-o,--output", base.output, "CSV output (stdout if omitted)");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Block GA, bit GA, minimal1 and minimal2 side by side");
  cmp_cmd->add_option("topology", cmp.topology, "Topology JSON")->required();
  cmp_cmd->add_option("--trials", cmp.opt.trials, "Trials per method")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--seed", cmp.opt.first_seed, "First seed");
  cmp_cmd->add_option("--gens", cmp.opt.generations, "GA generations")->check(CLI::NonNegativeNumber);
  cmp_cmd->add_option("--pop", cmp.opt.population_size, "GA population size")->check(CLI::Range(2, 1 << 20));
  cmp_cmd->add_option("--jobs", cmp.opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("-o,--output", cmp.output, "CSV output (stdout if omitted)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Evaluate one chromosome");
  ev_cmd->add_option("topology", ev.topology, "Topology JSON")->required();
  ev_cmd->add_option("--chromosome", ev.hex, "Hex chromosome as printed by opt");
  ev_cmd->add_option("--bits", ev.bits, "Chromosome as a 0/1 string");
  ev_cmd->add_flag("--all-one", ev.all_one, "Evaluate the all-one chromosome");
  ev_cmd->add_option("--method", ev.method, "Fitness evaluator")
      ->check(CLI::IsMember({"decomposition", "algebraic"}));
  ev_cmd->add_option("--field-bits", ev.field_bits, "m for GF(2^m)");
  ev_cmd->add_option("--trials", ev.trials, "Algebraic trials");
  ev_cmd->add_option("--seed", ev.seed, "Random seed");
  ev_cmd->add_flag("--acyclic-prune", ev.acyclic_prune, "Remove cycle links first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      if (!gen_cmd->count("--seed")) gen.p.seed = default_seed();
      return cmd_gen(gen);
    }
    if (*opt_cmd) return cmd_opt(opt, *opt_cmd);
    if (*base_cmd) return cmd_baseline(base, *base_cmd);
    if (*cmp_cmd) return cmd_compare(cmp, *cmp_cmd);
    if (*ev_cmd) return cmd_eval(ev, *ev_cmd);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::Cyclic) {
      std::cerr << "hint: rerun with --acyclic-prune\n";
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
