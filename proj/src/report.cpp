#include "codemin/report.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

#include "codemin/error.hpp"

namespace codemin {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Fitness parse_fitness(const std::string& s) {
  if (s == "inf") return Fitness::infeasible();
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= 0) return Fitness::finite(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Invalid, "bad fitness field '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Runs body(t) for t in [0, n) on up to `jobs` workers, rethrowing the first
// error by index.
template <typename F>
void for_trials(int n, int jobs, F&& body) {
  std::vector<std::exception_ptr> errors(n);
#ifdef CODEMIN_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs) if (jobs > 1)
#endif
  for (int t = 0; t < n; ++t) {
    try {
      body(t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  (void)jobs;
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

nlohmann::ordered_json to_json(const GAParams& p) {
  nlohmann::ordered_json j;
  j["population_size"] = p.population_size;
  j["generations"] = p.generations;
  j["tournament_size"] = p.tournament_size;
  j["crossover_probability"] = p.crossover_probability;
  j["mutation_rate"] = p.mutation_rate;
  j["representation"] = to_string(p.representation);
  j["evaluator"] = to_string(p.evaluator);
  j["field_bits"] = p.field_bits;
  j["trials"] = p.trials;
  j["seed"] = p.seed;
  return j;
}

GAParams params_from_json(const nlohmann::json& j, GAParams base) {
  if (!j.is_object()) throw Error(ErrorKind::Invalid, "run configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "population_size") {
        base.population_size = value.get<int>();
      } else if (key == "generations") {
        base.generations = value.get<int>();
      } else if (key == "tournament_size") {
        base.tournament_size = value.get<int>();
      } else if (key == "crossover_probability") {
        base.crossover_probability = value.get<double>();
      } else if (key == "mutation_rate") {
        base.mutation_rate = value.get<double>();
      } else if (key == "representation") {
        base.representation = parse_representation(value.get<std::string>());
      } else if (key == "evaluator") {
        base.evaluator = parse_evaluator_kind(value.get<std::string>());
      } else if (key == "field_bits") {
        base.field_bits = value.get<int>();
      } else if (key == "trials") {
        base.trials = value.get<int>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else {
        throw Error(ErrorKind::Invalid, "unknown configuration key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Invalid, std::string("run configuration: ") + e.what());
  }
  return base;
}

void write_stats_csv(std::ostream& out, const RunStats& stats) {
  out << "generation,best,mean,feasible,best_so_far\n";
  for (const auto& g : stats.generations) {
    out << g.generation << ',' << g.best.to_string() << ',' << (g.mean ? fixed(*g.mean, 6) : "") << ','
        << g.feasible << ',' << g.best_so_far.to_string() << '\n';
  }
}

std::vector<GenerationStats> read_stats_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"generation", "best", "mean",
                                                                              "feasible", "best_so_far"}) {
    throw Error(ErrorKind::Invalid, "stats CSV: unexpected header");
  }
  std::vector<GenerationStats> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw Error(ErrorKind::Invalid, "stats CSV: expected 5 fields in '" + line + "'");
    GenerationStats g;
    try {
      g.generation = std::stoi(f[0]);
      g.best = parse_fitness(f[1]);
      if (!f[2].empty()) g.mean = std::stod(f[2]);
      g.feasible = std::stoi(f[3]);
      g.best_so_far = parse_fitness(f[4]);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Invalid, "stats CSV: bad row '" + line + "'");
    }
    out.push_back(g);
  }
  return out;
}

nlohmann::ordered_json summary_json(const RunStats& stats, const GAParams& params, const Layout& layout,
                                    const std::string& mode) {
  auto fit = [](const Fitness& f) -> nlohmann::ordered_json {
    if (f.feasible()) return f.count();
    return "inf";
  };
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["seed"] = params.seed;
  j["best_before_sweep"] = fit(stats.fitness_before_sweep);
  j["best"] = fit(stats.best_fitness);
  j["chromosome"] = to_hex(stats.best, layout);
  j["chromosome_before_sweep"] = to_hex(stats.best_before_sweep, layout);
  j["generations_run"] = static_cast<int>(stats.generations.size());
  j["evaluations"] = stats.evaluations;
  j["params"] = to_json(params);
  return j;
}

TrialSummary summarize_trials(const std::vector<int>& values) {
  TrialSummary s;
  s.trials = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.best = values[0];
  double sum = 0.0;
  for (int v : values) {
    s.best = std::min(s.best, v);
    sum += v;
  }
  s.avg = sum / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (int v : values) ss += (v - s.avg) * (v - s.avg);
    s.std = std::sqrt(ss / (values.size() - 1));
  }
  return s;
}

std::vector<BaselineRow> run_baseline_batch(BaselineMethod m, const MulticastInstance& g, int trials,
                                            std::uint64_t first_seed, int jobs) {
  if (trials < 1) throw Error(ErrorKind::Invalid, "trials must be >= 1");
  if (!rate_achievable(g)) {
    throw Error(ErrorKind::Infeasible, "target rate " + std::to_string(g.rate()) + " is not achievable");
  }
  std::vector<BaselineRow> rows(trials);
  for_trials(trials, jobs, [&](int t) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(t);
    Rng rng(seed);
    rows[t] = {seed, run_baseline(m, g, rng).coding_links};
  });
  return rows;
}

void write_baseline_csv(std::ostream& out, BaselineMethod m, const std::vector<BaselineRow>& rows) {
  out << "seed,method,coding_links,best,avg,std\n";
  std::vector<int> values;
  for (const auto& r : rows) {
    out << r.seed << ',' << to_string(m) << ',' << r.coding_links << ",,,\n";
    values.push_back(r.coding_links);
  }
  const TrialSummary s = summarize_trials(values);
  out << "summary," << to_string(m) << ',' << s.trials << ',' << s.best << ',' << fixed(s.avg, 4) << ','
      << fixed(s.std, 4) << '\n';
}

std::vector<CompareRow> compare_methods(const MulticastInstance& g, const CompareOptions& opt) {
  if (opt.trials < 1) throw Error(ErrorKind::Invalid, "trials must be >= 1");
  std::vector<CompareRow> rows;
  for (Representation repr : {Representation::BlockWise, Representation::BitWise}) {
    GAParams base = GAParams::defaults(repr);
    base.generations = opt.generations;
    base.population_size = opt.population_size;
    base.tournament_size = std::min(base.tournament_size, base.population_size);
    CompareRow row;
    row.method = repr == Representation::BlockWise ? "block" : "bit";
    row.values.resize(opt.trials);
    for_trials(opt.trials, opt.jobs, [&](int t) {
      GAParams p = base;
      p.seed = opt.first_seed + static_cast<std::uint64_t>(t);
      row.values[t] = evolve(g, p).best_fitness.count();
    });
    row.summary = summarize_trials(row.values);
    rows.push_back(std::move(row));
  }
  for (BaselineMethod m : {BaselineMethod::Minimal1, BaselineMethod::Minimal2}) {
    CompareRow row;
    row.method = to_string(m);
    for (const auto& r : run_baseline_batch(m, g, opt.trials, opt.first_seed, opt.jobs)) {
      row.values.push_back(r.coding_links);
    }
    row.summary = summarize_trials(row.values);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows, const CompareOptions& opt) {
  out << "method,trials,first_seed,best,avg,std\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.summary.trials << ',' << opt.first_seed << ',' << r.summary.best << ','
        << fixed(r.summary.avg, 4) << ',' << fixed(r.summary.std, 4) << '\n';
  }
}

}  // namespace codemin
