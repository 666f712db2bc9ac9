#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "codemin/baselines.hpp"
#include "codemin/ga.hpp"
#include "json.hpp"

namespace codemin {

// ---- run configuration -------------------------------------------------------

nlohmann::ordered_json to_json(const GAParams& p);
/// Missing keys keep the values already in `base`; unknown keys are rejected.
GAParams params_from_json(const nlohmann::json& j, GAParams base = {});

// ---- per-generation trace ------------------------------------------------------

/// Header `generation,best,mean,feasible,best_so_far`. Infeasible values
/// print as `inf`, a missing mean as an empty field, means with 6 decimals.
void write_stats_csv(std::ostream& out, const RunStats& stats);
std::vector<GenerationStats> read_stats_csv(std::istream& in);

/// Summary document: best coding links before and after the sweep, the
/// swept chromosome in hex, and the parameters. Wall time is left out so
/// reruns are byte-identical.
nlohmann::ordered_json summary_json(const RunStats& stats, const GAParams& params, const Layout& layout,
                                    const std::string& mode);

// ---- batches -------------------------------------------------------------------

struct TrialSummary {
  int best = 0;
  double avg = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single trial
  int trials = 0;
};

TrialSummary summarize_trials(const std::vector<int>& values);

struct BaselineRow {
  std::uint64_t seed = 0;
  int coding_links = 0;
};

/// Trial t uses seed first_seed + t. Trials run on up to `jobs` workers;
/// the rows do not depend on it.
std::vector<BaselineRow> run_baseline_batch(BaselineMethod m, const MulticastInstance& g, int trials,
                                            std::uint64_t first_seed, int jobs = 1);

/// Header `seed,method,coding_links,best,avg,std`: one row per trial with the
/// last three fields empty, then a `summary` row with the first three fields
/// holding `summary`, the method and the trial count.
void write_baseline_csv(std::ostream& out, BaselineMethod m, const std::vector<BaselineRow>& rows);

struct CompareRow {
  std::string method;  // block, bit, minimal1, minimal2
  std::vector<int> values;
  TrialSummary summary;
};

struct CompareOptions {
  int trials = 30;
  std::uint64_t first_seed = 1;
  int generations = 1000;  // GA rows only
  int population_size = 150;
  int jobs = 1;
};

/// Block-wise GA, bit-wise GA, minimal1 and minimal2 over the same seeds,
/// each GA with its representation's default parameters.
std::vector<CompareRow> compare_methods(const MulticastInstance& g, const CompareOptions& opt);

/// Header `method,trials,first_seed,best,avg,std`.
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows, const CompareOptions& opt);

}  // namespace codemin
