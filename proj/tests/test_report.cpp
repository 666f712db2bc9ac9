#include <cmath>
#include <sstream>

#include "codemin/error.hpp"
#include "codemin/report.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace codemin;

TEST_SUITE("report") {

TEST_CASE("parameter JSON round trip") {
  GAParams p = GAParams::defaults(Representation::BitWise);
  p.seed = 99;
  p.evaluator = EvaluatorKind::Algebraic;
  p.field_bits = 8;
  const GAParams q = params_from_json(nlohmann::json::parse(to_json(p).dump()));
  CHECK(to_json(q).dump() == to_json(p).dump());

  const GAParams partial = params_from_json(nlohmann::json{{"generations", 5}}, p);
  CHECK(partial.generations == 5);
  CHECK(partial.seed == 99);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"generation", 5}}), Error);
}

TEST_CASE("stats CSV round trip") {
  GAParams p = GAParams::scaled(Representation::BlockWise, 10, 6, layout_of(fixture::butterfly_prime()));
  const RunStats s = evolve(fixture::butterfly_prime(), p);
  std::ostringstream out;
  write_stats_csv(out, s);
  const std::string text = out.str();
  CHECK(text.rfind("generation,best,mean,feasible,best_so_far\n", 0) == 0);
  std::istringstream in(text);
  const auto rows = read_stats_csv(in);
  REQUIRE(rows.size() == s.generations.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].generation == s.generations[i].generation);
    CHECK(rows[i].best == s.generations[i].best);
    CHECK(rows[i].feasible == s.generations[i].feasible);
    CHECK(rows[i].best_so_far == s.generations[i].best_so_far);
    CHECK(rows[i].mean.has_value() == s.generations[i].mean.has_value());
    if (rows[i].mean) CHECK(*rows[i].mean == doctest::Approx(*s.generations[i].mean).epsilon(1e-6));
  }
  std::istringstream bad("generation,best\n1,2\n");
  CHECK_THROWS_AS(read_stats_csv(bad), Error);
}

TEST_CASE("summary JSON has no timing fields") {
  const auto g = fixture::butterfly();
  GAParams p = GAParams::scaled(Representation::BlockWise, 8, 4, layout_of(g));
  const RunStats s = evolve(g, p);
  const auto j = summary_json(s, p, layout_of(g), "central");
  CHECK(j["best"] == 1);
  CHECK(j["mode"] == "central");
  CHECK(j.dump().find("wall") == std::string::npos);
  CHECK(from_hex(j["chromosome"].get<std::string>(), layout_of(g)) == s.best);
}

TEST_CASE("trial summaries use the sample standard deviation") {
  const TrialSummary t = summarize_trials({1, 2, 3, 4});
  CHECK(t.best == 1);
  CHECK(t.avg == doctest::Approx(2.5));
  CHECK(t.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize_trials({7}).std == 0.0);
}

TEST_CASE("baseline batch and CSV") {
  const auto g = fixture::butterfly_prime();
  const auto rows = run_baseline_batch(BaselineMethod::Minimal2, g, 30, 1, 1);
  CHECK(run_baseline_batch(BaselineMethod::Minimal2, g, 30, 1, 3).size() == 30);
  std::vector<int> values;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    CHECK(rows[t].seed == 1 + t);
    values.push_back(rows[t].coding_links);
  }
  const auto par = run_baseline_batch(BaselineMethod::Minimal2, g, 30, 1, 3);
  for (std::size_t t = 0; t < rows.size(); ++t) CHECK(par[t].coding_links == rows[t].coding_links);

  std::ostringstream out;
  write_baseline_csv(out, BaselineMethod::Minimal2, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "seed,method,coding_links,best,avg,std");
  int count = 0;
  std::string last;
  while (std::getline(in, line)) {
    if (line.rfind("summary", 0) == 0) {
      last = line;
      break;
    }
    CHECK(line.substr(line.size() - 3) == ",,,");
    ++count;
  }
  CHECK(count == 30);
  const TrialSummary t = summarize_trials(values);
  char expect[128];
  std::snprintf(expect, sizeof expect, "summary,minimal2,30,%d,%.4f,%.4f", t.best, t.avg, t.std);
  CHECK(last == expect);
}

TEST_CASE("compare rows") {
  CompareOptions opt;
  opt.trials = 3;
  opt.generations = 5;
  opt.population_size = 10;
  const auto rows = compare_methods(fixture::butterfly(), opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == "block");
  CHECK(rows[3].method == "minimal2");
  for (const auto& r : rows) {
    CHECK(r.values.size() == 3);
    CHECK(r.summary.best == 1);
  }
  std::ostringstream out;
  write_compare_csv(out, rows, opt);
  CHECK(out.str().rfind("method,trials,first_seed,best,avg,std\n", 0) == 0);
}

}  // TEST_SUITE
