#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "codemin_cli_tests";
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI with stdout and stderr captured; returns the exit status.
int run(const std::string& args, std::string* out = nullptr) {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd = std::string(CODEMIN_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_arg(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  const auto b = shell_arg(fixture::data_path("butterfly_B.json"));
  CHECK(run("") == 2);
  CHECK(run("opt") == 2);
  CHECK(run("opt " + b + " --mode sideways") == 2);
  CHECK(run("gen --rate 0") == 2);
  CHECK(run("opt /nonexistent.json") == 2);
  CHECK(run("gen --nodes 5 --links 4 --sinks 3 --rate 3 --max-attempts 5") == 3);

  const fs::path thin = scratch() / "thin.json";
  std::ofstream(thin) << R"({"nodes":["s","a","t"],"links":[{"id":0,"from":"s","to":"a"},{"id":1,"from":"a","to":"t"}],)"
                      << R"("source":"s","sinks":["t"],"rate":2})";
  std::string out;
  CHECK(run("opt " + shell_arg(thin) + " --pop 4 --gens 1", &out) == 3);

  const fs::path loop = scratch() / "loop.json";
  std::ofstream(loop) << R"({"nodes":["s","a","b","t"],"links":[{"id":0,"from":"s","to":"a"},{"id":1,"from":"a","to":"b"},)"
                      << R"({"id":2,"from":"b","to":"a"},{"id":3,"from":"b","to":"t"}],"source":"s","sinks":["t"],"rate":1})";
  CHECK(run("opt " + shell_arg(loop) + " --mode dist --pop 4 --gens 1", &out) == 2);
  CHECK(out.find("--acyclic-prune") != std::string::npos);
  CHECK(run("opt " + shell_arg(loop) + " --mode dist --pop 4 --gens 1 --acyclic-prune") == 0);
}

TEST_CASE("gen is deterministic") {
  const fs::path a = scratch() / "gen_a.json", c = scratch() / "gen_c.json";
  std::string out;
  REQUIRE(run("gen --nodes 20 --links 40 --sinks 4 --rate 2 --seed 5 -o " + shell_arg(a), &out) == 0);
  CHECK(out.find("min_sink_max_flow=") != std::string::npos);
  REQUIRE(run("gen --nodes 20 --links 40 --sinks 4 --rate 2 --seed 5 -o " + shell_arg(c)) == 0);
  CHECK(slurp(a) == slurp(c));
  CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("opt output is reproducible, including distributed runs") {
  const auto bp = shell_arg(fixture::data_path("butterfly_Bprime.json"));
  for (const std::string mode : {"central", "dist"}) {
    const fs::path c1 = scratch() / (mode + "1.csv"), c2 = scratch() / (mode + "2.csv");
    const fs::path j1 = scratch() / (mode + "1.json"), j2 = scratch() / (mode + "2.json");
    std::string out;
    const std::string common = "opt " + bp + " --mode " + mode + " --pop 20 --gens 30 --tournament 13 --alpha 0.3 --seed 7";
    REQUIRE(run(common + " --jobs 1 --csv " + shell_arg(c1) + " --json " + shell_arg(j1), &out) == 0);
    CHECK(out.find("best=0") != std::string::npos);
    REQUIRE(run(common + " --jobs 4 --csv " + shell_arg(c2) + " --json " + shell_arg(j2)) == 0);
    CHECK(slurp(c1) == slurp(c2));
    CHECK(slurp(j1) == slurp(j2));
  }
}

TEST_CASE("CODEMIN_SEED sets the default seed") {
  const auto bp = shell_arg(fixture::data_path("butterfly_Bprime.json"));
  std::string out;
  REQUIRE(run("opt " + bp + " --pop 8 --gens 2", &out) == 0);
  CHECK(out.find("seed=1") != std::string::npos);
  REQUIRE(std::system(("CODEMIN_SEED=42 " + std::string(CODEMIN_CLI) + " opt " + bp + " --pop 8 --gens 2 >" +
                       (scratch() / "seed.txt").string())
                          .c_str()) == 0);
  CHECK(slurp(scratch() / "seed.txt").find("seed=42") != std::string::npos);
}

TEST_CASE("baseline writes one row per trial and a summary") {
  const auto b = shell_arg(fixture::data_path("butterfly_B.json"));
  const fs::path csv = scratch() / "baseline.csv";
  REQUIRE(run("baseline " + b + " --method minimal1 --trials 30 -o " + shell_arg(csv)) == 0);
  std::istringstream in(slurp(csv));
  std::string line;
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 32);
  CHECK(last == "summary,minimal1,30,1,1.0000,0.0000");
  CHECK(run("baseline " + b + " --method minimal9") == 2);
}

TEST_CASE("eval") {
  const auto b = shell_arg(fixture::data_path("butterfly_B.json"));
  std::string out;
  REQUIRE(run("eval " + b + " --all-one", &out) == 0);
  CHECK(out.find("fitness=1") != std::string::npos);
  REQUIRE(run("eval " + b + " --bits 10", &out) == 0);
  CHECK(out.find("fitness=inf") != std::string::npos);
  CHECK(run("eval " + b + " --bits 10 --all-one") == 2);
}

}  // TEST_SUITE
