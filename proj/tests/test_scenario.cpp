#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sr/scenario.hpp"

using namespace sr;

namespace {

const char* kSample = R"cfg(
# corridor crossing
horizon = 0 2
delta = 0.05
delta_per_pair = true
criterion = whittle
detector = adaptive
protocol = auc
resolution = wait
max_rounds = 50
weights = 10 1e3 1e6
lambda = 1
arena = 0 0 10 10
draws = 50
dt = 1e-3
seed = 12345

[agent 1]
gain = 2 2
noise = 0.15 0.15
start = 5 10
diameter = 1
plan = 0: 5 10 | 2: 5 5
goal = 2: 5 5

[agent 2]
gain = 5 5
noise = 0.15 0.15
start = 5 0
diameter = 1
plan = 0: 5 0 | 1: 5 7 | 2: 0 7
goal = 1: 5 7 | 2: 0 7
)cfg";

}  // namespace

TEST_CASE("scenario round-trips through serialization") {
  const ScenarioConfig first = parse_scenario(kSample);
  const ScenarioConfig second = parse_scenario(serialize_scenario(first));
  CHECK(scenario_equal(first, second));
  CHECK(first.agents.size() == 2);
  CHECK(first.agents[1].goals.size() == 2);
  CHECK(first.agents[0].dynamics.initial_cov == Vec{1e-6, 1e-6});  // default start_var
  CHECK(first.agents[0].dynamics.drift == Vec{0.0, 0.0});          // default drift
}

TEST_CASE("parse errors carry line numbers") {
  const std::string broken = "horizon = 0 2\nnot a key value pair\n";
  try {
    parse_scenario(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("malformed inputs are rejected with diagnostics") {
  CHECK_THROWS_AS(parse_scenario("horizon = 0 2\n"), ParseError);      // no agents
  CHECK_THROWS_AS(parse_scenario("delta = 0.05\n[agent 1]\ngain = 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("horizon = zero two\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("horizon = 0 2\n[agent 1]\ngain = 2 2\nnoise = 0.1 0.1\n"
                                 "start = 0 0\nplan = 0: 0 0\nbogus = 3\n"),
                  ParseError);
}

TEST_CASE("duplicate agent ids fail validation") {
  std::string dup = kSample;
  const auto pos = dup.find("[agent 2]");
  dup.replace(pos, 9, "[agent 1]");
  CHECK_THROWS_AS(parse_scenario(dup), ParseError);
}

TEST_CASE("metrics CSV header is stable") {
  RunReport report;
  const ScenarioConfig config = parse_scenario(kSample);
  const std::string csv = metrics_csv(report, config);
  CHECK(csv.rfind("method,collision_prob_pct,avg_path_length,avg_sqr_goal_dist,"
                  "resolution_rounds,max_instant_pair_freq_pct\n",
                  0) == 0);
  CHECK(csv.find("auc-wait") != std::string::npos);
}

TEST_CASE("arena defaults to the bounding box of starts and setpoints") {
  std::string no_arena = kSample;
  const auto pos = no_arena.find("arena = 0 0 10 10\n");
  no_arena.erase(pos, std::string("arena = 0 0 10 10\n").size());
  const ScenarioConfig config = parse_scenario(no_arena);
  CHECK(config.arena.lo == Vec{0.0, 0.0});
  CHECK(config.arena.hi == Vec{5.0, 10.0});
}

TEST_CASE("run pipeline writes the documented outputs") {
  ScenarioConfig config = parse_scenario(kSample);
  config.sim.n_draws = 10;
  config.sim.dt = 1e-2;

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "stochroute_run_outputs";
  fs::remove_all(dir);
  const RunReport report = run_scenario(config, dir.string());
  CHECK(report.resolved);
  CHECK(report.metrics_coordinated.collision_prob_pct == 0.0);

  auto slurp = [&](const char* name) {
    std::ifstream in(dir / name);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  CHECK(slurp("paths_none.csv").rfind("t,draw,agent,x,y\n", 0) == 0);
  CHECK(slurp("paths_final.csv").rfind("t,draw,agent,x,y\n", 0) == 0);
  CHECK(slurp("criterion_trace.csv").rfind("phase,agent,t,gamma\n", 0) == 0);
  CHECK(slurp("auction_log.txt").find("rounds_total=") != std::string::npos);

  // the echoed scenario re-parses to the same configuration
  const ScenarioConfig echoed = parse_scenario(slurp("scenario_echo.cfg"));
  CHECK(scenario_equal(config, echoed));
}
