#pragma once

#include <string>
#include <vector>

#include "sr/coordination.hpp"
#include "sr/montecarlo.hpp"

namespace sr {

struct AgentSpec {
  int id = 0;
  AgentDynamics dynamics;
  Plan plan;
  std::vector<Goal> goals;
};

// Declarative multi-agent scenario. The text format is line oriented:
// `key = value` pairs, `#` comments, `[agent N]` sections for per-agent
// fields. See the bundled scenarios/ files.
struct ScenarioConfig {
  double t0 = 0.0;
  double tf = 1.0;
  double delta = 0.05;
  bool delta_per_pair = false;
  CriterionKind criterion = CriterionKind::kWhittle2D;
  DetectorKind detector = DetectorKind::kAdaptive;
  Protocol protocol = Protocol::kAuction;
  Resolution resolution = Resolution::kWait;
  int max_rounds = 50;
  std::size_t detector_budget = 10000;
  CostWeights weights{};
  Box arena{};
  int free_restarts = 10;
  SimConfig sim{};
  std::vector<AgentSpec> agents;

  void validate() const;
  CoordinationConfig coordination() const;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& config);
bool scenario_equal(const ScenarioConfig& a, const ScenarioConfig& b);

struct RunReport {
  bool resolved = false;
  MetricsRow metrics_none;
  MetricsRow metrics_coordinated;
  CoordinationReport coordination;
  std::vector<Plan> final_plans;
};

// Full pipeline: coordinate, then Monte-Carlo both the initial and the final
// plans, and write metrics/paths/criterion-trace/auction-log files into
// out_dir (created if needed; pass empty to skip file output).
RunReport run_scenario(const ScenarioConfig& config, const std::string& out_dir);

std::string metrics_csv(const RunReport& report, const ScenarioConfig& config);

}  // namespace sr
