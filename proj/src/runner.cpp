#include <filesystem>
#include <fstream>
#include <sstream>

#include "sr/log.hpp"
#include "sr/scenario.hpp"

namespace sr {

namespace {

std::vector<AgentState> to_states(const ScenarioConfig& config) {
  std::vector<AgentState> states;
  for (const auto& spec : config.agents) {
    states.push_back({spec.id, spec.dynamics, spec.plan, spec.goals});
  }
  return states;
}

std::vector<std::vector<double>> pair_lambdas(const ScenarioConfig& config) {
  const std::size_t n = config.agents.size();
  std::vector<std::vector<double>> lambda(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      lambda[a][b] =
          0.5 * (config.agents[a].dynamics.diameter + config.agents[b].dynamics.diameter);
    }
  }
  return lambda;
}

MetricsRow metrics_for_plans(const ScenarioConfig& config, const std::vector<Plan>& plans,
                             int rounds, std::vector<Ensemble>* keep_ensembles) {
  std::vector<Ensemble> ensembles;
  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    ensembles.push_back(simulate_paths(config.agents[a].dynamics, plans[a], config.sim,
                                       static_cast<std::uint64_t>(config.agents[a].id)));
  }
  std::vector<Vec> final_goals;
  for (const auto& agent : config.agents) final_goals.push_back(agent.goals.back().point);
  const MetricsRow row = estimate_metrics(ensembles, final_goals, pair_lambdas(config), rounds);
  if (keep_ensembles != nullptr) *keep_ensembles = std::move(ensembles);
  return row;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string paths_csv(const ScenarioConfig& config, const std::vector<Ensemble>& ensembles) {
  std::ostringstream os;
  os.precision(17);
  os << "t,draw,agent,x,y\n";
  for (std::size_t a = 0; a < ensembles.size(); ++a) {
    const Ensemble& e = ensembles[a];
    for (std::size_t draw = 0; draw < e.n_draws; ++draw) {
      for (std::size_t k = 0; k < e.times.size(); ++k) {
        os << e.times[k] << ',' << draw << ',' << config.agents[a].id;
        for (std::size_t j = 0; j < e.dim; ++j) os << ',' << e.at(draw, k, j);
        os << '\n';
      }
    }
  }
  return os.str();
}

// Joint criterion of each agent against all others, sampled uniformly.
std::string criterion_trace_csv(const ScenarioConfig& config, const std::vector<Plan>& plans,
                                const std::string& phase, bool with_header) {
  const CoordinationConfig cc = config.coordination();
  std::vector<AgentState> states = to_states(config);
  for (std::size_t a = 0; a < states.size(); ++a) states[a].plan = plans[a];

  std::ostringstream os;
  os.precision(17);
  if (with_header) os << "phase,agent,t,gamma\n";
  const std::size_t samples = 512;
  for (std::size_t a = 0; a < states.size(); ++a) {
    std::vector<CriterionFn> parts;
    for (std::size_t b = 0; b < states.size(); ++b) {
      if (b == a) continue;
      parts.push_back(pair_criterion_for(states[a], states[b], cc, states.size() - 1));
    }
    if (parts.empty()) continue;
    const CriterionFn gamma = multi_agent_criterion(parts);
    for (std::size_t k = 0; k < samples; ++k) {
      const double t =
          config.t0 + (config.tf - config.t0) * static_cast<double>(k) / (samples - 1);
      os << phase << ',' << states[a].id << ',' << t << ',' << gamma.eval(t) << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::string metrics_csv(const RunReport& report, const ScenarioConfig& config) {
  const char* proto = config.protocol == Protocol::kFixedPriority ? "fp" : "auc";
  const char* resol = config.resolution == Resolution::kWait ? "wait" : "free";
  std::ostringstream os;
  os.precision(17);
  os << "method,collision_prob_pct,avg_path_length,avg_sqr_goal_dist,resolution_rounds,"
        "max_instant_pair_freq_pct\n";
  auto row = [&os](const std::string& name, const MetricsRow& m) {
    os << name << ',' << m.collision_prob_pct << ',' << m.avg_path_length << ','
       << m.avg_sqr_goal_dist << ',' << m.resolution_rounds << ','
       << 100.0 * m.max_instant_pair_freq << '\n';
  };
  row("none", report.metrics_none);
  row(std::string(proto) + "-" + resol, report.metrics_coordinated);
  return os.str();
}

RunReport run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
  config.validate();
  RunReport report;

  std::vector<Plan> initial_plans;
  for (const auto& agent : config.agents) initial_plans.push_back(agent.plan);

  std::vector<AgentState> states = to_states(config);
  const CoordinationConfig cc = config.coordination();
  report.coordination = config.protocol == Protocol::kFixedPriority
                            ? coordinate_fp(states, cc)
                            : coordinate_auc(states, cc);
  report.resolved = report.coordination.resolved;
  for (const auto& state : states) report.final_plans.push_back(state.plan);

  std::vector<Ensemble> ensembles_none, ensembles_final;
  report.metrics_none = metrics_for_plans(config, initial_plans, 0, &ensembles_none);
  report.metrics_coordinated = metrics_for_plans(config, report.final_plans,
                                                 report.coordination.rounds_total, &ensembles_final);

  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "metrics.csv", metrics_csv(report, config));
    write_file(dir / "paths_none.csv", paths_csv(config, ensembles_none));
    write_file(dir / "paths_final.csv", paths_csv(config, ensembles_final));
    write_file(dir / "criterion_trace.csv",
               criterion_trace_csv(config, initial_plans, "before", true) +
                   criterion_trace_csv(config, report.final_plans, "after", false));
    write_file(dir / "auction_log.txt", auction_log_text(report.coordination));
    write_file(dir / "scenario_echo.cfg", serialize_scenario(config));
  }
  return report;
}

}  // namespace sr
