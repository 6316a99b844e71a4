// stochroute - scenario-driven multi-agent collision prediction/avoidance
// simulator. Subcommands: run, detect, confidence, validate-moments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sr/certify.hpp"
#include "sr/scenario.hpp"
#include "sr/scp_confidence.hpp"

namespace {

struct CommonOverrides {
  std::string protocol, resolution, criterion, detector;
  long long seed = -1;
  long long draws = -1;
  double dt = -1.0;
};

void apply_overrides(sr::ScenarioConfig& config, const CommonOverrides& ov) {
  if (!ov.protocol.empty()) {
    config.protocol = ov.protocol == "fp" ? sr::Protocol::kFixedPriority : sr::Protocol::kAuction;
  }
  if (!ov.resolution.empty()) {
    config.resolution = ov.resolution == "wait" ? sr::Resolution::kWait : sr::Resolution::kFree;
  }
  if (!ov.criterion.empty()) {
    config.criterion = ov.criterion == "cheb" ? sr::CriterionKind::kChebyshev1D
                                              : sr::CriterionKind::kWhittle2D;
  }
  if (!ov.detector.empty()) {
    if (ov.detector == "naive") config.detector = sr::DetectorKind::kNaive;
    else if (ov.detector == "adaptive") config.detector = sr::DetectorKind::kAdaptive;
    else config.detector = sr::DetectorKind::kGridFallback;
  }
  if (ov.seed >= 0) config.sim.master_seed = static_cast<std::uint64_t>(ov.seed);
  if (ov.draws > 0) config.sim.n_draws = static_cast<std::size_t>(ov.draws);
  if (ov.dt > 0.0) config.sim.dt = ov.dt;
}

sr::ScpPrior parse_prior(const std::string& text) {
  sr::ScpPrior prior;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("prior entries are n:prob");
    prior.mass[std::stoi(part.substr(0, colon))] = std::stod(part.substr(colon + 1));
  }
  prior.validate();
  return prior;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const CommonOverrides& ov) {
  sr::ScenarioConfig config = sr::load_scenario(config_path);
  apply_overrides(config, ov);
  const sr::RunReport report = sr::run_scenario(config, out_dir);
  std::cout << sr::metrics_csv(report, config);
  if (!report.resolved) {
    std::cerr << "coordination did not resolve within max_rounds\n";
    return 2;
  }
  return 0;
}

// Demo target from the certifier documentation: |sin x| cos x + 1/4 on [0,7].
sr::ScalarTarget demo_target() {
  sr::ScalarTarget target;
  target.eval = [](double x) { return std::abs(std::sin(x)) * std::cos(x) + 0.25; };
  target.t0 = 0.0;
  target.tf = 7.0;
  target.lipschitz = 1.0;
  return target;
}

int cmd_detect(const std::string& config_path, int agent_a, int agent_b, bool demo,
               const std::string& detector_name, const std::string& trace_path,
               const CommonOverrides& ov) {
  sr::ScalarTarget target;
  if (demo) {
    target = demo_target();
  } else {
    sr::ScenarioConfig config = sr::load_scenario(config_path);
    apply_overrides(config, ov);
    const sr::CoordinationConfig cc = config.coordination();
    const sr::AgentSpec* sa = nullptr;
    const sr::AgentSpec* sb = nullptr;
    for (const auto& agent : config.agents) {
      if (agent.id == agent_a) sa = &agent;
      if (agent.id == agent_b) sb = &agent;
    }
    if (sa == nullptr || sb == nullptr) {
      std::cerr << "unknown agent id in --pair\n";
      return 1;
    }
    const sr::AgentState state_a{sa->id, sa->dynamics, sa->plan, sa->goals};
    const sr::AgentState state_b{sb->id, sb->dynamics, sb->plan, sb->goals};
    const sr::CriterionFn gamma = sr::pair_criterion_for(state_a, state_b, cc, 1);
    target.eval = gamma.eval;
    target.t0 = gamma.t0;
    target.tf = gamma.tf;
    target.lipschitz = std::max(gamma.lipschitz, 1e-12);
  }

  const sr::CertificationOutcome outcome =
      detector_name == "naive" ? sr::certify_naive(target) : sr::certify_adaptive(target);
  const char* verdict = outcome.flag == sr::CertVerdict::kNonPositiveFound
                            ? "non-positive-found"
                            : outcome.flag == sr::CertVerdict::kAllPositive ? "all-positive"
                                                                            : "inconclusive";
  std::cout << "verdict=" << verdict << " critical_time="
            << sr::critical_time_sentinel(target, outcome) << " evaluations="
            << outcome.evaluations << " floor_min=" << outcome.floor_min << "\n";
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    out << sr::certification_trace_csv(target, outcome);
  }
  return 0;
}

int cmd_confidence(const std::string& prior_text, double theta, int k) {
  const sr::ScpPrior prior = parse_prior(prior_text);
  if (k > 0) {
    std::cout << "k=" << k << " miss_bound=" << sr::lattice_confidence_miss(prior, k)
              << " confidence=" << 1.0 - sr::lattice_confidence_miss(prior, k) << "\n";
    return 0;
  }
  const int chosen = sr::choose_k(prior, theta);
  std::cout << "theta=" << theta << " k=" << chosen << "\n";
  return 0;
}

int cmd_validate_moments(const std::string& config_path, long long draws, double dt,
                         long long seed) {
  sr::SimConfig sim;
  sim.n_draws = draws > 0 ? static_cast<std::size_t>(draws) : 100000;
  sim.dt = dt > 0.0 ? dt : 1e-3;
  sim.master_seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : 7;

  struct Case {
    std::string name;
    sr::AgentDynamics dyn;
    sr::Plan plan;
  };
  std::vector<Case> cases;
  if (config_path.empty()) {
    Case c;
    c.name = "reference-plant";
    c.dyn.gain = {1.0};
    c.dyn.drift = {0.0};
    c.dyn.noise = {0.2};
    c.dyn.initial_mean = {0.0};
    c.dyn.initial_cov = {0.0};
    c.plan.times = {0.0};
    c.plan.setpoints = {{1.0}};
    c.plan.horizon_end = 2.0;
    cases.push_back(std::move(c));
  } else {
    const sr::ScenarioConfig config = sr::load_scenario(config_path);
    for (const auto& agent : config.agents) {
      cases.push_back({"agent-" + std::to_string(agent.id), agent.dynamics, agent.plan});
    }
  }

  bool all_pass = true;
  std::cout << "case,t,dim,mean_closed,mean_mc,mean_ok,var_closed,var_mc,var_ok\n";
  for (const auto& c : cases) {
    const double t0 = c.plan.t0();
    const double tf = c.plan.tf();
    const std::vector<double> queries = {t0 + 0.5 * (tf - t0), tf};
    const sr::EmpiricalMoments emp = sr::empirical_moments(c.dyn, c.plan, sim, queries);
    for (std::size_t qi = 0; qi < emp.times.size(); ++qi) {
      const sr::Vec mu = sr::mean_at(c.dyn, c.plan, emp.times[qi]);
      const sr::Vec cov = sr::cov_at(c.dyn, c.plan, emp.times[qi]);
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double se = std::sqrt(emp.variance[qi][j] / static_cast<double>(emp.n_draws));
        const bool mean_ok = std::abs(emp.mean[qi][j] - mu[j]) <= 3.0 * se + 1e-12;
        const bool var_ok = cov[j] < 1e-9
                                ? emp.variance[qi][j] < 1e-6
                                : std::abs(emp.variance[qi][j] - cov[j]) / cov[j] <= 0.05;
        all_pass = all_pass && mean_ok && var_ok;
        std::cout << c.name << ',' << emp.times[qi] << ',' << j << ',' << mu[j] << ','
                  << emp.mean[qi][j] << ',' << (mean_ok ? "yes" : "NO") << ',' << cov[j] << ','
                  << emp.variance[qi][j] << ',' << (var_ok ? "yes" : "NO") << "\n";
      }
    }
  }
  std::cout << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochroute: probabilistic multi-agent collision prediction and avoidance"};
  app.require_subcommand(1);

  CommonOverrides ov;
  std::string config_path, out_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--protocol", ov.protocol, "fp|auc")->check(CLI::IsMember({"fp", "auc"}));
    cmd->add_option("--resolution", ov.resolution, "wait|free")
        ->check(CLI::IsMember({"wait", "free"}));
    cmd->add_option("--criterion", ov.criterion, "cheb|whittle")
        ->check(CLI::IsMember({"cheb", "whittle"}));
    cmd->add_option("--detector", ov.detector, "naive|adaptive|grid")
        ->check(CLI::IsMember({"naive", "adaptive", "grid"}));
    cmd->add_option("--seed", ov.seed, "master RNG seed");
    cmd->add_option("--draws", ov.draws, "Monte Carlo draws");
    cmd->add_option("--dt", ov.dt, "Euler-Maruyama step");
  };

  CLI::App* run = app.add_subcommand("run", "run a scenario end to end");
  run->add_option("--config", config_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  add_common(run);

  CLI::App* detect_cmd = app.add_subcommand("detect", "certify a single pair / demo target");
  bool demo = false;
  std::vector<int> pair_ids;
  std::string detector_name = "adaptive";
  std::string trace_path;
  detect_cmd->add_option("--config", config_path, "scenario file");
  detect_cmd->add_option("--pair", pair_ids, "two agent ids")->expected(2);
  detect_cmd->add_flag("--demo-target", demo, "use the bundled sample target function");
  detect_cmd->add_option("--with", detector_name, "naive|adaptive")
      ->check(CLI::IsMember({"naive", "adaptive"}));
  detect_cmd->add_option("--trace", trace_path, "write the certification trace CSV here");
  add_common(detect_cmd);

  CLI::App* conf = app.add_subcommand("confidence", "lattice sign-scan confidence");
  std::string prior_text;
  double theta = 0.99;
  int k_query = 0;
  conf->add_option("--prior", prior_text, "comma list n:prob, e.g. 0:0.5,1:0.1,2:0.4")->required();
  conf->add_option("--theta", theta, "target confidence in (0,1)");
  conf->add_option("--k", k_query, "evaluate a fixed lattice size instead");

  CLI::App* val = app.add_subcommand("validate-moments", "closed form vs Monte Carlo");
  val->add_option("--config", config_path, "scenario file (default: reference plant)");
  add_common(val);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path, out_dir, ov);
    if (detect_cmd->parsed()) {
      if (!demo && pair_ids.size() != 2) {
        std::cerr << "detect needs --demo-target or --config with --pair A B\n";
        return 1;
      }
      return cmd_detect(config_path, demo ? 0 : pair_ids[0], demo ? 0 : pair_ids[1], demo,
                        detector_name, trace_path, ov);
    }
    if (conf->parsed()) return cmd_confidence(prior_text, theta, k_query);
    if (val->parsed()) return cmd_validate_moments(config_path, ov.draws, ov.dt, ov.seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
