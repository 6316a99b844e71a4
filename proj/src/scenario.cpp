#include "sr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sr/log.hpp"

namespace sr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_numbers(const std::string& value, int line_no) {
  std::vector<double> out;
  std::istringstream is(value);
  std::string tok;
  while (is >> tok) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": expected a number, got '" + tok + "'");
    }
  }
  return out;
}

double parse_one_number(const std::string& value, int line_no) {
  const auto nums = parse_numbers(value, line_no);
  if (nums.size() != 1) {
    throw ParseError("line " + std::to_string(line_no) + ": expected a single number");
  }
  return nums[0];
}

// "t: x y | t: x y | ..." into (times, points)
void parse_timed_points(const std::string& value, int line_no, std::vector<double>& times,
                        std::vector<Vec>& points) {
  std::istringstream is(value);
  std::string part;
  while (std::getline(is, part, '|')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'time: coords' in '" + part + "'");
    }
    times.push_back(parse_one_number(trim(part.substr(0, colon)), line_no));
    points.push_back(parse_numbers(trim(part.substr(colon + 1)), line_no));
  }
  if (times.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": empty timed-point list");
  }
}

bool parse_bool(const std::string& value, int line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("line " + std::to_string(line_no) + ": expected true/false, got '" + value + "'");
}

struct RawAgent {
  int id = 0;
  Vec gain, drift, noise, start, start_var;
  double diameter = 1.0;
  std::vector<double> plan_times;
  std::vector<Vec> plan_points;
  std::vector<double> goal_times;
  std::vector<Vec> goal_points;
  bool has_drift = false, has_start_var = false;
};

}  // namespace

void ScenarioConfig::validate() const {
  if (!(t0 < tf)) throw std::invalid_argument("scenario needs t0 < tf");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  if (agents.empty()) throw std::invalid_argument("scenario needs at least one agent");
  std::vector<int> ids;
  for (const auto& agent : agents) {
    ids.push_back(agent.id);
    agent.dynamics.validate();
    agent.plan.validate(agent.dynamics.dim());
    if (agent.plan.t0() != t0 || agent.plan.tf() != tf) {
      throw std::invalid_argument("agent plans must share the scenario horizon");
    }
    for (const auto& goal : agent.goals) {
      if (goal.time < t0 || goal.time > tf) throw std::invalid_argument("goal time outside horizon");
      if (goal.point.size() != agent.dynamics.dim()) {
        throw std::invalid_argument("goal dimension mismatch");
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("agent ids must be unique");
  }
  if (criterion == CriterionKind::kWhittle2D) {
    for (const auto& agent : agents) {
      if (agent.dynamics.dim() != 2) {
        throw std::invalid_argument("the 2-D criterion requires two-dimensional agents");
      }
    }
  }
  sim.validate();
}

CoordinationConfig ScenarioConfig::coordination() const {
  CoordinationConfig cc;
  cc.protocol = protocol;
  cc.resolution = resolution;
  cc.max_rounds = max_rounds;
  cc.delta = delta;
  cc.delta_per_pair = delta_per_pair;
  cc.criterion = criterion;
  cc.detector = detector;
  cc.detector_budget = detector_budget;
  cc.weights = weights;
  cc.arena = arena;
  cc.free_restarts = free_restarts;
  cc.seed = sim.master_seed;
  return cc;
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig config;
  std::vector<RawAgent> raw_agents;
  RawAgent* current = nullptr;
  bool have_horizon = false, have_arena = false;

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": unterminated section");
      std::istringstream sec(line.substr(1, line.size() - 2));
      std::string word;
      int id = 0;
      sec >> word >> id;
      if (word != "agent" || sec.fail()) {
        throw ParseError("line " + std::to_string(line_no) + ": expected [agent N]");
      }
      raw_agents.emplace_back();
      raw_agents.back().id = id;
      current = &raw_agents.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError("line " + std::to_string(line_no) + ": missing value for " + key);

    if (current == nullptr) {
      if (key == "horizon") {
        const auto nums = parse_numbers(value, line_no);
        if (nums.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": horizon needs two numbers");
        config.t0 = nums[0];
        config.tf = nums[1];
        have_horizon = true;
      } else if (key == "delta") {
        config.delta = parse_one_number(value, line_no);
      } else if (key == "delta_per_pair") {
        config.delta_per_pair = parse_bool(value, line_no);
      } else if (key == "criterion") {
        if (value == "cheb") config.criterion = CriterionKind::kChebyshev1D;
        else if (value == "whittle") config.criterion = CriterionKind::kWhittle2D;
        else throw ParseError("line " + std::to_string(line_no) + ": criterion must be cheb|whittle");
      } else if (key == "detector") {
        if (value == "naive") config.detector = DetectorKind::kNaive;
        else if (value == "adaptive") config.detector = DetectorKind::kAdaptive;
        else if (value == "grid") config.detector = DetectorKind::kGridFallback;
        else throw ParseError("line " + std::to_string(line_no) + ": detector must be naive|adaptive|grid");
      } else if (key == "protocol") {
        if (value == "fp") config.protocol = Protocol::kFixedPriority;
        else if (value == "auc") config.protocol = Protocol::kAuction;
        else throw ParseError("line " + std::to_string(line_no) + ": protocol must be fp|auc");
      } else if (key == "resolution") {
        if (value == "wait") config.resolution = Resolution::kWait;
        else if (value == "free") config.resolution = Resolution::kFree;
        else throw ParseError("line " + std::to_string(line_no) + ": resolution must be wait|free");
      } else if (key == "max_rounds") {
        config.max_rounds = static_cast<int>(parse_one_number(value, line_no));
      } else if (key == "detector_budget") {
        config.detector_budget = static_cast<std::size_t>(parse_one_number(value, line_no));
      } else if (key == "weights") {
        const auto nums = parse_numbers(value, line_no);
        if (nums.size() != 3) throw ParseError("line " + std::to_string(line_no) + ": weights needs w1 w2 w3");
        config.weights.w_traj = nums[0];
        config.weights.w_miss = nums[1];
        config.weights.w_coll = nums[2];
      } else if (key == "lambda") {
        config.weights.lambda_hinge = parse_one_number(value, line_no);
      } else if (key == "arena") {
        const auto nums = parse_numbers(value, line_no);
        if (nums.size() % 2 != 0 || nums.empty()) {
          throw ParseError("line " + std::to_string(line_no) + ": arena needs lo... hi... pairs");
        }
        const std::size_t d = nums.size() / 2;
        config.arena.lo.assign(nums.begin(), nums.begin() + d);
        config.arena.hi.assign(nums.begin() + d, nums.end());
        have_arena = true;
      } else if (key == "free_restarts") {
        config.free_restarts = static_cast<int>(parse_one_number(value, line_no));
      } else if (key == "draws") {
        config.sim.n_draws = static_cast<std::size_t>(parse_one_number(value, line_no));
      } else if (key == "dt") {
        config.sim.dt = parse_one_number(value, line_no);
      } else if (key == "seed") {
        config.sim.master_seed = static_cast<std::uint64_t>(parse_one_number(value, line_no));
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
      continue;
    }

    // per-agent keys
    if (key == "gain") current->gain = parse_numbers(value, line_no);
    else if (key == "drift") { current->drift = parse_numbers(value, line_no); current->has_drift = true; }
    else if (key == "noise") current->noise = parse_numbers(value, line_no);
    else if (key == "start") current->start = parse_numbers(value, line_no);
    else if (key == "start_var") { current->start_var = parse_numbers(value, line_no); current->has_start_var = true; }
    else if (key == "diameter") current->diameter = parse_one_number(value, line_no);
    else if (key == "plan") parse_timed_points(value, line_no, current->plan_times, current->plan_points);
    else if (key == "goal") parse_timed_points(value, line_no, current->goal_times, current->goal_points);
    else throw ParseError("line " + std::to_string(line_no) + ": unknown agent key '" + key + "'");
  }

  if (!have_horizon) throw ParseError("scenario is missing the horizon");
  if (raw_agents.empty()) throw ParseError("scenario defines no agents");

  for (const auto& raw : raw_agents) {
    AgentSpec spec;
    spec.id = raw.id;
    const std::size_t d = raw.gain.size();
    if (d == 0) throw ParseError("agent " + std::to_string(raw.id) + " is missing gain");
    if (raw.start.size() != d || raw.noise.size() != d) {
      throw ParseError("agent " + std::to_string(raw.id) + " field dimensions disagree");
    }
    spec.dynamics.gain = raw.gain;
    spec.dynamics.drift = raw.has_drift ? raw.drift : Vec(d, 0.0);
    spec.dynamics.noise = raw.noise;
    spec.dynamics.initial_mean = raw.start;
    spec.dynamics.initial_cov = raw.has_start_var ? raw.start_var : Vec(d, 1e-6);
    spec.dynamics.diameter = raw.diameter;

    if (raw.plan_times.empty()) {
      throw ParseError("agent " + std::to_string(raw.id) + " is missing a plan");
    }
    spec.plan.times = raw.plan_times;
    spec.plan.setpoints = raw.plan_points;
    spec.plan.horizon_end = config.tf;

    for (std::size_t g = 0; g < raw.goal_times.size(); ++g) {
      spec.goals.push_back({raw.goal_times[g], raw.goal_points[g]});
    }
    if (spec.goals.empty()) {
      // default: last plan setpoint at the horizon end
      spec.goals.push_back({config.tf, raw.plan_points.back()});
    }
    config.agents.push_back(std::move(spec));
  }

  if (!have_arena) {
    // bounding box over all plan points and starts
    const std::size_t d = config.agents.front().dynamics.dim();
    config.arena.lo.assign(d, std::numeric_limits<double>::infinity());
    config.arena.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& agent : config.agents) {
      auto fold = [&](const Vec& p) {
        for (std::size_t j = 0; j < d; ++j) {
          config.arena.lo[j] = std::min(config.arena.lo[j], p[j]);
          config.arena.hi[j] = std::max(config.arena.hi[j], p[j]);
        }
      };
      fold(agent.dynamics.initial_mean);
      for (const auto& s : agent.plan.setpoints) fold(s);
    }
  }

  try {
    config.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError(std::string("invalid scenario: ") + err.what());
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << "horizon = " << config.t0 << ' ' << config.tf << '\n';
  os << "delta = " << config.delta << '\n';
  os << "delta_per_pair = " << (config.delta_per_pair ? "true" : "false") << '\n';
  os << "criterion = " << (config.criterion == CriterionKind::kChebyshev1D ? "cheb" : "whittle") << '\n';
  os << "detector = "
     << (config.detector == DetectorKind::kNaive
             ? "naive"
             : config.detector == DetectorKind::kAdaptive ? "adaptive" : "grid")
     << '\n';
  os << "protocol = " << (config.protocol == Protocol::kFixedPriority ? "fp" : "auc") << '\n';
  os << "resolution = " << (config.resolution == Resolution::kWait ? "wait" : "free") << '\n';
  os << "max_rounds = " << config.max_rounds << '\n';
  os << "detector_budget = " << config.detector_budget << '\n';
  os << "weights = " << config.weights.w_traj << ' ' << config.weights.w_miss << ' '
     << config.weights.w_coll << '\n';
  os << "lambda = " << config.weights.lambda_hinge << '\n';
  os << "arena =";
  for (double x : config.arena.lo) os << ' ' << x;
  for (double x : config.arena.hi) os << ' ' << x;
  os << '\n';
  os << "free_restarts = " << config.free_restarts << '\n';
  os << "draws = " << config.sim.n_draws << '\n';
  os << "dt = " << config.sim.dt << '\n';
  os << "seed = " << config.sim.master_seed << '\n';
  for (const auto& agent : config.agents) {
    os << "\n[agent " << agent.id << "]\n";
    auto vec = [&os](const char* key, const Vec& v) {
      os << key << " =";
      for (double x : v) os << ' ' << x;
      os << '\n';
    };
    vec("gain", agent.dynamics.gain);
    vec("drift", agent.dynamics.drift);
    vec("noise", agent.dynamics.noise);
    vec("start", agent.dynamics.initial_mean);
    vec("start_var", agent.dynamics.initial_cov);
    os << "diameter = " << agent.dynamics.diameter << '\n';
    os << "plan = ";
    for (std::size_t i = 0; i < agent.plan.times.size(); ++i) {
      if (i) os << " | ";
      os << agent.plan.times[i] << ':';
      for (double x : agent.plan.setpoints[i]) os << ' ' << x;
    }
    os << '\n';
    if (!agent.goals.empty()) {
      os << "goal = ";
      for (std::size_t i = 0; i < agent.goals.size(); ++i) {
        if (i) os << " | ";
        os << agent.goals[i].time << ':';
        for (double x : agent.goals[i].point) os << ' ' << x;
      }
      os << '\n';
    }
  }
  return os.str();
}

bool scenario_equal(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto vec_eq = [](const Vec& x, const Vec& y) { return x == y; };
  if (a.t0 != b.t0 || a.tf != b.tf || a.delta != b.delta || a.delta_per_pair != b.delta_per_pair ||
      a.criterion != b.criterion || a.detector != b.detector || a.protocol != b.protocol ||
      a.resolution != b.resolution || a.max_rounds != b.max_rounds ||
      a.detector_budget != b.detector_budget || a.free_restarts != b.free_restarts) {
    return false;
  }
  if (a.weights.w_traj != b.weights.w_traj || a.weights.w_miss != b.weights.w_miss ||
      a.weights.w_coll != b.weights.w_coll || a.weights.lambda_hinge != b.weights.lambda_hinge) {
    return false;
  }
  if (!vec_eq(a.arena.lo, b.arena.lo) || !vec_eq(a.arena.hi, b.arena.hi)) return false;
  if (a.sim.n_draws != b.sim.n_draws || a.sim.dt != b.sim.dt ||
      a.sim.master_seed != b.sim.master_seed) {
    return false;
  }
  if (a.agents.size() != b.agents.size()) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const auto& x = a.agents[i];
    const auto& y = b.agents[i];
    if (x.id != y.id || !vec_eq(x.dynamics.gain, y.dynamics.gain) ||
        !vec_eq(x.dynamics.drift, y.dynamics.drift) || !vec_eq(x.dynamics.noise, y.dynamics.noise) ||
        !vec_eq(x.dynamics.initial_mean, y.dynamics.initial_mean) ||
        !vec_eq(x.dynamics.initial_cov, y.dynamics.initial_cov) ||
        x.dynamics.diameter != y.dynamics.diameter) {
      return false;
    }
    if (x.plan.times != y.plan.times || x.plan.setpoints != y.plan.setpoints ||
        x.plan.horizon_end != y.plan.horizon_end) {
      return false;
    }
    if (x.goals.size() != y.goals.size()) return false;
    for (std::size_t g = 0; g < x.goals.size(); ++g) {
      if (x.goals[g].time != y.goals[g].time || !vec_eq(x.goals[g].point, y.goals[g].point)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace sr
