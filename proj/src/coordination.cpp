#include "sr/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "sr/log.hpp"

namespace sr {

namespace {

double pair_delta(const CoordinationConfig& config, std::size_t opponent_count) {
  if (config.delta_per_pair || opponent_count == 0) return config.delta;
  return config.delta / static_cast<double>(opponent_count);
}

std::shared_ptr<const MomentFunctions> moments_for(const AgentState& agent) {
  return std::make_shared<MomentFunctions>(agent.dynamics, agent.plan);
}

ConflictContext context_against(const AgentState& self,
                                const std::vector<const AgentState*>& opponents,
                                const CoordinationConfig& config) {
  ConflictContext ctx;
  ctx.delta = pair_delta(config, opponents.size());
  ctx.kind = config.criterion;
  ctx.own_diameter = self.dynamics.diameter;
  for (const AgentState* opp : opponents) {
    ctx.opponents.push_back(moments_for(*opp));
    ctx.opponent_diameters.push_back(opp->dynamics.diameter);
  }
  return ctx;
}

Plan resolve_plan(const AgentState& agent, const std::vector<const AgentState*>& opponents,
                  double t_coll, const CoordinationConfig& config) {
  if (config.resolution == Resolution::kWait) {
    return resolve_wait(agent.plan, agent.dynamics, t_coll);
  }
  const ConflictContext ctx = context_against(agent, opponents, config);
  return resolve_free(agent.plan, agent.dynamics, agent.goals, config.weights, ctx, config.arena,
                      config.free_restarts, config.seed ^ static_cast<std::uint64_t>(agent.id));
}

DetectionReport detect_against(const AgentState& self, const std::vector<const AgentState*>& others,
                               const CoordinationConfig& config) {
  std::map<int, CriterionFn> criteria;
  std::vector<int> ids;
  for (const AgentState* other : others) {
    criteria.emplace(other->id, pair_criterion_for(self, *other, config, others.size()));
    ids.push_back(other->id);
  }
  return detect(self.id, ids, criteria, config.detector, config.detector_budget);
}

std::uint64_t plan_fingerprint(const std::vector<AgentState>& agents) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits;
    h *= 0x100000001b3ULL;
  };
  for (const auto& agent : agents) {
    for (std::size_t i = 0; i < agent.plan.times.size(); ++i) {
      mix(agent.plan.times[i]);
      for (double x : agent.plan.setpoints[i]) mix(x);
    }
  }
  return h;
}

}  // namespace

CriterionFn pair_criterion_for(const AgentState& a, const AgentState& b,
                               const CoordinationConfig& config, std::size_t opponent_count) {
  PairParams params;
  params.delta = pair_delta(config, opponent_count);
  params.lambda_pair = 0.5 * (a.dynamics.diameter + b.dynamics.diameter);
  auto ma = moments_for(a);
  auto mb = moments_for(b);
  CriterionFn gamma = make_pair_criterion(ma, mb, params, config.criterion);
  gamma.pair = {a.id, b.id};
  if (config.detector != DetectorKind::kGridFallback) {
    attach_lipschitz(gamma, ma, mb, params);
  }
  return gamma;
}

CoordinationReport coordinate_fp(std::vector<AgentState>& agents, const CoordinationConfig& config) {
  CoordinationReport report;
  report.rounds_per_agent.assign(agents.size(), 0);
  report.resolved = true;

  for (std::size_t a = 1; a < agents.size(); ++a) {
    std::vector<const AgentState*> higher;
    for (std::size_t b = 0; b < a; ++b) higher.push_back(&agents[b]);

    bool clear = false;
    for (int round = 0; round < config.max_rounds; ++round) {
      const DetectionReport det = detect_against(agents[a], higher, config);
      if (!det.collision) {
        clear = true;
        break;
      }
      agents[a].plan = resolve_plan(agents[a], higher, det.t_coll.value_or(agents[a].plan.t0()),
                                    config);
      ++report.rounds_per_agent[a];
      ++report.rounds_total;
    }
    if (!clear) {
      const DetectionReport det = detect_against(agents[a], higher, config);
      if (det.collision) {
        report.resolved = false;
        log_warn("fixed-priority coordination left agent " + std::to_string(agents[a].id) +
                 " unresolved");
      }
    }
  }
  return report;
}

Bid compute_bid(const AgentState& agent, const std::vector<const AgentState*>& opponents,
                double t_coll, const CoordinationConfig& config) {
  Bid bid;
  bid.avoiding_plan = resolve_plan(agent, opponents, t_coll, config);
  const ConflictContext ctx = context_against(agent, opponents, config);
  const double cost_avoiding =
      plan_cost(agent.dynamics, bid.avoiding_plan, agent.goals, config.weights, ctx);
  const double cost_current = plan_cost(agent.dynamics, agent.plan, agent.goals, config.weights, ctx);
  bid.value = cost_avoiding - cost_current;
  return bid;
}

CoordinationReport coordinate_auc(std::vector<AgentState>& agents, const CoordinationConfig& config) {
  CoordinationReport report;
  report.rounds_per_agent.assign(agents.size(), 0);
  std::set<std::uint64_t> seen_states;
  seen_states.insert(plan_fingerprint(agents));

  for (int round = 0; round < config.max_rounds; ++round) {
    bool any_conflict = false;
    for (std::size_t a = 0; a < agents.size() && !any_conflict; ++a) {
      std::vector<const AgentState*> others;
      for (std::size_t b = 0; b < agents.size(); ++b) {
        if (b != a) others.push_back(&agents[b]);
      }
      const DetectionReport det = detect_against(agents[a], others, config);
      if (!det.collision) continue;
      any_conflict = true;
      const double t_coll = det.t_coll.value_or(agents[a].plan.t0());

      // Auction among the conflict set plus the detecting agent.
      std::vector<int> participants = det.conflict_set;
      participants.push_back(agents[a].id);
      std::sort(participants.begin(), participants.end());
      participants.erase(std::unique(participants.begin(), participants.end()),
                         participants.end());

      auto state_of = [&](int id) -> AgentState& {
        for (auto& s : agents) {
          if (s.id == id) return s;
        }
        throw std::logic_error("unknown participant id");
      };

      AuctionRecord record;
      record.round = round + 1;
      record.participants = participants;
      record.t_coll = t_coll;
      std::map<int, Bid> bids;
      for (int id : participants) {
        // the auction is held among the conflict set, but plan costs (and
        // hence the avoiding plans) penalise conflicts with every other
        // agent: the hinge term uses the full multi-agent criterion
        std::vector<const AgentState*> cost_opponents;
        for (const auto& other : agents) {
          if (other.id != id) cost_opponents.push_back(&other);
        }
        bids.emplace(id, compute_bid(state_of(id), cost_opponents, t_coll, config));
        record.bids.push_back(bids.at(id).value);
      }

      // highest bid wins; ties go to the lowest index
      int winner = participants.front();
      double best = bids.at(winner).value;
      for (int id : participants) {
        if (bids.at(id).value > best) {
          best = bids.at(id).value;
          winner = id;
        }
      }
      record.winner = winner;
      report.auctions.push_back(record);

      for (int id : participants) {
        if (id == winner) continue;
        AgentState& loser = state_of(id);
        loser.plan = bids.at(id).avoiding_plan;
        for (std::size_t idx = 0; idx < agents.size(); ++idx) {
          if (agents[idx].id == id) ++report.rounds_per_agent[idx];
        }
      }
      ++report.rounds_total;

      const std::uint64_t fp = plan_fingerprint(agents);
      if (!seen_states.insert(fp).second) {
        log_warn("auction coordination revisited a plan configuration (possible cycle)");
      }
    }
    if (!any_conflict) {
      report.resolved = true;
      return report;
    }
  }

  // One last sweep to decide the resolved flag after the budget.
  report.resolved = true;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    std::vector<const AgentState*> others;
    for (std::size_t b = 0; b < agents.size(); ++b) {
      if (b != a) others.push_back(&agents[b]);
    }
    if (detect_against(agents[a], others, config).collision) {
      report.resolved = false;
      break;
    }
  }
  if (!report.resolved) log_warn("auction coordination exhausted max_rounds unresolved");
  return report;
}

std::string auction_log_text(const CoordinationReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "# round participants bids winner t_coll\n";
  for (const auto& rec : report.auctions) {
    os << "round=" << rec.round << " participants=";
    for (std::size_t i = 0; i < rec.participants.size(); ++i) {
      os << (i ? "," : "") << rec.participants[i];
    }
    os << " bids=";
    for (std::size_t i = 0; i < rec.bids.size(); ++i) {
      os << (i ? "," : "") << rec.bids[i];
    }
    os << " winner=" << rec.winner << " t_coll=" << rec.t_coll << "\n";
  }
  os << "rounds_total=" << report.rounds_total << " resolved=" << (report.resolved ? 1 : 0)
     << "\n";
  return os.str();
}

}  // namespace sr
