#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sr/avoidance.hpp"
#include "sr/criterion.hpp"
#include "sr/detection.hpp"
#include "sr/sde_model.hpp"

namespace sr {

enum class Protocol { kFixedPriority, kAuction };
enum class Resolution { kWait, kFree };

struct CoordinationConfig {
  Protocol protocol = Protocol::kAuction;
  Resolution resolution = Resolution::kWait;
  int max_rounds = 50;
  double delta = 0.05;
  bool delta_per_pair = false;  // true: use raw delta per pair (as in the experiments);
                                // false: split delta across opponents so the union stays <= delta
  CriterionKind criterion = CriterionKind::kWhittle2D;
  DetectorKind detector = DetectorKind::kAdaptive;
  std::size_t detector_budget = 10000;
  CostWeights weights{};
  Box arena{};
  int free_restarts = 10;
  std::uint64_t seed = 0;
};

struct AuctionRecord {
  int round = 0;
  std::vector<int> participants;  // sorted ids
  std::vector<double> bids;       // aligned with participants
  int winner = -1;
  double t_coll = 0.0;
};

struct CoordinationReport {
  bool resolved = false;
  int rounds_total = 0;               // number of resolution rounds performed
  std::vector<int> rounds_per_agent;  // resolutions adopted per agent
  std::vector<AuctionRecord> auctions;
};

struct AgentState {
  int id = 0;
  AgentDynamics dynamics;
  Plan plan;
  std::vector<Goal> goals;
};

// Fixed priorities: agent 1 plans freely; each later agent re-plans until it
// no longer conflicts with all higher-ranked agents.
CoordinationReport coordinate_fp(std::vector<AgentState>& agents, const CoordinationConfig& config);

// One sealed-bid auction: every participant quotes the cost increase of its
// best avoiding plan; the highest bidder keeps its plan.
struct Bid {
  double value = 0.0;
  Plan avoiding_plan;
};
Bid compute_bid(const AgentState& agent, const std::vector<const AgentState*>& opponents,
                double t_coll, const CoordinationConfig& config);

// Lazy auction coordination: agents detect in index order; the first
// detected conflict triggers an auction among the conflict set, losers adopt
// their avoiding plans and the round ends.
CoordinationReport coordinate_auc(std::vector<AgentState>& agents, const CoordinationConfig& config);

// Per-pair criterion between two agents' current plans, constants attached.
CriterionFn pair_criterion_for(const AgentState& a, const AgentState& b,
                               const CoordinationConfig& config, std::size_t opponent_count);

std::string auction_log_text(const CoordinationReport& report);

}  // namespace sr
