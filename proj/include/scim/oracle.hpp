#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "scim/env.hpp"
#include "scim/policies.hpp"

namespace scim {

/// Full demand realization of one episode: one P x (J+1) table per step (column 0 unused).
struct DemandRealization {
  std::vector<Table<int>> steps;

  int horizon() const { return static_cast<int>(steps.size()); }
  int at(int product, int warehouse, int t) const { return steps.at(t)(product, warehouse); }
};

/// The demand an Env constructed with `seed` draws during its first episode.
DemandRealization realize_demand(const ScenarioConfig& config, std::uint64_t seed);

struct PlanResult {
  std::vector<ActionVector> actions;
  /// Cumulative profit obtained by replaying `actions` against the demand.
  double total_profit = 0.0;
  RewardBreakdown breakdown;
  /// Revenue minus the optimal network cost; equals total_profit up to rounding.
  double network_profit = 0.0;
};

/// Cost-minimizing action plan under full knowledge of demand. Each product is an
/// independent time-expanded min-cost-flow problem over the factory and warehouse
/// stock chains.
PlanResult plan_clairvoyant(const DemandRealization& demand, const ScenarioConfig& config);

/// Replays a fixed action sequence against known demand from the configured initial state.
PlanResult replay_plan(const std::vector<ActionVector>& actions, const DemandRealization& demand,
                       const ScenarioConfig& config);

/// Exhaustive forward dynamic program over the exact dynamics with known demand.
/// Throws SizeError when (state-space bound x action count) exceeds `max_work`.
double dp_exact(const DemandRealization& demand, const ScenarioConfig& config, double max_work = 1e7);

/// Per episode: realize demand, plan, replay the plan in a live Env with the same seed.
EvalResult oracle_evaluate(const ScenarioConfig& config, int n_episodes, std::uint64_t seed_base,
                           int workers = 1);

void write_plan_csv(const PlanResult& plan, const DemandRealization& demand, const ScenarioConfig& config,
                    const std::filesystem::path& path);
std::vector<ActionVector> read_plan_csv(const std::filesystem::path& path, const ScenarioConfig& config);

}  // namespace scim
