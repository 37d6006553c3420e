#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "scim/config.hpp"
#include "scim/rng.hpp"
#include "scim/table.hpp"

namespace scim {

/// Integer production (node 0) and shipment (nodes 1..J) quantities, one row per product.
using ActionVector = Table<int>;

struct ActionBound {
  int lower = 0;
  int upper = 0;
  bool operator==(const ActionBound&) const = default;
};

/// Inclusive bound per action component, indexed like ActionVector.
using ActionBounds = Table<ActionBound>;

using Observation = std::vector<double>;

struct InventoryState {
  Table<int> stock;                     // may be negative (backlog)
  std::deque<Table<int>> demand_history;  // oldest first, exactly history_len entries
  int t = 0;
};

struct RewardBreakdown {
  double revenue = 0.0;
  double production_cost = 0.0;
  double transport_cost = 0.0;
  double storage_cost = 0.0;
  double penalty_cost = 0.0;

  double total() const {
    return revenue - production_cost - transport_cost - storage_cost - penalty_cost;
  }
  RewardBreakdown& operator+=(const RewardBreakdown& o);
};

struct StepOutcome {
  double reward = 0.0;
  RewardBreakdown breakdown;
  Observation observation;
  Table<int> demand_realized;  // P x (J+1); column 0 always zero
  bool done = false;
};

/// One draw of the seasonal demand for product `product` (0-based) at warehouse
/// `warehouse` (1..J) and step `t`. The phase uses the 1-based product index.
int sample_demand(const ScenarioConfig& config, int product, int warehouse, int t, Rng& rng);

/// Deterministic part of the demand curve (before noise and flooring).
double demand_curve(const ScenarioConfig& config, int product, int warehouse, int t);

/// Draws one full demand table for step t in the canonical order (product-major, then
/// warehouse). Env and the oracle share this routine so equal seeds give equal demand.
Table<int> draw_demand_step(const ScenarioConfig& config, int t, Rng& rng);

ActionBounds action_bounds(const ScenarioConfig& config);

/// Floors each raw component and clamps it into its bound.
ActionVector clip_action(std::span<const double> raw, const ActionBounds& bounds);

bool within_bounds(const ActionVector& action, const ActionBounds& bounds);

/// Pure transition: applies `action` and realized `demand` to `stock` in place and
/// returns the reward terms for the step.
RewardBreakdown apply_transition(const ScenarioConfig& config, Table<int>& stock,
                                 const ActionVector& action, const Table<int>& demand);

/// Observation layout: stocks (product-major, nodes 0..J), then the demand history oldest
/// first, each entry product-major over warehouses 1..J.
Observation encode_observation(const ScenarioConfig& config, const InventoryState& state);

std::size_t observation_size(const ScenarioConfig& config);
std::size_t action_size(const ScenarioConfig& config);

/// Decodes the stock block at the front of an observation.
Table<int> stocks_from_observation(const ScenarioConfig& config, std::span<const double> obs);

class Env {
 public:
  Env(ScenarioConfig config, std::uint64_t seed);

  Observation reset();
  /// Reseeds the demand stream, then resets.
  Observation reset(std::uint64_t seed);

  StepOutcome step(const ActionVector& action);
  /// Steps with an externally supplied demand table instead of drawing one.
  StepOutcome step_with_demand(const ActionVector& action, const Table<int>& demand);

  const ScenarioConfig& config() const noexcept { return config_; }
  const ActionBounds& bounds() const noexcept { return bounds_; }
  const InventoryState& state() const noexcept { return state_; }
  Observation observation() const { return encode_observation(config_, state_); }
  bool done() const noexcept { return state_.t >= config_.episode_length; }

 private:
  ScenarioConfig config_;
  ActionBounds bounds_;
  Rng rng_;
  InventoryState state_;
};

Env make_env(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace scim
