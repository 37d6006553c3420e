#include "scim/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "scim/error.hpp"

namespace scim {

RewardBreakdown& RewardBreakdown::operator+=(const RewardBreakdown& o) {
  revenue += o.revenue;
  production_cost += o.production_cost;
  transport_cost += o.transport_cost;
  storage_cost += o.storage_cost;
  penalty_cost += o.penalty_cost;
  return *this;
}

double demand_curve(const ScenarioConfig& config, int product, int warehouse, int t) {
  const int phase = 2 * (product + 1) * warehouse + t;
  const double angle =
      4.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(config.episode_length);
  return config.demand_max[product] / 2.0 * (1.0 + std::cos(angle));
}

int sample_demand(const ScenarioConfig& config, int product, int warehouse, int t, Rng& rng) {
  const double noise = config.demand_var[product] * rng.uniform();
  const double d = std::floor(demand_curve(config, product, warehouse, t) + noise);
  return std::max(0, static_cast<int>(d));
}

Table<int> draw_demand_step(const ScenarioConfig& config, int t, Rng& rng) {
  Table<int> d(config.num_products, config.num_nodes());
  for (int i = 0; i < config.num_products; ++i) {
    for (int j = 1; j <= config.num_warehouses; ++j) d(i, j) = sample_demand(config, i, j, t, rng);
  }
  return d;
}

ActionBounds action_bounds(const ScenarioConfig& config) {
  ActionBounds b(config.num_products, config.num_nodes());
  for (int i = 0; i < config.num_products; ++i) {
    int total = 0;
    for (int j = 0; j < config.num_nodes(); ++j) total += config.storage_capacity(i, j);
    b(i, 0) = {0, total};
    for (int j = 1; j < config.num_nodes(); ++j) b(i, j) = {0, config.storage_capacity(i, j)};
  }
  return b;
}

ActionVector clip_action(std::span<const double> raw, const ActionBounds& bounds) {
  if (raw.size() != bounds.size()) {
    throw ContractError("clip_action: expected " + std::to_string(bounds.size()) +
                        " components, got " + std::to_string(raw.size()));
  }
  ActionVector a(bounds.rows(), bounds.cols());
  auto out = a.flat();
  auto b = bounds.flat();
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double x = std::isnan(raw[k]) ? 0.0 : std::floor(raw[k]);
    const double clamped = std::clamp(x, static_cast<double>(b[k].lower), static_cast<double>(b[k].upper));
    out[k] = static_cast<int>(clamped);
  }
  return a;
}

bool within_bounds(const ActionVector& action, const ActionBounds& bounds) {
  if (action.rows() != bounds.rows() || action.cols() != bounds.cols()) return false;
  auto a = action.flat();
  auto b = bounds.flat();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k].lower || a[k] > b[k].upper) return false;
  }
  return true;
}

RewardBreakdown apply_transition(const ScenarioConfig& config, Table<int>& stock,
                                 const ActionVector& action, const Table<int>& demand) {
  RewardBreakdown r;
  for (int i = 0; i < config.num_products; ++i) {
    const double price = config.sale_price[i];
    int shipped = 0;
    for (int j = 1; j < config.num_nodes(); ++j) {
      shipped += action(i, j);
      r.revenue += price * demand(i, j);
      r.transport_cost += config.transport_cost(i, j) * action(i, j);
      stock(i, j) = std::min(stock(i, j) + action(i, j) - demand(i, j), config.storage_capacity(i, j));
    }
    r.production_cost += config.production_cost[i] * action(i, 0);
    stock(i, 0) = std::min(stock(i, 0) + action(i, 0) - shipped, config.storage_capacity(i, 0));
    for (int j = 0; j < config.num_nodes(); ++j) {
      const int q = stock(i, j);
      if (q > 0) r.storage_cost += config.storage_cost(i, j) * q;
      if (q < 0) r.penalty_cost += config.penalty_coeff[i] * price * static_cast<double>(-q);
    }
  }
  return r;
}

std::size_t observation_size(const ScenarioConfig& c) {
  const auto p = static_cast<std::size_t>(c.num_products);
  const auto w = static_cast<std::size_t>(c.num_warehouses);
  return p * (w + 1) + p * w * static_cast<std::size_t>(c.history_len);
}

std::size_t action_size(const ScenarioConfig& c) {
  return static_cast<std::size_t>(c.num_products) * static_cast<std::size_t>(c.num_nodes());
}

Observation encode_observation(const ScenarioConfig& config, const InventoryState& state) {
  Observation obs;
  obs.reserve(observation_size(config));
  for (int q : state.stock.flat()) obs.push_back(q);
  for (const auto& d : state.demand_history) {
    for (int i = 0; i < config.num_products; ++i) {
      for (int j = 1; j < config.num_nodes(); ++j) obs.push_back(d(i, j));
    }
  }
  return obs;
}

Table<int> stocks_from_observation(const ScenarioConfig& config, std::span<const double> obs) {
  Table<int> s(config.num_products, config.num_nodes());
  auto flat = s.flat();
  if (obs.size() < flat.size()) throw ContractError("observation shorter than the stock block");
  for (std::size_t k = 0; k < flat.size(); ++k) flat[k] = static_cast<int>(std::lround(obs[k]));
  return s;
}

Env::Env(ScenarioConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  config_.validate();
  bounds_ = action_bounds(config_);
  reset();
}

Observation Env::reset() {
  state_.t = 0;
  state_.stock = config_.initial_stock;
  state_.demand_history.clear();
  for (int k = 0; k < config_.history_len; ++k) {
    state_.demand_history.push_back(config_.initial_history.empty()
                                        ? Table<int>(config_.num_products, config_.num_nodes())
                                        : config_.initial_history[k]);
  }
  return observation();
}

Observation Env::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  return reset();
}

StepOutcome Env::step(const ActionVector& action) {
  if (done()) throw ContractError("step called after the episode finished");
  if (!within_bounds(action, bounds_)) throw ContractError("action outside bounds; use clip_action");
  return step_with_demand(action, draw_demand_step(config_, state_.t, rng_));
}

StepOutcome Env::step_with_demand(const ActionVector& action, const Table<int>& demand) {
  if (done()) throw ContractError("step called after the episode finished");
  if (!within_bounds(action, bounds_)) throw ContractError("action outside bounds; use clip_action");
  StepOutcome out;
  out.breakdown = apply_transition(config_, state_.stock, action, demand);
  out.reward = out.breakdown.total();
  out.demand_realized = demand;
  state_.demand_history.pop_front();
  state_.demand_history.push_back(demand);
  ++state_.t;
  out.done = done();
  out.observation = observation();
  return out;
}

Env make_env(const ScenarioConfig& config, std::uint64_t seed) { return Env(config, seed); }

}  // namespace scim
