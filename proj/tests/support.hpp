#pragma once

#include <cmath>

#include "scim/config.hpp"
#include "scim/rng.hpp"

namespace scim::test {

/// 1 product, J warehouses, uniform parameters; tests override what they need.
inline ScenarioConfig small_config(int warehouses = 1, int horizon = 25) {
  ScenarioConfig c = make_blank_config(1, warehouses);
  c.name = "small";
  c.episode_length = horizon;
  c.sale_price = {20};
  c.production_cost = {5};
  c.penalty_coeff = {0.1};
  c.demand_max = {5};
  c.demand_var = {0};
  for (int j = 0; j <= warehouses; ++j) {
    c.storage_capacity(0, j) = 5 * (j + 1);
    c.storage_cost(0, j) = 1.0;
    if (j > 0) c.transport_cost(0, j) = 0.5;
  }
  return c;
}

/// Random valid configuration for fuzzing.
inline ScenarioConfig random_config(Rng& rng, int max_products = 2, int max_warehouses = 3, int max_horizon = 10,
                                    int max_capacity = 12) {
  const int p = static_cast<int>(rng.uniform_int(1, max_products));
  const int w = static_cast<int>(rng.uniform_int(1, max_warehouses));
  ScenarioConfig c = make_blank_config(p, w);
  c.name = "fuzz";
  c.episode_length = static_cast<int>(rng.uniform_int(1, max_horizon));
  c.history_len = static_cast<int>(rng.uniform_int(1, 5));
  for (int i = 0; i < p; ++i) {
    c.sale_price[i] = std::round(rng.uniform(0, 25) * 4) / 4;
    c.production_cost[i] = std::round(rng.uniform(0, 10) * 4) / 4;
    c.penalty_coeff[i] = std::round(rng.uniform(0, 2) * 10) / 10;
    c.demand_max[i] = static_cast<double>(rng.uniform_int(0, 10));
    c.demand_var[i] = static_cast<double>(rng.uniform_int(0, 3));
    for (int j = 0; j <= w; ++j) {
      c.storage_capacity(i, j) = static_cast<int>(rng.uniform_int(0, max_capacity));
      c.storage_cost(i, j) = std::round(rng.uniform(0, 4) * 4) / 4;
      if (j > 0) c.transport_cost(i, j) = std::round(rng.uniform(0, 2) * 20) / 20;
    }
  }
  return c;
}

}  // namespace scim::test
