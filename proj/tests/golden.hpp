#pragma once

// Experiment tables transcribed by hand, shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include <doctest.h>

#include "scim/config.hpp"

namespace scim::test {

struct Expected {
  std::string name;
  std::vector<double> dmax, dvar, price, prod, penalty;
  std::vector<std::vector<int>> cap;       // [product][node]
  std::vector<std::vector<double>> store;  // [product][node]
  std::vector<std::vector<double>> trans;  // [product][warehouse]
};

inline std::vector<Expected> golden() {
  std::vector<Expected> g;
  // 1P1W: (factory, warehouse)
  g.push_back({"1p1w-exp1", {10}, {2}, {15}, {5}, {1.5}, {{5, 10}}, {{2, 1}}, {{0.25}}});
  g.push_back({"1p1w-exp2", {5}, {2}, {20}, {5}, {0.1}, {{5, 10}}, {{2, 1}}, {{0.05}}});
  g.push_back({"1p1w-exp3", {5}, {2}, {15}, {10}, {2}, {{5, 10}}, {{2, 1}}, {{1}}});
  g.push_back({"1p1w-exp4", {10}, {1}, {20}, {5}, {1.5}, {{10, 15}}, {{4, 2}}, {{0.25}}});
  g.push_back({"1p1w-exp5", {5}, {3}, {15}, {5}, {0.1}, {{5, 10}}, {{1, 2}}, {{0.25}}});
  // 1P3W: (factory, w1, w2, w3)
  g.push_back({"1p3w-exp1", {7}, {2}, {15}, {5}, {1.5}, {{3, 6, 9, 12}}, {{4, 3, 2, 1}}, {{0.3, 0.6, 0.9}}});
  g.push_back({"1p3w-exp2", {5}, {2}, {20}, {5}, {0.1}, {{3, 6, 9, 12}}, {{4, 3, 2, 1}}, {{0.03, 0.06, 0.09}}});
  g.push_back({"1p3w-exp3", {5}, {2}, {15}, {10}, {2}, {{3, 6, 9, 12}}, {{4, 3, 2, 1}}, {{3, 2, 1}}});
  g.push_back({"1p3w-exp4", {7}, {1}, {20}, {5}, {1.5}, {{4, 8, 12, 16}}, {{8, 6, 4, 2}}, {{0.3, 0.6, 0.9}}});
  g.push_back({"1p3w-exp5", {5}, {3}, {15}, {5}, {0.1}, {{4, 8, 12, 16}}, {{4, 3, 2, 1}}, {{0.3, 0.6, 0.9}}});
  // 2P2W: per product (factory, w1, w2)
  g.push_back({"2p2w-exp1", {3, 6}, {2, 1}, {20, 10}, {2, 1}, {0.5, 0.5},
               {{3, 6, 9}, {4, 8, 12}}, {{6, 4, 2}, {3, 2, 1}}, {{0.1, 0.2}, {0.3, 0.6}}});
  g.push_back({"2p2w-exp2", {3, 6}, {2, 1}, {10, 15}, {2, 1}, {1.5, 1.5},
               {{3, 6, 9}, {4, 8, 12}}, {{0.5, 1.0, 1.5}, {0.3, 0.6, 0.9}}, {{0.01, 0.02}, {0.025, 0.05}}});
  g.push_back({"2p2w-exp3", {4, 2}, {2, 2}, {20, 10}, {2, 1}, {0.5, 0.5},
               {{9, 6, 3}, {4, 8, 12}}, {{1, 2, 3}, {3, 2, 1}}, {{0.1, 0.2}, {0.3, 0.6}}});
  return g;
}

inline void check_matches(const ScenarioConfig& c, const Expected& e) {
  INFO(e.name);
  const int p = static_cast<int>(e.dmax.size());
  const int w = static_cast<int>(e.trans[0].size());
  CHECK(c.name == e.name);
  CHECK(c.num_products == p);
  CHECK(c.num_warehouses == w);
  CHECK(c.episode_length == 25);
  CHECK(c.history_len == 5);
  CHECK(c.demand_max == e.dmax);
  CHECK(c.demand_var == e.dvar);
  CHECK(c.sale_price == e.price);
  CHECK(c.production_cost == e.prod);
  CHECK(c.penalty_coeff == e.penalty);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= w; ++j) {
      CHECK(c.storage_capacity(i, j) == e.cap[i][j]);
      CHECK(c.storage_cost(i, j) == e.store[i][j]);
      CHECK(c.initial_stock(i, j) == 0);
      if (j > 0) CHECK(c.transport_cost(i, j) == e.trans[i][j - 1]);
    }
  }
  CHECK(c.initial_history.empty());
}


/// Non-throwing variant for the acceptance report: lists mismatching fields.
inline std::vector<std::string> golden_mismatches(const ScenarioConfig& c, const Expected& e) {
  std::vector<std::string> bad;
  const int p = static_cast<int>(e.dmax.size());
  const int w = static_cast<int>(e.trans[0].size());
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(e.name + ":" + what);
  };
  expect(c.name == e.name, "name");
  expect(c.num_products == p && c.num_warehouses == w, "shape");
  if (c.num_products != p || c.num_warehouses != w) return bad;
  expect(c.episode_length == 25, "episode_length");
  expect(c.history_len == 5, "history_len");
  expect(c.demand_max == e.dmax, "demand_max");
  expect(c.demand_var == e.dvar, "demand_var");
  expect(c.sale_price == e.price, "sale_price");
  expect(c.production_cost == e.prod, "production_cost");
  expect(c.penalty_coeff == e.penalty, "penalty_coeff");
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= w; ++j) {
      expect(c.storage_capacity(i, j) == e.cap[i][j], "storage_capacity");
      expect(c.storage_cost(i, j) == e.store[i][j], "storage_cost");
      expect(c.initial_stock(i, j) == 0, "initial_stock");
      if (j > 0) expect(c.transport_cost(i, j) == e.trans[i][j - 1], "transport_cost");
    }
  }
  return bad;
}

}  // namespace scim::test
