#include "scim/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "scim/error.hpp"

namespace scim {
namespace {

// Column-per-experiment data for the single-product scenarios. Node lists run
// factory first, then warehouses 1..J.
struct SingleProductExperiment {
  double demand_max;
  double demand_var;
  double price;
  double production_cost;
  std::vector<int> capacity;
  std::vector<double> storage_cost;
  std::vector<double> transport_cost;  // warehouses only
  double penalty;
};

ScenarioConfig single_product(const std::string& name, const SingleProductExperiment& e) {
  const int warehouses = static_cast<int>(e.capacity.size()) - 1;
  auto c = make_blank_config(1, warehouses);
  c.name = name;
  c.sale_price = {e.price};
  c.production_cost = {e.production_cost};
  c.penalty_coeff = {e.penalty};
  c.demand_max = {e.demand_max};
  c.demand_var = {e.demand_var};
  for (int j = 0; j <= warehouses; ++j) {
    c.storage_capacity(0, j) = e.capacity[j];
    c.storage_cost(0, j) = e.storage_cost[j];
    if (j > 0) c.transport_cost(0, j) = e.transport_cost[j - 1];
  }
  return c;
}

// Two-product data is given per node as (product 1, product 2) pairs.
struct TwoProductExperiment {
  std::vector<double> demand_max;
  std::vector<double> demand_var;
  std::vector<double> price;
  std::vector<double> production_cost;
  std::vector<std::pair<int, int>> capacity;
  std::vector<std::pair<double, double>> storage_cost;
  std::vector<std::pair<double, double>> transport_cost;
  double penalty;
};

ScenarioConfig two_products(const std::string& name, const TwoProductExperiment& e) {
  auto c = make_blank_config(2, 2);
  c.name = name;
  c.sale_price = e.price;
  c.production_cost = e.production_cost;
  c.penalty_coeff = {e.penalty, e.penalty};
  c.demand_max = e.demand_max;
  c.demand_var = e.demand_var;
  for (int j = 0; j <= 2; ++j) {
    c.storage_capacity(0, j) = e.capacity[j].first;
    c.storage_capacity(1, j) = e.capacity[j].second;
    c.storage_cost(0, j) = e.storage_cost[j].first;
    c.storage_cost(1, j) = e.storage_cost[j].second;
    if (j > 0) {
      c.transport_cost(0, j) = e.transport_cost[j - 1].first;
      c.transport_cost(1, j) = e.transport_cost[j - 1].second;
    }
  }
  return c;
}

std::vector<ScenarioConfig> build_registry() {
  std::vector<ScenarioConfig> r;
  const std::vector<SingleProductExperiment> one_by_one = {
      {10, 2, 15, 5, {5, 10}, {2, 1}, {0.25}, 1.5},
      {5, 2, 20, 5, {5, 10}, {2, 1}, {0.05}, 0.1},
      {5, 2, 15, 10, {5, 10}, {2, 1}, {1}, 2},
      {10, 1, 20, 5, {10, 15}, {4, 2}, {0.25}, 1.5},
      {5, 3, 15, 5, {5, 10}, {1, 2}, {0.25}, 0.1},
  };
  for (std::size_t k = 0; k < one_by_one.size(); ++k) {
    r.push_back(single_product("1p1w-exp" + std::to_string(k + 1), one_by_one[k]));
  }
  const std::vector<SingleProductExperiment> one_by_three = {
      {7, 2, 15, 5, {3, 6, 9, 12}, {4, 3, 2, 1}, {0.3, 0.6, 0.9}, 1.5},
      {5, 2, 20, 5, {3, 6, 9, 12}, {4, 3, 2, 1}, {0.03, 0.06, 0.09}, 0.1},
      {5, 2, 15, 10, {3, 6, 9, 12}, {4, 3, 2, 1}, {3, 2, 1}, 2},
      {7, 1, 20, 5, {4, 8, 12, 16}, {8, 6, 4, 2}, {0.3, 0.6, 0.9}, 1.5},
      {5, 3, 15, 5, {4, 8, 12, 16}, {4, 3, 2, 1}, {0.3, 0.6, 0.9}, 0.1},
  };
  for (std::size_t k = 0; k < one_by_three.size(); ++k) {
    r.push_back(single_product("1p3w-exp" + std::to_string(k + 1), one_by_three[k]));
  }
  const std::vector<TwoProductExperiment> two_by_two = {
      {{3, 6}, {2, 1}, {20, 10}, {2, 1},
       {{3, 4}, {6, 8}, {9, 12}}, {{6, 3}, {4, 2}, {2, 1}}, {{0.1, 0.3}, {0.2, 0.6}}, 0.5},
      {{3, 6}, {2, 1}, {10, 15}, {2, 1},
       {{3, 4}, {6, 8}, {9, 12}}, {{0.5, 0.3}, {1.0, 0.6}, {1.5, 0.9}}, {{0.01, 0.025}, {0.02, 0.050}}, 1.5},
      {{4, 2}, {2, 2}, {20, 10}, {2, 1},
       {{9, 4}, {6, 8}, {3, 12}}, {{1, 3}, {2, 2}, {3, 1}}, {{0.1, 0.3}, {0.2, 0.6}}, 0.5},
  };
  for (std::size_t k = 0; k < two_by_two.size(); ++k) {
    r.push_back(two_products("2p2w-exp" + std::to_string(k + 1), two_by_two[k]));
  }
  for (const auto& c : r) c.validate();
  return r;
}

const std::vector<ScenarioConfig>& registry() {
  static const std::vector<ScenarioConfig> r = build_registry();
  return r;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : registry()) n.push_back(c.name);
    return n;
  }();
  return names;
}

bool is_builtin_scenario(const std::string& name) {
  const auto& names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), lower(name)) != names.end();
}

ScenarioConfig builtin_scenario(const std::string& name) {
  const auto key = lower(name);
  for (const auto& c : registry()) {
    if (c.name == key) return c;
  }
  std::string known;
  for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("scenario", "unknown scenario '" + name + "' (built-ins: " + known + ")");
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
  if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_config_file(name_or_path);
  return builtin_scenario(name_or_path);
}

std::pair<std::string, std::string> scenario_labels(const std::string& name) {
  const auto key = lower(name);
  const auto dash = key.find("-exp");
  if (!is_builtin_scenario(key) || dash == std::string::npos) return {name, ""};
  std::string topology = key.substr(0, dash);
  std::transform(topology.begin(), topology.end(), topology.begin(),
                 [](unsigned char ch) { return std::toupper(ch); });
  return {topology, "Exp" + key.substr(dash + 4)};
}

}  // namespace scim
