#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scim/table.hpp"

namespace scim {

/// Full parameterization of one supply-chain experiment.
///
/// Node index 0 is the factory warehouse; nodes 1..J are distribution warehouses.
/// Per-product/per-node quantities are stored as Table<> with one row per product.
/// `transport_cost` has J+1 columns like the others; column 0 is unused and kept at 0
/// so every table is addressed by the same node index.
struct ScenarioConfig {
  std::string name;
  int num_products = 1;
  int num_warehouses = 1;
  int episode_length = 25;
  int history_len = 5;

  std::vector<double> sale_price;
  std::vector<double> production_cost;
  Table<double> transport_cost;
  Table<int> storage_capacity;
  Table<double> storage_cost;
  std::vector<double> penalty_coeff;
  std::vector<double> demand_max;
  std::vector<double> demand_var;

  /// Stock levels at reset. Defaults to zeros.
  Table<int> initial_stock;
  /// Demand history at reset, oldest first; `history_len` tables of P x (J+1)
  /// (column 0 unused). Empty means all zeros.
  std::vector<Table<int>> initial_history;

  int num_nodes() const { return num_warehouses + 1; }

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Blank config of the given shape: every price/cost/capacity zero, T=25, tau=5.
ScenarioConfig make_blank_config(int num_products, int num_warehouses);

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);

ScenarioConfig load_config_file(const std::filesystem::path& path);
void save_config_file(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace scim
