#include "scim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scim/error.hpp"

namespace scim {
namespace {

std::string indexed(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

std::string indexed(const std::string& field, std::size_t i, std::size_t j) {
  return indexed(field, i) + "[" + std::to_string(j) + "]";
}

template <typename T>
void check_vector(const std::vector<T>& v, const std::string& field, int expected) {
  if (static_cast<int>(v.size()) != expected) {
    throw ConfigError(field, "expected " + std::to_string(expected) + " entries, got " +
                                 std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(static_cast<double>(v[i])) || v[i] < 0) {
      throw ConfigError(indexed(field, i), "must be finite and >= 0");
    }
  }
}

template <typename T>
void check_table(const Table<T>& t, const std::string& field, int rows, int cols, bool nonnegative) {
  if (static_cast<int>(t.rows()) != rows || static_cast<int>(t.cols()) != cols) {
    throw ConfigError(field, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", got " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
  }
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const auto v = static_cast<double>(t(i, j));
      if (!std::isfinite(v) || (nonnegative && v < 0)) {
        throw ConfigError(indexed(field, i, j), nonnegative ? "must be finite and >= 0" : "must be finite");
      }
    }
  }
}

template <typename T>
std::vector<T> read_vector(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError(field, "missing");
  const auto& v = j.at(field);
  if (!v.is_array()) throw ConfigError(field, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(indexed(field, i), "expected a number");
    if constexpr (std::is_integral_v<T>) {
      const double x = v[i].get<double>();
      if (x != std::floor(x)) throw ConfigError(indexed(field, i), "expected an integer");
      out.push_back(static_cast<T>(x));
    } else {
      out.push_back(v[i].get<T>());
    }
  }
  return out;
}

template <typename T>
Table<T> read_table(const nlohmann::json& v, const std::string& field, std::size_t cols_offset = 0) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of arrays");
  std::size_t cols = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) throw ConfigError(indexed(field, i), "expected an array");
    if (i == 0) cols = v[i].size();
    if (v[i].size() != cols) throw ConfigError(indexed(field, i), "ragged row");
  }
  Table<T> out(v.size(), cols + cols_offset);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& x = v[i][j];
      if (!x.is_number()) throw ConfigError(indexed(field, i, j), "expected a number");
      if constexpr (std::is_integral_v<T>) {
        const double d = x.get<double>();
        if (d != std::floor(d)) throw ConfigError(indexed(field, i, j), "expected an integer");
        out(i, j + cols_offset) = static_cast<T>(d);
      } else {
        out(i, j + cols_offset) = x.get<T>();
      }
    }
  }
  return out;
}

template <typename T>
nlohmann::json write_table(const Table<T>& t, std::size_t first_col = 0) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = first_col; j < t.cols(); ++j) row.push_back(t(i, j));
    out.push_back(row);
  }
  return out;
}

int read_count(const nlohmann::json& j, const std::string& field, int fallback, bool required) {
  if (!j.contains(field)) {
    if (required) throw ConfigError(field, "missing");
    return fallback;
  }
  const auto& v = j.at(field);
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<int>();
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_products < 1) throw ConfigError("num_products", "must be >= 1");
  if (num_warehouses < 1) throw ConfigError("num_warehouses", "must be >= 1");
  if (episode_length < 1) throw ConfigError("episode_length", "must be >= 1");
  if (history_len < 1) throw ConfigError("history_len", "must be >= 1");
  const int p = num_products;
  const int nodes = num_nodes();
  check_vector(sale_price, "sale_price", p);
  check_vector(production_cost, "production_cost", p);
  check_vector(penalty_coeff, "penalty_coeff", p);
  check_vector(demand_max, "demand_max", p);
  check_vector(demand_var, "demand_var", p);
  check_table(transport_cost, "transport_cost", p, nodes, true);
  check_table(storage_capacity, "storage_capacity", p, nodes, true);
  check_table(storage_cost, "storage_cost", p, nodes, true);
  check_table(initial_stock, "initial_stock", p, nodes, false);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (initial_stock(i, j) > storage_capacity(i, j)) {
        throw ConfigError(indexed("initial_stock", i, j), "exceeds storage_capacity");
      }
    }
  }
  if (!initial_history.empty()) {
    if (static_cast<int>(initial_history.size()) != history_len) {
      throw ConfigError("initial_demand_history", "expected history_len entries");
    }
    for (std::size_t k = 0; k < initial_history.size(); ++k) {
      check_table(initial_history[k], indexed("initial_demand_history", k), p, nodes, true);
    }
  }
}

ScenarioConfig make_blank_config(int num_products, int num_warehouses) {
  ScenarioConfig c;
  c.num_products = num_products;
  c.num_warehouses = num_warehouses;
  const auto p = static_cast<std::size_t>(num_products);
  const auto n = static_cast<std::size_t>(num_warehouses + 1);
  c.sale_price.assign(p, 0.0);
  c.production_cost.assign(p, 0.0);
  c.penalty_coeff.assign(p, 0.0);
  c.demand_max.assign(p, 0.0);
  c.demand_var.assign(p, 0.0);
  c.transport_cost = Table<double>(p, n);
  c.storage_capacity = Table<int>(p, n);
  c.storage_cost = Table<double>(p, n);
  c.initial_stock = Table<int>(p, n);
  return c;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  ScenarioConfig c;
  c.name = j.value("name", std::string{});
  c.num_products = read_count(j, "num_products", 1, true);
  c.num_warehouses = read_count(j, "num_warehouses", 1, true);
  c.episode_length = read_count(j, "episode_length", 25, false);
  c.history_len = read_count(j, "history_len", 5, false);
  c.sale_price = read_vector<double>(j, "sale_price");
  c.production_cost = read_vector<double>(j, "production_cost");
  c.penalty_coeff = read_vector<double>(j, "penalty_coeff");
  c.demand_max = read_vector<double>(j, "demand_max");
  c.demand_var = read_vector<double>(j, "demand_var");
  for (const char* f : {"transport_cost", "storage_capacity", "storage_cost"}) {
    if (!j.contains(f)) throw ConfigError(f, "missing");
  }
  // transport_cost lists warehouses 1..J only; shift into node-indexed columns.
  c.transport_cost = read_table<double>(j.at("transport_cost"), "transport_cost", 1);
  c.storage_capacity = read_table<int>(j.at("storage_capacity"), "storage_capacity");
  c.storage_cost = read_table<double>(j.at("storage_cost"), "storage_cost");
  if (j.contains("initial_stock")) {
    c.initial_stock = read_table<int>(j.at("initial_stock"), "initial_stock");
  } else {
    c.initial_stock = Table<int>(static_cast<std::size_t>(std::max(c.num_products, 0)),
                                 static_cast<std::size_t>(std::max(c.num_warehouses + 1, 0)));
  }
  if (j.contains("initial_demand_history")) {
    const auto& h = j.at("initial_demand_history");
    if (!h.is_array()) throw ConfigError("initial_demand_history", "expected an array");
    for (std::size_t k = 0; k < h.size(); ++k) {
      c.initial_history.push_back(read_table<int>(h[k], indexed("initial_demand_history", k), 1));
    }
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["num_products"] = c.num_products;
  j["num_warehouses"] = c.num_warehouses;
  j["episode_length"] = c.episode_length;
  j["history_len"] = c.history_len;
  j["sale_price"] = c.sale_price;
  j["production_cost"] = c.production_cost;
  j["transport_cost"] = write_table(c.transport_cost, 1);
  j["storage_capacity"] = write_table(c.storage_capacity);
  j["storage_cost"] = write_table(c.storage_cost);
  j["penalty_coeff"] = c.penalty_coeff;
  j["demand_max"] = c.demand_max;
  j["demand_var"] = c.demand_var;
  j["initial_stock"] = write_table(c.initial_stock);
  if (!c.initial_history.empty()) {
    auto h = nlohmann::json::array();
    for (const auto& t : c.initial_history) h.push_back(write_table(t, 1));
    j["initial_demand_history"] = h;
  }
  return j;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  auto c = config_from_json(j);
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

void save_config_file(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

}  // namespace scim
