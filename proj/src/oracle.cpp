#include "scim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "scim/error.hpp"
#include "scim/min_cost_flow.hpp"

namespace scim {

DemandRealization realize_demand(const ScenarioConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  DemandRealization d;
  d.steps.reserve(static_cast<std::size_t>(config.episode_length));
  for (int t = 0; t < config.episode_length; ++t) d.steps.push_back(draw_demand_step(config, t, rng));
  return d;
}

namespace {

void check_shape(const DemandRealization& demand, const ScenarioConfig& config) {
  if (demand.horizon() != config.episode_length) {
    throw ContractError("demand horizon does not match episode_length");
  }
  for (const auto& step : demand.steps) {
    if (static_cast<int>(step.rows()) != config.num_products ||
        static_cast<int>(step.cols()) != config.num_nodes()) {
      throw ContractError("demand table shape does not match the scenario");
    }
  }
}

struct ProductPlan {
  std::vector<int> production;           // per step
  std::vector<std::vector<int>> shipped;  // [warehouse 1..J][step]; index 0 unused
  double cost = 0.0;
};

// Time-expanded network for one product. Node (j, t) holds the stock of node j during
// step t. Forward arcs carry positive end-of-step stock (storage cost), backward arcs
// carry backlog (penalty per step). Demand and the initial stock are forced through
// arcs priced at -big so every such unit is routed.
ProductPlan plan_product(const DemandRealization& demand, const ScenarioConfig& config, int i) {
  const int horizon = config.episode_length;
  const int nodes = config.num_nodes();
  const double penalty = config.penalty_coeff[i] * config.sale_price[i];

  int production_cap = 0;
  for (int j = 0; j < nodes; ++j) production_cap += config.storage_capacity(i, j);

  double bound = 1.0 + config.production_cost[i] + penalty;
  for (int j = 0; j < nodes; ++j) {
    bound += config.transport_cost(i, j) + config.storage_cost(i, j);
  }
  const double big = 2.0 * bound * static_cast<double>(horizon * nodes + 2) + 1.0;

  MinCostFlow net(static_cast<std::size_t>(nodes * horizon + 2));
  const std::size_t source = static_cast<std::size_t>(nodes * horizon);
  const std::size_t sink = source + 1;
  auto node = [&](int j, int t) { return static_cast<std::size_t>(j * horizon + t); };

  struct PricedArc {
    std::size_t id;
    double cost;
  };
  std::vector<PricedArc> priced;
  auto priced_arc = [&](std::size_t from, std::size_t to, long cap, double cost) {
    const auto id = net.add_arc(from, to, cap, cost);
    priced.push_back({id, cost});
    return id;
  };

  std::vector<std::size_t> production_arc(static_cast<std::size_t>(horizon));
  std::vector<std::vector<std::size_t>> ship_arc(static_cast<std::size_t>(nodes),
                                                 std::vector<std::size_t>(static_cast<std::size_t>(horizon)));
  for (int t = 0; t < horizon; ++t) {
    production_arc[t] = priced_arc(source, node(0, t), production_cap, config.production_cost[i]);
    for (int j = 1; j < nodes; ++j) {
      ship_arc[j][t] = priced_arc(node(0, t), node(j, t), config.storage_capacity(i, j),
                                  config.transport_cost(i, j));
      const int d = demand.at(i, j, t);
      if (d > 0) net.add_arc(node(j, t), sink, d, -big);
    }
  }
  for (int j = 0; j < nodes; ++j) {
    const long cap = config.storage_capacity(i, j);
    const double store = config.storage_cost(i, j);
    for (int t = 0; t + 1 < horizon; ++t) {
      priced_arc(node(j, t), node(j, t + 1), cap, store);
      priced_arc(node(j, t + 1), node(j, t), MinCostFlow::kInfinite, penalty);
    }
    priced_arc(node(j, horizon - 1), sink, cap, store);
    priced_arc(source, node(j, horizon - 1), MinCostFlow::kInfinite, penalty);
    const int b = config.initial_stock(i, j);
    if (b > 0) net.add_arc(source, node(j, 0), b, -big);
    if (b < 0) net.add_arc(node(j, 0), sink, -b, -big);
  }

  net.solve(source, sink);

  ProductPlan plan;
  plan.production.resize(static_cast<std::size_t>(horizon));
  plan.shipped.assign(static_cast<std::size_t>(nodes), std::vector<int>(static_cast<std::size_t>(horizon)));
  for (int t = 0; t < horizon; ++t) {
    plan.production[t] = static_cast<int>(net.flow(production_arc[t]));
    for (int j = 1; j < nodes; ++j) plan.shipped[j][t] = static_cast<int>(net.flow(ship_arc[j][t]));
  }
  for (const auto& a : priced) plan.cost += static_cast<double>(net.flow(a.id)) * a.cost;
  return plan;
}

}  // namespace

PlanResult replay_plan(const std::vector<ActionVector>& actions, const DemandRealization& demand,
                       const ScenarioConfig& config) {
  check_shape(demand, config);
  if (static_cast<int>(actions.size()) != config.episode_length) {
    throw ContractError("plan length does not match episode_length");
  }
  Env env(config, 0);
  PlanResult r;
  r.actions = actions;
  for (int t = 0; t < config.episode_length; ++t) {
    const auto out = env.step_with_demand(actions[t], demand.steps[t]);
    r.total_profit += out.reward;
    r.breakdown += out.breakdown;
  }
  return r;
}

PlanResult plan_clairvoyant(const DemandRealization& demand, const ScenarioConfig& config) {
  config.validate();
  check_shape(demand, config);
  const int horizon = config.episode_length;
  std::vector<ActionVector> actions(static_cast<std::size_t>(horizon),
                                    ActionVector(config.num_products, config.num_nodes()));
  double revenue = 0.0;
  double cost = 0.0;
  for (int i = 0; i < config.num_products; ++i) {
    const auto p = plan_product(demand, config, i);
    cost += p.cost;
    for (int t = 0; t < horizon; ++t) {
      actions[t](i, 0) = p.production[t];
      for (int j = 1; j < config.num_nodes(); ++j) {
        actions[t](i, j) = p.shipped[j][t];
        revenue += config.sale_price[i] * demand.at(i, j, t);
      }
    }
  }
  auto result = replay_plan(actions, demand, config);
  result.network_profit = revenue - cost;
  return result;
}

double dp_exact(const DemandRealization& demand, const ScenarioConfig& config, double max_work) {
  config.validate();
  check_shape(demand, config);
  const auto bounds = action_bounds(config);
  const int horizon = config.episode_length;

  double states = 1.0;
  double actions = 1.0;
  for (int i = 0; i < config.num_products; ++i) {
    long total_demand = 0;
    int shipping_cap = 0;
    for (int j = 1; j < config.num_nodes(); ++j) {
      shipping_cap += config.storage_capacity(i, j);
      long dj = 0;
      for (int t = 0; t < horizon; ++t) dj += demand.at(i, j, t);
      const double lo = std::min(config.initial_stock(i, j), 0) - static_cast<double>(dj);
      states *= config.storage_capacity(i, j) - lo + 1.0;
      total_demand += dj;
    }
    const double lo0 = std::min(config.initial_stock(i, 0), 0) - static_cast<double>(horizon) * shipping_cap;
    states *= config.storage_capacity(i, 0) - lo0 + 1.0;
  }
  for (const auto& b : bounds.flat()) actions *= b.upper - b.lower + 1.0;
  if (states * actions > max_work) {
    throw SizeError("dp_exact: instance too large (" + std::to_string(states * actions) + " > " +
                    std::to_string(max_work) + ")");
  }

  const auto flat_bounds = bounds.flat();
  std::map<std::vector<int>, double> frontier;
  {
    auto s0 = config.initial_stock.flat();
    frontier.emplace(std::vector<int>(s0.begin(), s0.end()), 0.0);
  }
  ActionVector action(bounds.rows(), bounds.cols());
  Table<int> stock(bounds.rows(), bounds.cols());
  for (int t = 0; t < horizon; ++t) {
    std::map<std::vector<int>, double> next;
    for (const auto& [state, value] : frontier) {
      auto a = action.flat();
      for (std::size_t k = 0; k < a.size(); ++k) a[k] = flat_bounds[k].lower;
      while (true) {
        std::copy(state.begin(), state.end(), stock.flat().begin());
        const double v = value + apply_transition(config, stock, action, demand.steps[t]).total();
        std::vector<int> key(stock.flat().begin(), stock.flat().end());
        auto [it, inserted] = next.emplace(std::move(key), v);
        if (!inserted && v > it->second) it->second = v;
        // Mixed-radix increment over the action lattice.
        std::size_t k = 0;
        for (; k < a.size(); ++k) {
          if (a[k] < flat_bounds[k].upper) {
            ++a[k];
            break;
          }
          a[k] = flat_bounds[k].lower;
        }
        if (k == a.size()) break;
      }
    }
    frontier = std::move(next);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [state, value] : frontier) best = std::max(best, value);
  return best;
}

EvalResult oracle_evaluate(const ScenarioConfig& config, int n_episodes, std::uint64_t seed_base, int workers) {
  if (n_episodes < 1) throw ContractError("oracle_evaluate: n_episodes must be >= 1");
  std::vector<double> profits(static_cast<std::size_t>(n_episodes));
  workers = std::clamp(workers, 1, n_episodes);
  auto run_slice = [&](int worker) {
    for (int k = worker; k < n_episodes; k += workers) {
      const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(k);
      const auto demand = realize_demand(config, seed);
      const auto plan = plan_clairvoyant(demand, config);
      Env env(config, seed);
      double profit = 0.0;
      for (const auto& a : plan.actions) profit += env.step(a).reward;
      if (profit != plan.total_profit) {
        throw std::logic_error("oracle replay diverged from the planned profit");
      }
      profits[static_cast<std::size_t>(k)] = profit;
    }
  };
  if (workers == 1) {
    run_slice(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_slice, w);
  }
  return summarize(std::move(profits));
}

void write_plan_csv(const PlanResult& plan, const DemandRealization& demand, const ScenarioConfig& config,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t";
  for (int i = 0; i < config.num_products; ++i) {
    for (int j = 0; j < config.num_nodes(); ++j) out << ",a_" << i << '_' << j;
  }
  for (int i = 0; i < config.num_products; ++i) {
    for (int j = 1; j < config.num_nodes(); ++j) out << ",d_" << i << '_' << j;
  }
  out << '\n';
  for (int t = 0; t < static_cast<int>(plan.actions.size()); ++t) {
    out << t;
    for (int v : plan.actions[t].flat()) out << ',' << v;
    for (int i = 0; i < config.num_products; ++i) {
      for (int j = 1; j < config.num_nodes(); ++j) out << ',' << demand.at(i, j, t);
    }
    out << '\n';
  }
}

std::vector<ActionVector> read_plan_csv(const std::filesystem::path& path, const ScenarioConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ActionVector> actions;
  const auto width = action_size(config);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ActionVector a(config.num_products, config.num_nodes());
    for (std::size_t k = 0; k < width; ++k) {
      if (!std::getline(ss, cell, ',')) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no), "too few action columns");
      }
      a.flat()[k] = std::stoi(cell);
    }
    actions.push_back(std::move(a));
  }
  return actions;
}

}  // namespace scim
