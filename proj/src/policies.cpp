#include "scim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "scim/error.hpp"

namespace scim {

void SQParams::validate(const ScenarioConfig& config) const {
  const auto bounds = action_bounds(config);
  const auto rows = static_cast<std::size_t>(config.num_products);
  const auto cols = static_cast<std::size_t>(config.num_nodes());
  if (s.rows() != rows || s.cols() != cols) throw ConfigError("s", "shape does not match scenario");
  if (q.rows() != rows || q.cols() != cols) throw ConfigError("Q", "shape does not match scenario");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto at = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (s(i, j) < 0 || s(i, j) > config.storage_capacity(i, j)) {
        throw ConfigError("s" + at, "must lie in [0, capacity]");
      }
      if (q(i, j) < 0 || q(i, j) > bounds(i, j).upper) {
        throw ConfigError("Q" + at, "must lie in [0, action upper bound]");
      }
    }
  }
}

namespace {

nlohmann::json table_json(const Table<int>& t) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto row = t.row(i);
    out.push_back(std::vector<int>(row.begin(), row.end()));
  }
  return out;
}

Table<int> table_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of arrays");
  const std::size_t cols = j[0].size();
  Table<int> t(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(field, "ragged or non-array row");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number_integer()) throw ConfigError(field, "expected integers");
      t(i, k) = j[i][k].get<int>();
    }
  }
  return t;
}

}  // namespace

nlohmann::json sq_params_to_json(const SQParams& p) {
  return {{"s", table_json(p.s)}, {"Q", table_json(p.q)}};
}

SQParams sq_params_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("s") || !j.contains("Q")) {
    throw ConfigError("<root>", "expected an object with 's' and 'Q'");
  }
  return {table_from_json(j.at("s"), "s"), table_from_json(j.at("Q"), "Q")};
}

ActionVector sq_act(const SQParams& params, const Table<int>& stock, const ActionBounds& bounds) {
  std::vector<double> raw(bounds.size(), 0.0);
  for (std::size_t i = 0; i < bounds.rows(); ++i) {
    for (std::size_t j = 0; j < bounds.cols(); ++j) {
      if (stock(i, j) < params.s(i, j)) raw[i * bounds.cols() + j] = params.q(i, j);
    }
  }
  return clip_action(raw, bounds);
}

ActionVector random_act(const ActionBounds& bounds, Rng& rng) {
  ActionVector a(bounds.rows(), bounds.cols());
  auto out = a.flat();
  auto b = bounds.flat();
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = static_cast<int>(rng.uniform_int(b[k].lower, b[k].upper));
  return a;
}

SQPolicy::SQPolicy(ScenarioConfig config, SQParams params)
    : config_(std::move(config)), params_(std::move(params)), bounds_(action_bounds(config_)) {
  params_.validate(config_);
}

std::vector<double> SQPolicy::act(std::span<const double> observation) {
  const auto a = sq_act(params_, stocks_from_observation(config_, observation), bounds_);
  return {a.flat().begin(), a.flat().end()};
}

std::vector<double> RandomPolicy::act(std::span<const double>) {
  const auto a = random_act(bounds_, rng_);
  return {a.flat().begin(), a.flat().end()};
}

EvalResult summarize(std::vector<double> per_episode) {
  EvalResult r;
  r.per_episode = std::move(per_episode);
  if (r.per_episode.empty()) return r;
  const double n = static_cast<double>(r.per_episode.size());
  r.mean = std::accumulate(r.per_episode.begin(), r.per_episode.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : r.per_episode) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / n);
  return r;
}

double run_episode(const ScenarioConfig& config, Policy& policy, std::uint64_t seed) {
  Env env(config, seed);
  policy.reset(seed);
  auto obs = env.observation();
  double total = 0.0;
  while (!env.done()) {
    const auto raw = policy.act(obs);
    auto out = env.step(clip_action(raw, env.bounds()));
    total += out.reward;
    obs = std::move(out.observation);
  }
  return total;
}

EvalResult evaluate_policy(const ScenarioConfig& config, const Policy& policy, int n_episodes,
                           std::uint64_t seed_base, int workers) {
  if (n_episodes < 1) throw ContractError("evaluate_policy: n_episodes must be >= 1");
  std::vector<double> profits(static_cast<std::size_t>(n_episodes));
  workers = std::clamp(workers, 1, n_episodes);
  auto run_slice = [&](int worker) {
    auto local = policy.clone();
    for (int k = worker; k < n_episodes; k += workers) {
      profits[static_cast<std::size_t>(k)] = run_episode(config, *local, seed_base + static_cast<std::uint64_t>(k));
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

}  // namespace scim
