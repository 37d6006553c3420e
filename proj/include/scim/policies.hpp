#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "scim/env.hpp"

namespace scim {

/// Maps observations to raw (real-valued) actions; the caller discretizes with clip_action.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> act(std::span<const double> observation) = 0;
  /// Called at the start of each episode with that episode's seed.
  virtual void reset(std::uint64_t /*episode_seed*/) {}
  virtual std::unique_ptr<Policy> clone() const = 0;
};

/// Reorder points and order quantities for every (product, node), factory included.
struct SQParams {
  Table<int> s;
  Table<int> q;

  /// Throws ConfigError unless 0 <= s <= capacity and 0 <= Q <= action upper bound.
  void validate(const ScenarioConfig& config) const;
};

nlohmann::json sq_params_to_json(const SQParams& p);
SQParams sq_params_from_json(const nlohmann::json& j);

/// Orders Q[i][j] wherever stock[i][j] < s[i][j]; node 0 is the production order.
ActionVector sq_act(const SQParams& params, const Table<int>& stock, const ActionBounds& bounds);

/// Uniform integer in every component's bound.
ActionVector random_act(const ActionBounds& bounds, Rng& rng);

class SQPolicy final : public Policy {
 public:
  SQPolicy(ScenarioConfig config, SQParams params);
  std::vector<double> act(std::span<const double> observation) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<SQPolicy>(*this); }
  const SQParams& params() const noexcept { return params_; }

 private:
  ScenarioConfig config_;
  SQParams params_;
  ActionBounds bounds_;
};

class ZeroPolicy final : public Policy {
 public:
  explicit ZeroPolicy(std::size_t action_size) : size_(action_size) {}
  std::vector<double> act(std::span<const double>) override { return std::vector<double>(size_, 0.0); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ZeroPolicy>(*this); }

 private:
  std::size_t size_;
};

/// Uniform random actions; the stream is reseeded from each episode seed.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(ActionBounds bounds, std::uint64_t seed = 0)
      : bounds_(std::move(bounds)), rng_(seed) {}
  std::vector<double> act(std::span<const double> observation) override;
  void reset(std::uint64_t episode_seed) override { rng_ = Rng(derive_seed(episode_seed, 0x52414e44)); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }

 private:
  ActionBounds bounds_;
  Rng rng_;
};

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<double> per_episode;
};

EvalResult summarize(std::vector<double> per_episode);

/// Runs episodes with seeds seed_base .. seed_base+n-1 and reports the undiscounted
/// cumulative profit of each. `workers` > 1 fans episodes out over threads; results are
/// merged in seed order, so the output does not depend on the worker count.
EvalResult evaluate_policy(const ScenarioConfig& config, const Policy& policy, int n_episodes,
                           std::uint64_t seed_base, int workers = 1);

/// Cumulative profit of one episode.
double run_episode(const ScenarioConfig& config, Policy& policy, std::uint64_t seed);

}  // namespace scim
