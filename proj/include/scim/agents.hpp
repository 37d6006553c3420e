#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scim/env.hpp"
#include "scim/mlp.hpp"
#include "scim/policies.hpp"

namespace scim {

enum class Algo { Vpg, Ppo };
Algo parse_algo(const std::string& name);
const char* to_string(Algo a);

struct TrainConfig {
  std::vector<int> hidden = {64, 64};
  double learning_rate = 5e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int rollout_fragment_length = 20;
  int train_batch_size = 400;
  double clip_epsilon = 0.2;  // PPO
  int sgd_iterations = 15;    // PPO epochs
  int minibatch_size = 128;   // PPO
  double grad_clip = 0.0;     // 0 disables
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
  std::string optimizer = "sgd";  // "sgd" | "adam"
  double momentum = 0.0;
  double reward_scale = 0.01;
  int episode_budget = 1000;
  int eval_interval = 250;  // episodes between curve points
  int eval_episodes = 50;
  std::uint64_t eval_seed = 900000;
  double init_log_std = 0.0;

  void validate() const;
};

nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Squashing map onto [0, upper]: a = upper * sigmoid(z).
double squash(double z, double upper);

/// Log-density of a squashed Gaussian action, with the change-of-variables correction.
/// Dimensions with upper == 0 are deterministic and contribute nothing.
double squashed_log_prob(const Eigen::VectorXd& z, const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& upper);

/// Same density expressed through the action itself (for normalization checks).
double squashed_log_prob_of_action(const Eigen::VectorXd& action, const Eigen::VectorXd& mean,
                                   const Eigen::VectorXd& log_std, const Eigen::VectorXd& upper);

struct GaussianHead {
  Eigen::VectorXd log_std;
  Eigen::VectorXd upper;
};

struct PolicySample {
  Eigen::VectorXd action;      // in [0, upper], before flooring
  Eigen::VectorXd pre_squash;  // z
  double log_prob = 0.0;
};

/// Stochastic sample, or upper * sigmoid(mean) when `deterministic`.
PolicySample policy_sample(const GaussianHead& head, const Eigen::VectorXd& means, Rng& rng,
                           bool deterministic = false);

/// Policy network (means), state-independent log-std and a separate value network.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(const ScenarioConfig& scenario, const std::vector<int>& hidden, double init_log_std, Rng& rng);

  struct Output {
    Eigen::VectorXd means;
    double value = 0.0;
  };
  Output forward(std::span<const double> observation) const;

  Eigen::VectorXd normalize(std::span<const double> observation) const;
  Eigen::MatrixXd normalize_batch(const std::vector<Eigen::VectorXd>& raw_observations) const;

  /// Flat layout: [policy net | log_std | value net].
  Eigen::VectorXd flat_params() const;
  void set_flat_params(const Eigen::VectorXd& flat);
  std::size_t num_params() const;

  Mlp policy;
  Mlp value;
  GaussianHead head;
  Eigen::VectorXd obs_scale;
};

nlohmann::json actor_critic_to_json(const ActorCritic& ac);
ActorCritic actor_critic_from_json(const nlohmann::json& j);

struct RolloutBuffer {
  std::vector<Eigen::VectorXd> observations;  // raw observations
  std::vector<Eigen::VectorXd> pre_squash;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<bool> dones;
  /// Value of the state following the last entry when it does not end an episode.
  double last_value = 0.0;

  std::size_t size() const { return rewards.size(); }
  void clear();
  void add(Eigen::VectorXd obs, Eigen::VectorXd z, double log_prob, double reward, double value, bool done);
};

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

Advantages compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

/// Zero-mean, unit-std copy; all zeros when the spread is degenerate.
std::vector<double> normalize_advantages(const std::vector<double>& adv);

struct LossGrad {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
  Eigen::VectorXd grad;  // same layout as ActorCritic::flat_params()
};

/// -mean(log pi(z|s) * A) + value_coeff * mean((V - R)^2) / 2 (+ entropy term), over `rows`.
LossGrad vpg_loss(const ActorCritic& ac, const RolloutBuffer& buffer, const std::vector<double>& advantages,
                  const std::vector<double>& returns, const std::vector<std::size_t>& rows, const TrainConfig& cfg);

/// -mean(min(rho*A, clip(rho, 1-eps, 1+eps)*A)) + value term, rho = exp(logp - logp_old).
LossGrad ppo_loss(const ActorCritic& ac, const RolloutBuffer& buffer, const std::vector<double>& advantages,
                  const std::vector<double>& returns, const std::vector<std::size_t>& rows, const TrainConfig& cfg);

/// Per-sample clipped surrogate objective.
double ppo_clipped_objective(double ratio, double advantage, double epsilon);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
};

UpdateStats vpg_update(ActorCritic& ac, Optimizer& opt, const RolloutBuffer& buffer, const TrainConfig& cfg);
UpdateStats ppo_update(ActorCritic& ac, Optimizer& opt, const RolloutBuffer& buffer, const TrainConfig& cfg,
                       Rng& rng);

Optimizer make_optimizer(const TrainConfig& cfg);

/// Greedy (deterministic) policy backed by an actor-critic.
class ActorCriticPolicy final : public Policy {
 public:
  explicit ActorCriticPolicy(ActorCritic ac) : ac_(std::move(ac)) {}
  std::vector<double> act(std::span<const double> observation) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ActorCriticPolicy>(*this); }
  const ActorCritic& model() const noexcept { return ac_; }

 private:
  ActorCritic ac_;
};

struct CurvePoint {
  int episode = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct TrainResult {
  ActorCritic model;
  std::vector<CurvePoint> curve;
  int episodes = 0;
  long steps = 0;
};

/// Incremental trainer so a run can be advanced in stages (used by ASHA sweeps).
class Trainer {
 public:
  Trainer(Algo algo, TrainConfig cfg, ScenarioConfig scenario, std::uint64_t seed);

  /// Trains until at least `episodes` episodes have been collected in total.
  void train_until(int episodes);
  CurvePoint evaluate() const;

  const ActorCritic& model() const noexcept { return ac_; }
  const std::vector<CurvePoint>& curve() const noexcept { return curve_; }
  int episodes() const noexcept { return episodes_; }
  long steps() const noexcept { return steps_; }
  void record_curve_point();

 private:
  void collect_batch(int episode_limit);
  void update();

  Algo algo_;
  TrainConfig cfg_;
  ScenarioConfig scenario_;
  Env env_;
  Rng rng_;
  ActorCritic ac_;
  Optimizer opt_;
  RolloutBuffer buffer_;
  Observation obs_;
  std::vector<CurvePoint> curve_;
  int episodes_ = 0;
  long steps_ = 0;
};

/// Full run: initial evaluation, alternating collection and updates until the episode
/// budget, an evaluation every cfg.eval_interval episodes and once at the end.
TrainResult train(Algo algo, const TrainConfig& cfg, const ScenarioConfig& scenario, std::uint64_t seed);

struct Checkpoint {
  Algo algo = Algo::Ppo;
  TrainConfig config;
  ScenarioConfig scenario;
  std::uint64_t seed = 0;
  ActorCritic model;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);

}  // namespace scim
