#include "scim/agents.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "scim/error.hpp"

namespace scim {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DivergenceError(std::string("non-finite ") + what + " during training");
}

}  // namespace

Algo parse_algo(const std::string& name) {
  if (name == "vpg") return Algo::Vpg;
  if (name == "ppo") return Algo::Ppo;
  throw ConfigError("algo", "unknown algorithm '" + name + "' (expected vpg or ppo)");
}

const char* to_string(Algo a) { return a == Algo::Vpg ? "vpg" : "ppo"; }

void TrainConfig::validate() const {
  auto fail = [](const char* field, const std::string& msg) { throw ConfigError(field, msg); };
  if (hidden.empty()) fail("hidden", "at least one hidden layer is required");
  for (int h : hidden) {
    if (h < 1) fail("hidden", "hidden layer sizes must be positive");
  }
  if (!(learning_rate > 0)) fail("learning_rate", "learning_rate must be > 0");
  if (!(gamma >= 0 && gamma <= 1)) fail("gamma", "gamma must lie in [0, 1]");
  if (!(gae_lambda >= 0 && gae_lambda <= 1)) fail("gae_lambda", "gae_lambda must lie in [0, 1]");
  if (rollout_fragment_length < 1) fail("rollout_fragment_length", "rollout_fragment_length must be >= 1");
  if (train_batch_size < 1) fail("train_batch_size", "train_batch_size must be >= 1");
  if (!(clip_epsilon > 0)) fail("clip_epsilon", "clip_epsilon must be > 0");
  if (sgd_iterations < 1) fail("sgd_iterations", "sgd_iterations must be >= 1");
  if (minibatch_size < 1) fail("minibatch_size", "minibatch_size must be >= 1");
  if (grad_clip < 0) fail("grad_clip", "grad_clip must be >= 0");
  if (value_coeff < 0) fail("value_coeff", "value_coeff must be >= 0");
  if (optimizer != "sgd" && optimizer != "adam") fail("optimizer", "optimizer must be sgd or adam");
  if (!(reward_scale > 0)) fail("reward_scale", "reward_scale must be > 0");
  if (episode_budget < 0) fail("episode_budget", "episode_budget must be >= 0");
  if (eval_interval < 1) fail("eval_interval", "eval_interval must be >= 1");
  if (eval_episodes < 1) fail("eval_episodes", "eval_episodes must be >= 1");
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {
      {"hidden", c.hidden},
      {"learning_rate", c.learning_rate},
      {"gamma", c.gamma},
      {"gae_lambda", c.gae_lambda},
      {"rollout_fragment_length", c.rollout_fragment_length},
      {"train_batch_size", c.train_batch_size},
      {"clip_epsilon", c.clip_epsilon},
      {"sgd_iterations", c.sgd_iterations},
      {"minibatch_size", c.minibatch_size},
      {"grad_clip", c.grad_clip},
      {"value_coeff", c.value_coeff},
      {"entropy_coeff", c.entropy_coeff},
      {"optimizer", c.optimizer},
      {"momentum", c.momentum},
      {"reward_scale", c.reward_scale},
      {"episode_budget", c.episode_budget},
      {"eval_interval", c.eval_interval},
      {"eval_episodes", c.eval_episodes},
      {"eval_seed", c.eval_seed},
      {"init_log_std", c.init_log_std},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, std::string("invalid value for ") + key + ": " + e.what());
    }
  };
  if (!j.is_object()) throw ConfigError("train_config", "training config must be a JSON object");
  const nlohmann::json known = train_config_to_json(TrainConfig{});
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ConfigError(item.key(), "unknown training option '" + item.key() + "'");
  }
  get("hidden", c.hidden);
  get("learning_rate", c.learning_rate);
  get("gamma", c.gamma);
  get("gae_lambda", c.gae_lambda);
  get("rollout_fragment_length", c.rollout_fragment_length);
  get("train_batch_size", c.train_batch_size);
  get("clip_epsilon", c.clip_epsilon);
  get("sgd_iterations", c.sgd_iterations);
  get("minibatch_size", c.minibatch_size);
  get("grad_clip", c.grad_clip);
  get("value_coeff", c.value_coeff);
  get("entropy_coeff", c.entropy_coeff);
  get("optimizer", c.optimizer);
  get("momentum", c.momentum);
  get("reward_scale", c.reward_scale);
  get("episode_budget", c.episode_budget);
  get("eval_interval", c.eval_interval);
  get("eval_episodes", c.eval_episodes);
  get("eval_seed", c.eval_seed);
  get("init_log_std", c.init_log_std);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Squashed Gaussian head

double squash(double z, double upper) { return upper * sigmoid(z); }

double squashed_log_prob(const Eigen::VectorXd& z, const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& upper) {
  double lp = 0.0;
  for (Eigen::Index d = 0; d < z.size(); ++d) {
    if (upper[d] <= 0) continue;
    const double u = (z[d] - mean[d]) * std::exp(-log_std[d]);
    lp += -0.5 * u * u - log_std[d] - kLogSqrt2Pi;
    // da/dz = upper * s * (1 - s); log(s(1-s)) = -softplus(z) - softplus(-z)
    lp -= std::log(upper[d]) - softplus(z[d]) - softplus(-z[d]);
  }
  return lp;
}

double squashed_log_prob_of_action(const Eigen::VectorXd& action, const Eigen::VectorXd& mean,
                                   const Eigen::VectorXd& log_std, const Eigen::VectorXd& upper) {
  Eigen::VectorXd z(action.size());
  for (Eigen::Index d = 0; d < action.size(); ++d) {
    if (upper[d] <= 0) {
      z[d] = 0.0;
      continue;
    }
    const double s = action[d] / upper[d];
    z[d] = std::log(s) - std::log1p(-s);
  }
  return squashed_log_prob(z, mean, log_std, upper);
}

PolicySample policy_sample(const GaussianHead& head, const Eigen::VectorXd& means, Rng& rng, bool deterministic) {
  const Eigen::Index n = means.size();
  if (head.log_std.size() != n || head.upper.size() != n) {
    throw ContractError("policy_sample: head and means have different dimensions");
  }
  PolicySample out;
  out.pre_squash.resize(n);
  out.action.resize(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    out.pre_squash[d] = deterministic ? means[d] : means[d] + std::exp(head.log_std[d]) * rng.normal();
    out.action[d] = squash(out.pre_squash[d], head.upper[d]);
  }
  out.log_prob = squashed_log_prob(out.pre_squash, means, head.log_std, head.upper);
  return out;
}

// ---------------------------------------------------------------------------
// Actor-critic

ActorCritic::ActorCritic(const ScenarioConfig& scenario, const std::vector<int>& hidden, double init_log_std,
                         Rng& rng) {
  const int obs_dim = static_cast<int>(observation_size(scenario));
  const int act_dim = static_cast<int>(action_size(scenario));
  std::vector<int> psizes{obs_dim};
  psizes.insert(psizes.end(), hidden.begin(), hidden.end());
  std::vector<int> vsizes = psizes;
  psizes.push_back(act_dim);
  vsizes.push_back(1);
  policy = Mlp(psizes);
  value = Mlp(vsizes);
  policy.init(rng, 0.01);
  value.init(rng, 1.0);

  head.log_std = Eigen::VectorXd::Constant(act_dim, init_log_std);
  head.upper.resize(act_dim);
  const ActionBounds bounds = action_bounds(scenario);
  for (int i = 0; i < scenario.num_products; ++i) {
    for (int j = 0; j < scenario.num_nodes(); ++j) {
      head.upper[i * scenario.num_nodes() + j] = bounds(i, j).upper;
    }
  }

  obs_scale.resize(obs_dim);
  Eigen::Index k = 0;
  for (int i = 0; i < scenario.num_products; ++i) {
    for (int j = 0; j < scenario.num_nodes(); ++j) {
      const int c = scenario.storage_capacity(i, j);
      obs_scale[k++] = c > 0 ? c : 1.0;
    }
  }
  for (int h = 0; h < scenario.history_len; ++h) {
    for (int i = 0; i < scenario.num_products; ++i) {
      const double s = scenario.demand_max[i] + scenario.demand_var[i];
      for (int j = 1; j < scenario.num_nodes(); ++j) obs_scale[k++] = s > 0 ? s : 1.0;
    }
  }
}

Eigen::VectorXd ActorCritic::normalize(std::span<const double> observation) const {
  if (static_cast<Eigen::Index>(observation.size()) != obs_scale.size()) {
    throw ContractError("observation length " + std::to_string(observation.size()) + " does not match model input " +
                        std::to_string(obs_scale.size()));
  }
  Eigen::VectorXd x(obs_scale.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = observation[static_cast<std::size_t>(k)] / obs_scale[k];
  return x;
}

Eigen::MatrixXd ActorCritic::normalize_batch(const std::vector<Eigen::VectorXd>& raw) const {
  Eigen::MatrixXd x(obs_scale.size(), static_cast<Eigen::Index>(raw.size()));
  for (std::size_t n = 0; n < raw.size(); ++n) {
    x.col(static_cast<Eigen::Index>(n)) = raw[n].cwiseQuotient(obs_scale);
  }
  return x;
}

ActorCritic::Output ActorCritic::forward(std::span<const double> observation) const {
  const Eigen::VectorXd x = normalize(observation);
  Output out;
  out.means = policy.forward(x).col(0);
  out.value = value.forward(x)(0, 0);
  return out;
}

std::size_t ActorCritic::num_params() const {
  return policy.num_params() + static_cast<std::size_t>(head.log_std.size()) + value.num_params();
}

Eigen::VectorXd ActorCritic::flat_params() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(num_params()));
  flat << policy.params(), head.log_std, value.params();
  return flat;
}

void ActorCritic::set_flat_params(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(num_params())) {
    throw ContractError("set_flat_params: parameter vector has the wrong length");
  }
  const auto np = static_cast<Eigen::Index>(policy.num_params());
  const auto ns = head.log_std.size();
  const auto nv = static_cast<Eigen::Index>(value.num_params());
  policy.params() = flat.segment(0, np);
  head.log_std = flat.segment(np, ns);
  value.params() = flat.segment(np + ns, nv);
}

nlohmann::json actor_critic_to_json(const ActorCritic& ac) {
  return {
      {"policy_sizes", ac.policy.sizes()},
      {"policy_params", to_std(ac.policy.params())},
      {"value_sizes", ac.value.sizes()},
      {"value_params", to_std(ac.value.params())},
      {"log_std", to_std(ac.head.log_std)},
      {"upper", to_std(ac.head.upper)},
      {"obs_scale", to_std(ac.obs_scale)},
  };
}

ActorCritic actor_critic_from_json(const nlohmann::json& j) {
  try {
    ActorCritic ac;
    ac.policy = Mlp(j.at("policy_sizes").get<std::vector<int>>());
    ac.value = Mlp(j.at("value_sizes").get<std::vector<int>>());
    const auto pp = j.at("policy_params").get<std::vector<double>>();
    const auto vp = j.at("value_params").get<std::vector<double>>();
    if (pp.size() != ac.policy.num_params() || vp.size() != ac.value.num_params()) {
      throw ConfigError("model", "parameter count does not match layer sizes");
    }
    ac.policy.params() = to_eigen(pp);
    ac.value.params() = to_eigen(vp);
    ac.head.log_std = to_eigen(j.at("log_std").get<std::vector<double>>());
    ac.head.upper = to_eigen(j.at("upper").get<std::vector<double>>());
    ac.obs_scale = to_eigen(j.at("obs_scale").get<std::vector<double>>());
    const auto act_dim = static_cast<Eigen::Index>(ac.policy.output_size());
    if (ac.head.log_std.size() != act_dim || ac.head.upper.size() != act_dim ||
        ac.obs_scale.size() != ac.policy.input_size() || ac.value.input_size() != ac.policy.input_size()) {
      throw ConfigError("model", "inconsistent model dimensions");
    }
    return ac;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model", std::string("malformed model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Rollouts and advantages

void RolloutBuffer::clear() {
  observations.clear();
  pre_squash.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
  last_value = 0.0;
}

void RolloutBuffer::add(Eigen::VectorXd obs, Eigen::VectorXd z, double log_prob, double reward, double value,
                        bool done) {
  observations.push_back(std::move(obs));
  pre_squash.push_back(std::move(z));
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  values.push_back(value);
  dones.push_back(done);
}

Advantages compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  const std::size_t n = buffer.size();
  if (buffer.values.size() != n || buffer.dones.size() != n) {
    throw ContractError("compute_gae: buffer columns have different lengths");
  }
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double gae = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? buffer.values[t + 1] : buffer.last_value;
    const double live = buffer.dones[t] ? 0.0 : 1.0;
    const double delta = buffer.rewards[t] + gamma * next_value * live - buffer.values[t];
    gae = delta + gamma * lambda * live * gae;
    out.advantages[t] = gae;
    out.returns[t] = gae + buffer.values[t];
  }
  return out;
}

std::vector<double> normalize_advantages(const std::vector<double>& adv) {
  if (adv.empty()) return {};
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(adv.size()));
  std::vector<double> out(adv.size(), 0.0);
  if (sd < 1e-12 * std::max(1.0, std::abs(mean))) return out;
  for (std::size_t k = 0; k < adv.size(); ++k) out[k] = (adv[k] - mean) / sd;
  return out;
}

// ---------------------------------------------------------------------------
// Losses

double ppo_clipped_objective(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

// Shared machinery: `weight(n, logp)` returns (per-sample policy objective, d objective / d logp).
template <typename Weight>
LossGrad surrogate_loss(const ActorCritic& ac, const RolloutBuffer& buffer, const std::vector<double>& returns,
                        const std::vector<std::size_t>& rows, const TrainConfig& cfg, Weight&& weight) {
  if (rows.empty()) throw ContractError("loss over an empty batch");
  const auto batch = static_cast<Eigen::Index>(rows.size());
  const double inv_n = 1.0 / static_cast<double>(batch);
  std::vector<Eigen::VectorXd> raw;
  raw.reserve(rows.size());
  for (std::size_t r : rows) raw.push_back(buffer.observations.at(r));
  const Eigen::MatrixXd x = ac.normalize_batch(raw);

  Mlp::Tape ptape, vtape;
  const Eigen::MatrixXd means = ac.policy.forward(x, &ptape);
  const Eigen::MatrixXd values = ac.value.forward(x, &vtape);
  const Eigen::Index act_dim = means.rows();
  const Eigen::VectorXd& log_std = ac.head.log_std;
  const Eigen::VectorXd inv_var = (-2.0 * log_std).array().exp();

  LossGrad out;
  Eigen::MatrixXd g_means = Eigen::MatrixXd::Zero(act_dim, batch);
  Eigen::VectorXd g_log_std = Eigen::VectorXd::Zero(act_dim);
  Eigen::MatrixXd g_values(1, batch);
  double ratio_sum = 0.0;
  int clipped = 0;
  for (Eigen::Index n = 0; n < batch; ++n) {
    const std::size_t r = rows[static_cast<std::size_t>(n)];
    const Eigen::VectorXd& z = buffer.pre_squash.at(r);
    const double logp = squashed_log_prob(z, means.col(n), log_std, ac.head.upper);
    const auto [objective, dlogp, ratio, is_clipped] = weight(r, logp);
    out.policy_loss -= objective * inv_n;
    ratio_sum += ratio;
    clipped += is_clipped ? 1 : 0;
    for (Eigen::Index d = 0; d < act_dim; ++d) {
      if (ac.head.upper[d] <= 0) continue;
      const double diff = z[d] - means(d, n);
      g_means(d, n) = -dlogp * diff * inv_var[d] * inv_n;
      g_log_std[d] += -dlogp * (diff * diff * inv_var[d] - 1.0) * inv_n;
    }
    const double err = values(0, n) - returns.at(r);
    out.value_loss += 0.5 * err * err * inv_n;
    g_values(0, n) = cfg.value_coeff * err * inv_n;
  }
  if (cfg.entropy_coeff != 0.0) {
    for (Eigen::Index d = 0; d < act_dim; ++d) {
      if (ac.head.upper[d] <= 0) continue;
      out.policy_loss -= cfg.entropy_coeff * (log_std[d] + 0.5 + kLogSqrt2Pi);
      g_log_std[d] -= cfg.entropy_coeff;
    }
  }
  out.mean_ratio = ratio_sum * inv_n;
  out.clip_fraction = clipped * inv_n;

  Eigen::VectorXd gp, gv;
  ac.policy.backward(ptape, g_means, gp);
  ac.value.backward(vtape, g_values, gv);
  out.grad.resize(static_cast<Eigen::Index>(ac.num_params()));
  out.grad << gp, g_log_std, gv;
  return out;
}

struct SampleTerm {
  double objective;
  double dlogp;
  double ratio;
  bool clipped;
};

}  // namespace

LossGrad vpg_loss(const ActorCritic& ac, const RolloutBuffer& buffer, const std::vector<double>& advantages,
                  const std::vector<double>& returns, const std::vector<std::size_t>& rows, const TrainConfig& cfg) {
  return surrogate_loss(ac, buffer, returns, rows, cfg, [&](std::size_t r, double logp) {
    const double a = advantages.at(r);
    return SampleTerm{logp * a, a, 1.0, false};
  });
}

LossGrad ppo_loss(const ActorCritic& ac, const RolloutBuffer& buffer, const std::vector<double>& advantages,
                  const std::vector<double>& returns, const std::vector<std::size_t>& rows, const TrainConfig& cfg) {
  const double eps = cfg.clip_epsilon;
  return surrogate_loss(ac, buffer, returns, rows, cfg, [&](std::size_t r, double logp) {
    const double a = advantages.at(r);
    const double ratio = std::exp(logp - buffer.log_probs.at(r));
    const double clipped_ratio = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    const bool unclipped_branch = ratio * a <= clipped_ratio * a;
    const double obj = unclipped_branch ? ratio * a : clipped_ratio * a;
    return SampleTerm{obj, unclipped_branch ? ratio * a : 0.0, ratio, std::abs(ratio - 1.0) > eps};
  });
}

Optimizer make_optimizer(const TrainConfig& cfg) {
  return Optimizer(cfg.optimizer == "adam" ? Optimizer::Kind::Adam : Optimizer::Kind::Sgd, cfg.learning_rate,
                   cfg.momentum);
}

namespace {

UpdateStats apply_step(ActorCritic& ac, Optimizer& opt, LossGrad& lg, const TrainConfig& cfg) {
  require_finite(lg.policy_loss, "policy loss");
  require_finite(lg.value_loss, "value loss");
  UpdateStats s;
  s.policy_loss = lg.policy_loss;
  s.value_loss = lg.value_loss;
  s.mean_ratio = lg.mean_ratio;
  s.clip_fraction = lg.clip_fraction;
  s.grad_norm = clip_grad_norm(lg.grad, cfg.grad_clip);
  require_finite(s.grad_norm, "gradient norm");
  Eigen::VectorXd params = ac.flat_params();
  opt.step(params, lg.grad);
  if (!params.allFinite()) throw DivergenceError("non-finite parameters after update");
  ac.set_flat_params(params);
  return s;
}

}  // namespace

UpdateStats vpg_update(ActorCritic& ac, Optimizer& opt, const RolloutBuffer& buffer, const TrainConfig& cfg) {
  if (buffer.size() == 0) throw ContractError("vpg_update: empty buffer");
  const Advantages adv = compute_gae(buffer, cfg.gamma, cfg.gae_lambda);
  const std::vector<double> norm = normalize_advantages(adv.advantages);
  std::vector<std::size_t> rows(buffer.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  LossGrad lg = vpg_loss(ac, buffer, norm, adv.returns, rows, cfg);
  return apply_step(ac, opt, lg, cfg);
}

UpdateStats ppo_update(ActorCritic& ac, Optimizer& opt, const RolloutBuffer& buffer, const TrainConfig& cfg,
                       Rng& rng) {
  if (buffer.size() == 0) throw ContractError("ppo_update: empty buffer");
  const Advantages adv = compute_gae(buffer, cfg.gamma, cfg.gae_lambda);
  const std::vector<double> norm = normalize_advantages(adv.advantages);
  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t mb = static_cast<std::size_t>(cfg.minibatch_size);
  UpdateStats total;
  total.mean_ratio = 0.0;
  int steps = 0;
  for (int epoch = 0; epoch < cfg.sgd_iterations; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) {
      const auto swap_with = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(k - 1)));
      std::swap(order[k - 1], order[swap_with]);
    }
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + mb)));
      LossGrad lg = ppo_loss(ac, buffer, norm, adv.returns, rows, cfg);
      const UpdateStats s = apply_step(ac, opt, lg, cfg);
      total.policy_loss += s.policy_loss;
      total.value_loss += s.value_loss;
      total.mean_ratio += s.mean_ratio;
      total.clip_fraction += s.clip_fraction;
      total.grad_norm += s.grad_norm;
      ++steps;
    }
  }
  const double inv = 1.0 / steps;
  total.policy_loss *= inv;
  total.value_loss *= inv;
  total.mean_ratio *= inv;
  total.clip_fraction *= inv;
  total.grad_norm *= inv;
  return total;
}

// ---------------------------------------------------------------------------
// Greedy policy and training loop

namespace {

// Continuous action in [0, upper] to the value handed to clip_action (which floors):
// rounding gives every integer level, including the bound, a reachable interval.
std::vector<double> to_env_action(const Eigen::VectorXd& a) {
  std::vector<double> out(static_cast<std::size_t>(a.size()));
  for (Eigen::Index d = 0; d < a.size(); ++d) out[static_cast<std::size_t>(d)] = a[d] + 0.5;
  return out;
}

}  // namespace

std::vector<double> ActorCriticPolicy::act(std::span<const double> observation) {
  const Eigen::VectorXd means = ac_.policy.forward(ac_.normalize(observation)).col(0);
  Eigen::VectorXd a(means.size());
  for (Eigen::Index d = 0; d < means.size(); ++d) a[d] = squash(means[d], ac_.head.upper[d]);
  return to_env_action(a);
}

Trainer::Trainer(Algo algo, TrainConfig cfg, ScenarioConfig scenario, std::uint64_t seed)
    : algo_(algo),
      cfg_(std::move(cfg)),
      scenario_(std::move(scenario)),
      env_(scenario_, derive_seed(seed, 3)),
      rng_(derive_seed(seed, 1)) {
  cfg_.validate();
  Rng init_rng(derive_seed(seed, 2));
  ac_ = ActorCritic(scenario_, cfg_.hidden, cfg_.init_log_std, init_rng);
  opt_ = make_optimizer(cfg_);
  obs_ = env_.observation();
}

CurvePoint Trainer::evaluate() const {
  const EvalResult r = evaluate_policy(scenario_, ActorCriticPolicy(ac_), cfg_.eval_episodes, cfg_.eval_seed);
  return {episodes_, r.mean, r.std};
}

void Trainer::record_curve_point() {
  if (!curve_.empty() && curve_.back().episode == episodes_) return;
  curve_.push_back(evaluate());
}

void Trainer::collect_batch(int episode_limit) {
  buffer_.clear();
  const std::size_t target = static_cast<std::size_t>(cfg_.train_batch_size);
  const int frag = cfg_.rollout_fragment_length;
  while (buffer_.size() < target && episodes_ < episode_limit) {
    for (int k = 0; k < frag && episodes_ < episode_limit; ++k) {
      const ActorCritic::Output o = ac_.forward(obs_);
      const PolicySample s = policy_sample(ac_.head, o.means, rng_);
      const StepOutcome out = env_.step(clip_action(to_env_action(s.action), env_.bounds()));
      require_finite(out.reward, "reward");
      buffer_.add(to_eigen(obs_), s.pre_squash, s.log_prob, out.reward * cfg_.reward_scale, o.value, out.done);
      ++steps_;
      if (out.done) {
        ++episodes_;
        env_.reset();
        obs_ = env_.observation();
      } else {
        obs_ = out.observation;
      }
    }
  }
  buffer_.last_value = buffer_.size() > 0 && !buffer_.dones.back() ? ac_.forward(obs_).value : 0.0;
}

void Trainer::update() {
  if (buffer_.size() == 0) return;
  if (algo_ == Algo::Vpg) {
    vpg_update(ac_, opt_, buffer_, cfg_);
  } else {
    ppo_update(ac_, opt_, buffer_, cfg_, rng_);
  }
}

void Trainer::train_until(int episodes) {
  if (curve_.empty()) record_curve_point();
  int next_eval = (episodes_ / cfg_.eval_interval + 1) * cfg_.eval_interval;
  while (episodes_ < episodes) {
    collect_batch(episodes);
    update();
    if (episodes_ >= next_eval) {
      record_curve_point();
      next_eval = (episodes_ / cfg_.eval_interval + 1) * cfg_.eval_interval;
    }
  }
  record_curve_point();
}

TrainResult train(Algo algo, const TrainConfig& cfg, const ScenarioConfig& scenario, std::uint64_t seed) {
  Trainer trainer(algo, cfg, scenario, seed);
  trainer.train_until(cfg.episode_budget);
  return {trainer.model(), trainer.curve(), trainer.episodes(), trainer.steps()};
}

// ---------------------------------------------------------------------------
// Persistence

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json j{
      {"format", "scim-checkpoint"},
      {"version", 1},
      {"algo", to_string(ckpt.algo)},
      {"seed", ckpt.seed},
      {"train_config", train_config_to_json(ckpt.config)},
      {"scenario", config_to_json(ckpt.scenario)},
      {"model", actor_critic_to_json(ckpt.model)},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("checkpoint", "malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (j.value("format", std::string{}) != "scim-checkpoint") {
    throw ConfigError("format", path.string() + " is not a checkpoint file");
  }
  Checkpoint c;
  c.algo = parse_algo(j.at("algo").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.config = train_config_from_json(j.at("train_config"));
  c.scenario = config_from_json(j.at("scenario"));
  c.model = actor_critic_from_json(j.at("model"));
  if (c.model.obs_scale.size() != static_cast<Eigen::Index>(observation_size(c.scenario))) {
    throw ConfigError("model", "checkpoint model does not match its scenario");
  }
  return c;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "episode,eval_mean,eval_std\n";
  auto num = [](double x) {
    char buf[64];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
  };
  for (const auto& p : curve) out << p.episode << ',' << num(p.mean) << ',' << num(p.std) << '\n';
}

}  // namespace scim
