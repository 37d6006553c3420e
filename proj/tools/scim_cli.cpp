// Command-line front end: simulate, tune-sq, train, evaluate, bench, oracle, sweep.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scim/agents.hpp"
#include "scim/bench.hpp"
#include "scim/error.hpp"
#include "scim/oracle.hpp"
#include "scim/scenarios.hpp"
#include "scim/tuning.hpp"

using namespace scim;

namespace {

struct Globals {
  std::string scenario = "1p1w-exp2";
  std::uint64_t seed = 1000;
  int episodes = 0;  // 0: subcommand default
  std::string out;
  int workers = 1;

  int episodes_or(int fallback) const { return episodes > 0 ? episodes : fallback; }
};

struct PolicyChoice {
  std::string kind = "zero";  // zero | random | sq | checkpoint
  std::string params;         // (s,Q) JSON for kind=sq
  std::string checkpoint;     // checkpoint JSON for kind=checkpoint
};

void add_policy_options(CLI::App* cmd, PolicyChoice& p) {
  cmd->add_option("--policy", p.kind, "Policy to run")
      ->check(CLI::IsMember({"zero", "random", "sq", "checkpoint"}))
      ->capture_default_str();
  cmd->add_option("--params", p.params, "(s,Q) parameter file for --policy sq");
  cmd->add_option("--checkpoint", p.checkpoint, "Checkpoint file for --policy checkpoint");
}

std::unique_ptr<Policy> make_policy(const PolicyChoice& p, const ScenarioConfig& config) {
  if (p.kind == "zero") return std::make_unique<ZeroPolicy>(action_size(config));
  if (p.kind == "random") return std::make_unique<RandomPolicy>(action_bounds(config));
  if (p.kind == "sq") {
    if (p.params.empty()) throw ConfigError("params", "--policy sq needs --params FILE");
    SQParams params = load_sq_params(p.params);
    params.validate(config);
    return std::make_unique<SQPolicy>(config, std::move(params));
  }
  if (p.checkpoint.empty()) throw ConfigError("checkpoint", "--policy checkpoint needs --checkpoint FILE");
  Checkpoint ckpt = load_checkpoint(p.checkpoint);
  if (ckpt.model.obs_scale.size() != static_cast<Eigen::Index>(observation_size(config))) {
    throw ConfigError("checkpoint", p.checkpoint + " does not match the scenario's observation size");
  }
  return std::make_unique<ActorCriticPolicy>(std::move(ckpt.model));
}

/// Writes `text` to `path`, or to stdout when `path` is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string fmt(double x, int prec = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << x;
  return s.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "all", a family prefix such as "1p1w", built-in names or file paths.
std::vector<std::string> expand_scenarios(const std::string& selection) {
  std::vector<std::string> out;
  for (const auto& item : split_list(selection)) {
    bool matched = false;
    for (const auto& name : builtin_scenario_names()) {
      if (item == "all" || (name.rfind(item + "-", 0) == 0)) {
        out.push_back(name);
        matched = true;
      }
    }
    if (!matched) out.push_back(item);
  }
  return out;
}

ResultRecord make_record(const std::string& scenario, const ScenarioConfig& config, const std::string& method,
                         const EvalResult& r, int n, std::uint64_t seed_base) {
  auto [s, e] = is_builtin_scenario(scenario) ? scenario_labels(scenario)
                                              : std::pair<std::string, std::string>{config.name, ""};
  return {s, e, method, r.mean, r.std, n, seed_base, 0.0};
}

void emit_record(const std::string& path, const ResultRecord& rec) {
  if (path.empty()) return;
  export_results({rec}, path, result_format_for(path));
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Globals& g, const PolicyChoice& pc) {
  const ScenarioConfig config = load_scenario(g.scenario);
  auto policy = make_policy(pc, config);
  const int n = g.episodes_or(1);
  std::ostringstream csv;
  csv << "episode,t";
  for (const char* block : {"stock", "action", "demand"}) {
    for (int i = 0; i < config.num_products; ++i) {
      for (int j = (std::string(block) == "demand" ? 1 : 0); j < config.num_nodes(); ++j) {
        csv << ',' << block << '_' << i << '_' << j;
      }
    }
  }
  csv << ",revenue,production,transport,storage,penalty,reward\n";
  double total = 0.0;
  for (int ep = 0; ep < n; ++ep) {
    const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(ep);
    Env env(config, seed);
    policy->reset(seed);
    auto obs = env.observation();
    while (!env.done()) {
      const auto stock = env.state().stock;
      const int t = env.state().t;
      const ActionVector a = clip_action(policy->act(obs), env.bounds());
      const StepOutcome o = env.step(a);
      csv << ep << ',' << t;
      for (int v : stock.flat()) csv << ',' << v;
      for (int v : a.flat()) csv << ',' << v;
      for (int i = 0; i < config.num_products; ++i) {
        for (int j = 1; j < config.num_nodes(); ++j) csv << ',' << o.demand_realized(i, j);
      }
      const auto& b = o.breakdown;
      csv << ',' << b.revenue << "," << b.production_cost << "," << b.transport_cost << "," << b.storage_cost << "," << b.penalty_cost
          << ',' << o.reward << '\n';
      total += o.reward;
      obs = o.observation;
    }
  }
  emit(g.out, csv.str());
  std::cerr << "simulated " << n << " episode(s), mean profit " << fmt(total / n) << '\n';
  return 0;
}

int cmd_tune_sq(const Globals& g, int budget, int eval_episodes, const std::string& params_out) {
  const ScenarioConfig config = load_scenario(g.scenario);
  SqTuneOptions opt;
  opt.budget = budget;
  opt.eval_episodes = eval_episodes;
  opt.seed = g.seed;
  const SqTuneResult r = tune_sq(config, opt);
  const int n = g.episodes_or(200);
  const EvalResult e = evaluate_policy(config, SQPolicy(config, r.params), n, g.seed, g.workers);
  std::cout << "best (s,Q): " << sq_params_to_json(r.params).dump() << '\n'
            << "search objective: " << fmt(r.search.best.last_score()) << " over " << r.search.history.size()
            << " evaluations\n"
            << n << "-episode mean profit: " << fmt(e.mean) << " +- " << fmt(e.std) << '\n';
  const std::string path = params_out.empty() ? g.out : params_out;
  if (!path.empty()) save_sq_params(r.params, path);
  return 0;
}

int cmd_train(const Globals& g, const std::string& algo_name, const std::string& config_path,
              const std::string& curve_path, std::optional<double> lr, const std::string& optimizer) {
  const ScenarioConfig scenario = load_scenario(g.scenario);
  TrainConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read " + config_path);
    try {
      cfg = train_config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config", "malformed training config " + config_path + ": " + e.what());
    }
  }
  if (g.episodes > 0) cfg.episode_budget = g.episodes;
  if (lr) cfg.learning_rate = *lr;
  if (!optimizer.empty()) cfg.optimizer = optimizer;
  cfg.validate();
  const Algo algo = parse_algo(algo_name);
  Trainer trainer(algo, cfg, scenario, g.seed);
  trainer.train_until(cfg.episode_budget);
  for (const auto& p : trainer.curve()) {
    std::cout << "episode " << p.episode << ": eval mean " << fmt(p.mean) << " +- " << fmt(p.std) << '\n';
  }
  if (!curve_path.empty()) write_curve_csv(trainer.curve(), curve_path);
  const std::string out = g.out.empty() ? g.scenario + "." + algo_name + ".ckpt.json" : g.out;
  save_checkpoint({algo, cfg, scenario, g.seed, trainer.model()}, out);
  std::cout << "checkpoint written to " << out << '\n';
  return 0;
}

int cmd_evaluate(const Globals& g, const PolicyChoice& pc) {
  const ScenarioConfig config = load_scenario(g.scenario);
  const auto policy = make_policy(pc, config);
  const int n = g.episodes_or(200);
  const EvalResult r = evaluate_policy(config, *policy, n, g.seed, g.workers);
  std::cout << pc.kind << " on " << g.scenario << ": mean " << fmt(r.mean) << " +- " << fmt(r.std) << " over " << n
            << " episodes\n";
  emit_record(g.out, make_record(g.scenario, config, pc.kind, r, n, g.seed));
  return 0;
}

int cmd_bench(const Globals& g, const std::string& scenarios, const std::string& methods,
              const std::string& artifacts, const std::string& format, bool timing) {
  BenchOptions opt;
  opt.scenarios = expand_scenarios(scenarios.empty() ? g.scenario : scenarios);
  opt.methods = split_list(methods);
  opt.n_episodes = g.episodes_or(200);
  opt.seed_base = g.seed;
  opt.workers = g.workers;
  opt.artifact_dir = artifacts;
  opt.record_time = timing;
  const auto records = run_benchmark(opt);
  ResultFormat f = format.empty() ? (g.out.empty() ? ResultFormat::Csv : result_format_for(g.out))
                                  : parse_result_format(format);
  if (g.out.empty() || g.out == "-") {
    std::cout << (f == ResultFormat::Csv ? results_to_csv(records) : results_to_json(records));
  } else {
    export_results(records, g.out, f);
    std::cerr << records.size() << " record(s) written to " << g.out << '\n';
  }
  return 0;
}

int cmd_oracle(const Globals& g, const std::string& plan_out) {
  const ScenarioConfig config = load_scenario(g.scenario);
  if (!plan_out.empty()) {
    const DemandRealization demand = realize_demand(config, g.seed);
    const PlanResult plan = plan_clairvoyant(demand, config);
    write_plan_csv(plan, demand, config, plan_out);
    std::cout << "plan for episode seed " << g.seed << ": profit " << fmt(plan.total_profit) << " (written to "
              << plan_out << ")\n";
  }
  const int n = g.episodes_or(200);
  const EvalResult r = oracle_evaluate(config, n, g.seed, g.workers);
  std::cout << "oracle on " << g.scenario << ": mean " << fmt(r.mean) << " +- " << fmt(r.std) << " over " << n
            << " episodes\n";
  emit_record(g.out, make_record(g.scenario, config, "oracle", r, n, g.seed));
  return 0;
}

/// ASHA over the DRL hyperparameter grid; budget is training episodes.
int cmd_sweep(const Globals& g, const std::string& algo_name, std::vector<double> rungs, int eta, int max_trials,
              const std::string& log_path) {
  const ScenarioConfig scenario = load_scenario(g.scenario);
  const Algo algo = parse_algo(algo_name);
  const std::vector<double> lrs = algo == Algo::Ppo ? std::vector<double>{5e-4, 5e-3} : std::vector<double>{4e-4, 4e-3};
  const std::vector<int> batches = algo == Algo::Ppo ? std::vector<int>{400, 4000} : std::vector<int>{200, 2000};
  SearchSpace space;
  space.dims = {Dimension::categorical("hidden", {"64x64", "128x128"}),
                Dimension::categorical("learning_rate", {std::to_string(lrs[0]), std::to_string(lrs[1])}),
                Dimension::categorical("train_batch_size", {std::to_string(batches[0]), std::to_string(batches[1])}),
                Dimension::categorical("optimizer", {"sgd", "adam"})};

  struct TrainerTrial final : Trial {
    Trainer trainer;
    TrainerTrial(Algo a, TrainConfig c, ScenarioConfig s, std::uint64_t seed)
        : trainer(a, std::move(c), std::move(s), seed) {}
    double advance_to(double budget) override {
      trainer.train_until(static_cast<int>(budget));
      return trainer.curve().back().mean;
    }
  };
  const TrialFactory factory = [&](const Point& p, int id) -> std::unique_ptr<Trial> {
    TrainConfig cfg;
    cfg.hidden = p[0] == 0 ? std::vector<int>{64, 64} : std::vector<int>{128, 128};
    cfg.learning_rate = lrs[static_cast<std::size_t>(p[1])];
    cfg.train_batch_size = batches[static_cast<std::size_t>(p[2])];
    cfg.optimizer = p[3] == 0 ? "sgd" : "adam";
    cfg.eval_interval = 1 << 30;
    return std::make_unique<TrainerTrial>(algo, cfg, scenario, derive_seed(g.seed, static_cast<std::uint64_t>(id)));
  };
  AshaOptions opt;
  opt.rungs = std::move(rungs);
  opt.eta = eta;
  opt.max_trials = max_trials;
  opt.workers = g.workers;
  opt.seed = g.seed;
  if (!log_path.empty()) opt.log_path = log_path;
  const AshaResult r = asha_run(factory, space, opt);
  for (const auto& t : r.trials) {
    std::cout << "trial " << t.id << " [" << to_string(t.status) << "]";
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
      std::cout << ' ' << space.dims[d].name << '=' << space.dims[d].labels[static_cast<std::size_t>(t.params[d])];
    }
    std::cout << " last score " << fmt(t.last_score()) << " at " << t.last_budget() << '\n';
  }
  std::cout << "best trial " << r.best.id << ": " << fmt(r.best.last_score()) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scim: two-echelon supply chain inventory management toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--scenario", g.scenario, "Built-in scenario name or scenario JSON file")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed (episode seed base for evaluations)")->capture_default_str();
  app.add_option("--episodes", g.episodes, "Episode count (evaluation episodes, or training budget)");
  app.add_option("--out", g.out, "Output file");
  app.add_option("--workers", g.workers, "Worker threads for episode evaluation")->check(CLI::PositiveNumber);

  PolicyChoice sim_policy, eval_policy;
  auto* simulate = app.add_subcommand("simulate", "Roll a policy and dump the trajectory as CSV");
  add_policy_options(simulate, sim_policy);

  int tune_budget = 200, tune_eval = 30;
  std::string tune_params_out;
  auto* tune = app.add_subcommand("tune-sq", "Tune (s,Q) parameters with Bayesian optimization");
  tune->add_option("--budget", tune_budget, "Objective evaluations")->capture_default_str();
  tune->add_option("--eval-episodes", tune_eval, "Episodes per objective evaluation")->capture_default_str();
  tune->add_option("--params-out", tune_params_out, "Where to write the tuned parameters (defaults to --out)");

  std::string algo = "ppo", train_config, curve_path, optimizer;
  std::optional<double> lr;
  auto* train_cmd = app.add_subcommand("train", "Train a VPG or PPO agent");
  train_cmd->add_option("--algo", algo, "vpg or ppo")->check(CLI::IsMember({"vpg", "ppo"}))->capture_default_str();
  train_cmd->add_option("--config", train_config, "Training config JSON");
  train_cmd->add_option("--curve", curve_path, "Learning curve CSV output");
  train_cmd->add_option("--lr", lr, "Learning rate override");
  train_cmd->add_option("--optimizer", optimizer, "sgd or adam")->check(CLI::IsMember({"sgd", "adam"}));

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a policy over seeded episodes");
  add_policy_options(evaluate, eval_policy);

  std::string bench_scenarios, bench_methods = "oracle,random,zero", artifacts = ".", format;
  bool timing = false;
  auto* bench = app.add_subcommand("bench", "Run the benchmark protocol and export results");
  bench->add_option("--scenarios", bench_scenarios, "Comma list: names, family prefixes (1p1w) or 'all'");
  bench->add_option("--methods", bench_methods, "Comma list of methods")->capture_default_str();
  bench->add_option("--artifacts", artifacts, "Directory with tuned/trained artifacts")->capture_default_str();
  bench->add_option("--format", format, "csv or json (default: from --out extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--timing", timing, "Record wall-clock time per record");

  std::string plan_out;
  auto* oracle = app.add_subcommand("oracle", "Clairvoyant planner: evaluate and optionally dump one plan");
  oracle->add_option("--plan-out", plan_out, "Write the plan for episode --seed as CSV");

  std::string sweep_algo = "ppo", sweep_log;
  std::vector<double> rungs{100, 300, 900};
  int eta = 3, max_trials = 9;
  auto* sweep = app.add_subcommand("sweep", "ASHA sweep over DRL hyperparameters");
  sweep->add_option("--algo", sweep_algo, "vpg or ppo")->check(CLI::IsMember({"vpg", "ppo"}))->capture_default_str();
  sweep->add_option("--rungs", rungs, "Training-episode budget ladder")->capture_default_str();
  sweep->add_option("--eta", eta, "Reduction factor")->capture_default_str();
  sweep->add_option("--max-trials", max_trials, "Trials to start")->capture_default_str();
  sweep->add_option("--log", sweep_log, "Trial log CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) return cmd_simulate(g, sim_policy);
    if (*tune) return cmd_tune_sq(g, tune_budget, tune_eval, tune_params_out);
    if (*train_cmd) return cmd_train(g, algo, train_config, curve_path, lr, optimizer);
    if (*evaluate) return cmd_evaluate(g, eval_policy);
    if (*bench) return cmd_bench(g, bench_scenarios, bench_methods, artifacts, format, timing);
    if (*oracle) return cmd_oracle(g, plan_out);
    if (*sweep) return cmd_sweep(g, sweep_algo, rungs, eta, max_trials, sweep_log);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
