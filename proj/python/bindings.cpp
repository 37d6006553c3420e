#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scim/agents.hpp"
#include "scim/bench.hpp"
#include "scim/error.hpp"
#include "scim/oracle.hpp"
#include "scim/scenarios.hpp"
#include "scim/tuning.hpp"

namespace py = pybind11;
using namespace scim;

namespace {

// Tables cross the boundary as nested lists.
template <typename T>
std::vector<std::vector<T>> to_rows(const Table<T>& t) {
  std::vector<std::vector<T>> rows(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) rows[r].assign(t.row(r).begin(), t.row(r).end());
  return rows;
}

template <typename T>
Table<T> from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols) {
  Table<T> t(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ContractError("expected rows of length " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) t(r, c) = rows[r][c];
  }
  return t;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict breakdown_dict(const RewardBreakdown& b) {
  py::dict d;
  d["revenue"] = b.revenue;
  d["production_cost"] = b.production_cost;
  d["transport_cost"] = b.transport_cost;
  d["storage_cost"] = b.storage_cost;
  d["penalty_cost"] = b.penalty_cost;
  return d;
}

py::dict eval_dict(const EvalResult& r) {
  py::dict d;
  d["mean"] = r.mean;
  d["std"] = r.std;
  d["per_episode"] = r.per_episode;
  return d;
}

SQParams sq_from_lists(const ScenarioConfig& c, const std::vector<std::vector<int>>& s,
                       const std::vector<std::vector<int>>& q) {
  const auto nodes = static_cast<std::size_t>(c.num_nodes());
  SQParams p{from_rows(s, nodes), from_rows(q, nodes)};
  p.validate(c);
  return p;
}

py::dict record_dict(const ResultRecord& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["experiment"] = r.experiment;
  d["method"] = r.method;
  d["mean"] = r.mean;
  d["std"] = r.std;
  d["n"] = r.n_episodes;
  d["seed"] = r.seed_base;
  d["time"] = r.wall_time;
  return d;
}

ResultRecord record_from(const py::dict& d) {
  ResultRecord r;
  r.scenario = d["scenario"].cast<std::string>();
  r.experiment = d["experiment"].cast<std::string>();
  r.method = d["method"].cast<std::string>();
  r.mean = d["mean"].cast<double>();
  r.std = d["std"].cast<double>();
  r.n_episodes = d["n"].cast<int>();
  r.seed_base = d["seed"].cast<std::uint64_t>();
  r.wall_time = d.contains("time") ? d["time"].cast<double>() : 0.0;
  return r;
}

}  // namespace

PYBIND11_MODULE(_scim, m) {
  m.doc() = "Two-echelon supply chain inventory simulator, planners and learners";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readonly("num_products", &ScenarioConfig::num_products)
      .def_readonly("num_warehouses", &ScenarioConfig::num_warehouses)
      .def_readwrite("episode_length", &ScenarioConfig::episode_length)
      .def_readwrite("history_len", &ScenarioConfig::history_len)
      .def_readwrite("sale_price", &ScenarioConfig::sale_price)
      .def_readwrite("production_cost", &ScenarioConfig::production_cost)
      .def_readwrite("penalty_coeff", &ScenarioConfig::penalty_coeff)
      .def_readwrite("demand_max", &ScenarioConfig::demand_max)
      .def_readwrite("demand_var", &ScenarioConfig::demand_var)
      .def_property_readonly("storage_capacity", [](const ScenarioConfig& c) { return to_rows(c.storage_capacity); })
      .def_property_readonly("storage_cost", [](const ScenarioConfig& c) { return to_rows(c.storage_cost); })
      .def_property_readonly("transport_cost", [](const ScenarioConfig& c) { return to_rows(c.transport_cost); })
      .def("validate", &ScenarioConfig::validate)
      .def("to_dict", [](const ScenarioConfig& c) { return json_to_py(config_to_json(c)); })
      .def_static("from_dict", [](const py::object& d) { return config_from_json(py_to_json(d)); })
      .def("__repr__", [](const ScenarioConfig& c) { return "<ScenarioConfig " + c.name + ">"; });

  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def("load_scenario", &load_scenario, py::arg("name_or_path"));
  m.def("observation_size", &observation_size);
  m.def("action_size", &action_size);
  m.def("action_bounds", [](const ScenarioConfig& c) {
    const ActionBounds b = action_bounds(c);
    std::vector<std::vector<std::pair<int, int>>> rows(b.rows());
    for (std::size_t r = 0; r < b.rows(); ++r) {
      for (const auto& x : b.row(r)) rows[r].emplace_back(x.lower, x.upper);
    }
    return rows;
  });

  py::class_<Env>(m, "Env")
      .def(py::init<ScenarioConfig, std::uint64_t>(), py::arg("config"), py::arg("seed") = 0)
      .def("reset", py::overload_cast<>(&Env::reset))
      .def("reset", py::overload_cast<std::uint64_t>(&Env::reset), py::arg("seed"))
      .def(
          "step",
          [](Env& env, const std::vector<double>& raw) {
            const StepOutcome o = env.step(clip_action(raw, env.bounds()));
            py::dict info;
            info["breakdown"] = breakdown_dict(o.breakdown);
            info["demand"] = to_rows(o.demand_realized);
            return py::make_tuple(o.observation, o.reward, o.done, info);
          },
          py::arg("action"), "Floors and clamps a flat raw action, steps, returns (obs, reward, done, info).")
      .def_property_readonly("observation", &Env::observation)
      .def_property_readonly("done", &Env::done)
      .def_property_readonly("t", [](const Env& e) { return e.state().t; })
      .def_property_readonly("stock", [](const Env& e) { return to_rows(e.state().stock); })
      .def_property_readonly("config", &Env::config);

  m.def("sample_demand", [](const ScenarioConfig& c, int product, int warehouse, int t, std::uint64_t seed) {
    Rng rng(seed);
    return sample_demand(c, product, warehouse, t, rng);
  });

  m.def(
      "evaluate_policy",
      [](const ScenarioConfig& c, const std::string& kind, int n, std::uint64_t seed_base, int workers) {
        if (kind == "zero") return eval_dict(evaluate_policy(c, ZeroPolicy(action_size(c)), n, seed_base, workers));
        if (kind == "random") {
          return eval_dict(evaluate_policy(c, RandomPolicy(action_bounds(c)), n, seed_base, workers));
        }
        throw ConfigError("kind", "policy kind must be 'zero' or 'random' (use evaluate_sq / Model.evaluate)");
      },
      py::arg("config"), py::arg("kind"), py::arg("episodes") = 200, py::arg("seed_base") = 1000,
      py::arg("workers") = 1);
  m.def(
      "evaluate_sq",
      [](const ScenarioConfig& c, const std::vector<std::vector<int>>& s, const std::vector<std::vector<int>>& q, int n,
         std::uint64_t seed_base) {
        return eval_dict(evaluate_policy(c, SQPolicy(c, sq_from_lists(c, s, q)), n, seed_base));
      },
      py::arg("config"), py::arg("s"), py::arg("Q"), py::arg("episodes") = 200, py::arg("seed_base") = 1000);

  m.def(
      "oracle_evaluate",
      [](const ScenarioConfig& c, int n, std::uint64_t seed_base, int workers) {
        return eval_dict(oracle_evaluate(c, n, seed_base, workers));
      },
      py::arg("config"), py::arg("episodes") = 200, py::arg("seed_base") = 1000, py::arg("workers") = 1);
  m.def(
      "plan_clairvoyant",
      [](const ScenarioConfig& c, std::uint64_t seed) {
        const DemandRealization d = realize_demand(c, seed);
        const PlanResult p = plan_clairvoyant(d, c);
        py::dict out;
        std::vector<std::vector<std::vector<int>>> actions, demand;
        for (const auto& a : p.actions) actions.push_back(to_rows(a));
        for (const auto& s : d.steps) demand.push_back(to_rows(s));
        out["actions"] = actions;
        out["demand"] = demand;
        out["total_profit"] = p.total_profit;
        out["breakdown"] = breakdown_dict(p.breakdown);
        return out;
      },
      py::arg("config"), py::arg("seed"));
  m.def(
      "dp_exact",
      [](const ScenarioConfig& c, std::uint64_t seed) { return dp_exact(realize_demand(c, seed), c); },
      py::arg("config"), py::arg("seed"));

  m.def("expected_improvement", py::overload_cast<double, double, double>(&expected_improvement), py::arg("mean"),
        py::arg("std"), py::arg("best"));
  m.def(
      "bo_maximize",
      [](const std::function<double(const std::vector<long>&)>& f, const std::vector<std::pair<long, long>>& ranges,
         int budget, std::uint64_t seed) {
        SearchSpace space;
        for (std::size_t d = 0; d < ranges.size(); ++d) {
          space.dims.push_back(Dimension::integer("x" + std::to_string(d), ranges[d].first, ranges[d].second));
        }
        const BoResult r = bo_optimize(f, space, budget, seed);
        return py::make_tuple(r.best.params, r.best.last_score(), r.history.size());
      },
      py::arg("objective"), py::arg("ranges"), py::arg("budget"), py::arg("seed") = 0,
      "Maximizes an integer-lattice objective; returns (best point, best value, evaluations).");
  m.def(
      "tune_sq",
      [](const ScenarioConfig& c, int budget, int eval_episodes, std::uint64_t seed) {
        SqTuneOptions opt;
        opt.budget = budget;
        opt.eval_episodes = eval_episodes;
        opt.seed = seed;
        const SqTuneResult r = [&] {
          py::gil_scoped_release release;
          return tune_sq(c, opt);
        }();
        py::dict out;
        out["s"] = to_rows(r.params.s);
        out["Q"] = to_rows(r.params.q);
        out["objective"] = r.search.best.last_score();
        return out;
      },
      py::arg("config"), py::arg("budget") = 200, py::arg("eval_episodes") = 30, py::arg("seed") = 1);

  py::class_<ActorCritic>(m, "Model")
      .def("act", [](const ActorCritic& ac, const std::vector<double>& obs) { return ActorCriticPolicy(ac).act(obs); },
           "Greedy raw action for an observation (pass to Env.step).")
      .def(
          "evaluate",
          [](const ActorCritic& ac, const ScenarioConfig& c, int n, std::uint64_t seed_base) {
            return eval_dict(evaluate_policy(c, ActorCriticPolicy(ac), n, seed_base));
          },
          py::arg("config"), py::arg("episodes") = 200, py::arg("seed_base") = 1000)
      .def_property_readonly("num_params", &ActorCritic::num_params);

  m.def(
      "train",
      [](const std::string& algo, const ScenarioConfig& c, const py::object& cfg, std::uint64_t seed) {
        const TrainConfig tc = cfg.is_none() ? TrainConfig{} : train_config_from_json(py_to_json(cfg));
        TrainResult r = [&] {
          py::gil_scoped_release release;
          return train(parse_algo(algo), tc, c, seed);
        }();
        py::list curve;
        for (const auto& p : r.curve) curve.append(py::make_tuple(p.episode, p.mean, p.std));
        return py::make_tuple(std::move(r.model), curve);
      },
      py::arg("algo"), py::arg("config"), py::arg("train_config") = py::none(), py::arg("seed") = 0,
      "Returns (model, curve) where curve is a list of (episode, eval mean, eval std).");
  m.def(
      "save_checkpoint",
      [](const std::filesystem::path& path, const std::string& algo, const ScenarioConfig& c, const ActorCritic& model,
         const py::object& cfg, std::uint64_t seed) {
        const TrainConfig tc = cfg.is_none() ? TrainConfig{} : train_config_from_json(py_to_json(cfg));
        save_checkpoint({parse_algo(algo), tc, c, seed, model}, path);
      },
      py::arg("path"), py::arg("algo"), py::arg("config"), py::arg("model"), py::arg("train_config") = py::none(),
      py::arg("seed") = 0);
  m.def("load_model", [](const std::filesystem::path& path) { return load_checkpoint(path).model; });

  m.def("benchmark_methods", &benchmark_methods);
  m.def(
      "run_benchmark",
      [](const std::vector<std::string>& scenarios, const std::vector<std::string>& methods, int n,
         std::uint64_t seed_base, const std::filesystem::path& artifacts, int workers) {
        BenchOptions opt;
        opt.scenarios = scenarios;
        opt.methods = methods;
        opt.n_episodes = n;
        opt.seed_base = seed_base;
        opt.artifact_dir = artifacts;
        opt.workers = workers;
        std::vector<ResultRecord> recs;
        {
          py::gil_scoped_release release;
          recs = run_benchmark(opt);
        }
        py::list out;
        for (const auto& r : recs) out.append(record_dict(r));
        return out;
      },
      py::arg("scenarios"), py::arg("methods"), py::arg("episodes") = 200, py::arg("seed_base") = 1000,
      py::arg("artifact_dir") = ".", py::arg("workers") = 1);
  m.def(
      "export_results",
      [](const py::list& records, const std::filesystem::path& path, const std::string& format) {
        std::vector<ResultRecord> recs;
        for (const auto& r : records) recs.push_back(record_from(r.cast<py::dict>()));
        export_results(recs, path, format.empty() ? result_format_for(path) : parse_result_format(format));
      },
      py::arg("records"), py::arg("path"), py::arg("format") = "");
  m.def(
      "import_results",
      [](const std::filesystem::path& path, const std::string& format) {
        py::list out;
        for (const auto& r : import_results(path, format.empty() ? result_format_for(path) : parse_result_format(format))) {
          out.append(record_dict(r));
        }
        return out;
      },
      py::arg("path"), py::arg("format") = "");
}
