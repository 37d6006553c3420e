#include "scim/bench.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scim/agents.hpp"
#include "scim/error.hpp"
#include "scim/oracle.hpp"
#include "scim/scenarios.hpp"

namespace scim {

SearchSpace sq_search_space(const ScenarioConfig& config) {
  const ActionBounds bounds = action_bounds(config);
  SearchSpace space;
  for (int i = 0; i < config.num_products; ++i) {
    for (int j = 0; j < config.num_nodes(); ++j) {
      const std::string suffix = "_" + std::to_string(i) + "_" + std::to_string(j);
      space.dims.push_back(Dimension::integer("s" + suffix, 0, config.storage_capacity(i, j)));
      space.dims.push_back(Dimension::integer("Q" + suffix, 0, bounds(i, j).upper));
    }
  }
  return space;
}

SQParams sq_params_from_point(const ScenarioConfig& config, const Point& point) {
  const int nodes = config.num_nodes();
  if (point.size() != static_cast<std::size_t>(2 * config.num_products * nodes)) {
    throw ContractError("sq_params_from_point: point has the wrong number of coordinates");
  }
  SQParams p{Table<int>(config.num_products, nodes), Table<int>(config.num_products, nodes)};
  std::size_t k = 0;
  for (int i = 0; i < config.num_products; ++i) {
    for (int j = 0; j < nodes; ++j) {
      p.s(i, j) = static_cast<int>(point[k++]);
      p.q(i, j) = static_cast<int>(point[k++]);
    }
  }
  return p;
}

SqTuneResult tune_sq(const ScenarioConfig& config, const SqTuneOptions& options) {
  const SearchSpace space = sq_search_space(config);
  const Objective objective = [&](const Point& x) {
    const SQPolicy policy(config, sq_params_from_point(config, x));
    return evaluate_policy(config, policy, options.eval_episodes, options.seed_base).mean;
  };
  SqTuneResult out;
  out.search = bo_optimize(objective, space, options.budget, options.seed, options.bo);
  out.params = sq_params_from_point(config, out.search.best.params);
  return out;
}

void save_sq_params(const SQParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << sq_params_to_json(params).dump(2) << '\n';
}

SQParams load_sq_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return sq_params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("sq_params", "malformed (s,Q) file " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& benchmark_methods() {
  static const std::vector<std::string> methods{"a3c-slot", "ppo", "vpg", "bo-sq", "oracle", "random", "zero"};
  return methods;
}

namespace {

std::string artifact_stem(const std::string& scenario) {
  if (is_builtin_scenario(scenario)) return scenario;
  return std::filesystem::path(scenario).stem().string();
}

}  // namespace

std::filesystem::path required_artifact(const BenchOptions& options, const std::string& scenario,
                                        const std::string& method) {
  const std::string stem = artifact_stem(scenario);
  if (method == "bo-sq") return options.artifact_dir / (stem + ".sq.json");
  if (method == "ppo" || method == "vpg" || method == "a3c-slot") {
    return options.artifact_dir / (stem + "." + method + ".ckpt.json");
  }
  return {};
}

std::vector<ResultRecord> run_benchmark(const BenchOptions& options) {
  if (options.scenarios.empty()) throw ConfigError("scenarios", "no scenarios selected");
  if (options.methods.empty()) throw ConfigError("methods", "no methods selected");
  if (options.n_episodes < 1) throw ConfigError("episodes", "episodes must be >= 1");
  const auto& known = benchmark_methods();
  for (const auto& m : options.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError("methods", "unknown method '" + m + "' (available: " + list + ")");
    }
  }

  std::vector<ScenarioConfig> configs;
  std::string missing;
  for (const auto& name : options.scenarios) {
    configs.push_back(load_scenario(name));
    for (const auto& m : options.methods) {
      const auto path = required_artifact(options, name, m);
      if (!path.empty() && !std::filesystem::exists(path)) missing += "\n  " + path.string();
    }
  }
  if (!missing.empty()) throw ConfigError("artifacts", "missing artifacts required by the benchmark:" + missing);

  std::vector<ResultRecord> records;
  for (std::size_t s = 0; s < configs.size(); ++s) {
    const ScenarioConfig& config = configs[s];
    const std::string& name = options.scenarios[s];
    auto [scenario_label, experiment_label] =
        is_builtin_scenario(name) ? scenario_labels(name) : std::pair<std::string, std::string>{config.name, ""};
    for (const auto& m : options.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      EvalResult r;
      if (m == "oracle") {
        r = oracle_evaluate(config, options.n_episodes, options.seed_base, options.workers);
      } else if (m == "zero") {
        r = evaluate_policy(config, ZeroPolicy(action_size(config)), options.n_episodes, options.seed_base,
                            options.workers);
      } else if (m == "random") {
        r = evaluate_policy(config, RandomPolicy(action_bounds(config)), options.n_episodes, options.seed_base,
                            options.workers);
      } else if (m == "bo-sq") {
        const SQParams params = load_sq_params(required_artifact(options, name, m));
        params.validate(config);
        r = evaluate_policy(config, SQPolicy(config, params), options.n_episodes, options.seed_base,
                            options.workers);
      } else {
        const auto path = required_artifact(options, name, m);
        Checkpoint ckpt = load_checkpoint(path);
        if (ckpt.model.obs_scale.size() != static_cast<Eigen::Index>(observation_size(config)) ||
            ckpt.model.policy.output_size() != static_cast<int>(action_size(config))) {
          throw ConfigError("artifacts", path.string() + " was trained for a different scenario shape");
        }
        r = evaluate_policy(config, ActorCriticPolicy(std::move(ckpt.model)), options.n_episodes,
                            options.seed_base, options.workers);
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      records.push_back({scenario_label, experiment_label, m, r.mean, r.std, options.n_episodes, options.seed_base,
                         options.record_time ? secs : 0.0});
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Export / import

ResultFormat parse_result_format(const std::string& name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw ConfigError("format", "unknown result format '" + name + "' (expected csv or json)");
}

ResultFormat result_format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ResultFormat::Json : ResultFormat::Csv;
}

namespace {

constexpr const char* kCsvHeader = "scenario,experiment,method,mean,std,n,seed,time";

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        fields.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ConfigError("line " + std::to_string(line_no), "unterminated quote");
  return fields;
}

template <typename T>
T parse_number(const std::string& s, const std::string& where) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(where, "not a number: '" + s + "'");
  }
  return value;
}

}  // namespace

std::string results_to_csv(const std::vector<ResultRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.scenario) + ',' + csv_field(r.experiment) + ',' + csv_field(r.method) + ',' +
           fmt_double(r.mean) + ',' + fmt_double(r.std) + ',' + std::to_string(r.n_episodes) + ',' +
           std::to_string(r.seed_base) + ',' + fmt_double(r.wall_time) + '\n';
  }
  return out;
}

std::vector<ResultRecord> results_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("header", std::string("results CSV must start with '") + kCsvHeader + "'");
  }
  std::vector<ResultRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    const std::string where = "line " + std::to_string(line_no);
    if (f.size() != 8) throw ConfigError(where, "expected 8 fields, found " + std::to_string(f.size()));
    ResultRecord r;
    r.scenario = f[0];
    r.experiment = f[1];
    r.method = f[2];
    r.mean = parse_number<double>(f[3], where + " mean");
    r.std = parse_number<double>(f[4], where + " std");
    r.n_episodes = parse_number<int>(f[5], where + " n");
    r.seed_base = parse_number<std::uint64_t>(f[6], where + " seed");
    r.wall_time = parse_number<double>(f[7], where + " time");
    out.push_back(std::move(r));
  }
  return out;
}

std::string results_to_json(const std::vector<ResultRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["scenario"] = r.scenario;
    o["experiment"] = r.experiment;
    o["method"] = r.method;
    o["mean"] = r.mean;
    o["std"] = r.std;
    o["n"] = r.n_episodes;
    o["seed"] = r.seed_base;
    o["time"] = r.wall_time;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRecord> results_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("results", std::string("malformed results JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ConfigError("results", "results JSON must be an array");
  std::vector<ResultRecord> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& o = arr[k];
    try {
      ResultRecord r;
      r.scenario = o.at("scenario").get<std::string>();
      r.experiment = o.at("experiment").get<std::string>();
      r.method = o.at("method").get<std::string>();
      r.mean = o.at("mean").get<double>();
      r.std = o.at("std").get<double>();
      r.n_episodes = o.at("n").get<int>();
      r.seed_base = o.at("seed").get<std::uint64_t>();
      r.wall_time = o.at("time").get<double>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("results[" + std::to_string(k) + "]", e.what());
    }
  }
  return out;
}

void export_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path,
                    ResultFormat format) {
  if (records.empty()) throw ContractError("export_results: no records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (format == ResultFormat::Csv ? results_to_csv(records) : results_to_json(records));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRecord> import_results(const std::filesystem::path& path, ResultFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return format == ResultFormat::Csv ? results_from_csv(ss.str()) : results_from_json(ss.str());
}

}  // namespace scim
