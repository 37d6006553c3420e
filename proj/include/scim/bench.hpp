#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scim/config.hpp"
#include "scim/policies.hpp"
#include "scim/tuning.hpp"

namespace scim {

// ---------------------------------------------------------------------------
// (s,Q) tuning

/// One integer dimension per s[i][j] (0..capacity) and per Q[i][j] (0..action bound),
/// ordered product-major, node-minor, with s and Q interleaved: s_0_0, Q_0_0, s_0_1, ...
SearchSpace sq_search_space(const ScenarioConfig& config);
SQParams sq_params_from_point(const ScenarioConfig& config, const Point& point);

struct SqTuneOptions {
  int budget = 200;          // objective evaluations
  int eval_episodes = 30;    // episodes per objective evaluation
  std::uint64_t seed_base = 5000;
  std::uint64_t seed = 1;    // BO seed
  BoOptions bo;
};

struct SqTuneResult {
  SQParams params;
  BoResult search;
};

SqTuneResult tune_sq(const ScenarioConfig& config, const SqTuneOptions& options = {});

void save_sq_params(const SQParams& params, const std::filesystem::path& path);
SQParams load_sq_params(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Benchmarks

struct ResultRecord {
  std::string scenario;    // e.g. "1P1W"
  std::string experiment;  // e.g. "Exp2"
  std::string method;
  double mean = 0.0;
  double std = 0.0;
  int n_episodes = 0;
  std::uint64_t seed_base = 0;
  double wall_time = 0.0;  // seconds; 0 unless timing was requested

  bool operator==(const ResultRecord&) const = default;
};

/// Methods understood by run_benchmark, in table order.
const std::vector<std::string>& benchmark_methods();

struct BenchOptions {
  std::vector<std::string> scenarios;  // built-in names or scenario file paths
  std::vector<std::string> methods;
  int n_episodes = 200;
  std::uint64_t seed_base = 1000;
  int workers = 1;
  /// Where trained artifacts live: <name>.sq.json for bo-sq and
  /// <name>.<method>.ckpt.json for ppo, vpg and a3c-slot.
  std::filesystem::path artifact_dir = ".";
  bool record_time = false;
};

/// Path of the artifact a method needs for a scenario, or empty when it needs none.
std::filesystem::path required_artifact(const BenchOptions& options, const std::string& scenario,
                                        const std::string& method);

/// One record per (scenario, method), scenarios outer. Every method consumes the same
/// episode seeds. Throws ConfigError naming every missing artifact before running anything.
std::vector<ResultRecord> run_benchmark(const BenchOptions& options);

enum class ResultFormat { Csv, Json };
ResultFormat parse_result_format(const std::string& name);
/// Format implied by a file extension (".json" -> Json, anything else -> Csv).
ResultFormat result_format_for(const std::filesystem::path& path);

std::string results_to_csv(const std::vector<ResultRecord>& records);
std::string results_to_json(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> results_from_csv(const std::string& text);
std::vector<ResultRecord> results_from_json(const std::string& text);

void export_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path,
                    ResultFormat format);
std::vector<ResultRecord> import_results(const std::filesystem::path& path, ResultFormat format);

}  // namespace scim
