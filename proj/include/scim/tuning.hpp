#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scim/rng.hpp"

namespace scim {

/// Integer range [lo, hi], or a categorical set of `labels` addressed by index.
struct Dimension {
  std::string name;
  long lo = 0;
  long hi = 0;
  std::vector<std::string> labels;  // non-empty for categorical dimensions

  static Dimension integer(std::string name, long lo, long hi) { return {std::move(name), lo, hi, {}}; }
  static Dimension categorical(std::string name, std::vector<std::string> labels) {
    const long n = static_cast<long>(labels.size());
    return {std::move(name), 0, n - 1, std::move(labels)};
  }
  bool is_categorical() const { return !labels.empty(); }
  long cardinality() const { return hi - lo + 1; }
};

/// A point holds one integer per dimension (the value, or the category index).
using Point = std::vector<long>;

struct SearchSpace {
  std::vector<Dimension> dims;

  /// Throws std::invalid_argument when empty or any range is empty.
  void validate() const;
  bool contains(const Point& p) const;
  Point sample(Rng& rng) const;
  /// Min-max normalized coordinates in [0, 1].
  Eigen::VectorXd normalize(const Point& p) const;
  /// Every point of the grid, in lexicographic order (last dimension fastest).
  std::vector<Point> enumerate() const;
  double size() const;
};

enum class TrialStatus { Running, Paused, Stopped, Complete };
const char* to_string(TrialStatus s);

struct TrialRecord {
  int id = 0;
  Point params;
  std::vector<std::pair<double, double>> scores;  // (budget, objective), budgets increasing
  TrialStatus status = TrialStatus::Running;

  void record(double budget, double score);
  double last_score() const { return scores.empty() ? -std::numeric_limits<double>::infinity() : scores.back().second; }
  double last_budget() const { return scores.empty() ? 0.0 : scores.back().first; }
};

/// Gaussian-process regression with an (ARD) RBF kernel on normalized inputs. Targets are
/// standardized internally; kernel hyperparameters are fit by coordinate search on the
/// log marginal likelihood.
class GaussianProcess {
 public:
  struct Hyper {
    double length_scale = 0.3;
    /// Per-dimension length scales; when empty every dimension uses `length_scale`.
    std::vector<double> length_scales;
    double signal_var = 1.0;
    double noise_var = 1e-2;
  };

  void fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y, bool optimize_hyper = true);

  struct Prediction {
    double mean;
    double variance;
  };
  Prediction predict(const Eigen::VectorXd& x) const;

  double log_marginal_likelihood(const Hyper& h) const;
  const Hyper& hyper() const noexcept { return hyper_; }
  void set_hyper(const Hyper& h) { hyper_ = h; }
  /// Observation noise standard deviation in the original target units.
  double noise_std() const;
  std::size_t num_observations() const noexcept { return x_.size(); }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Hyper& h) const;
  void refactor();

  std::vector<Eigen::VectorXd> x_;
  Eigen::VectorXd y_;  // standardized
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Hyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

/// Expected improvement for maximization; 0 when the posterior is degenerate and mean <= best.
double expected_improvement(double mean, double stddev, double best_so_far);
double expected_improvement(const GaussianProcess& gp, const Eigen::VectorXd& x, double best_so_far);

using Objective = std::function<double(const Point&)>;

struct BoOptions {
  double initial_fraction = 0.2;
  int candidates = 1024;
  bool optimize_hyper = true;
};

struct BoResult {
  TrialRecord best;
  std::vector<TrialRecord> history;
};

/// Bayesian optimization over an integer lattice. Deterministic for a fixed seed.
BoResult bo_optimize(const Objective& objective, const SearchSpace& space, int budget, std::uint64_t seed,
                     const BoOptions& options = {});

/// Evaluates every grid point once; result sorted by score, ties in enumeration order.
std::vector<TrialRecord> grid_search(const SearchSpace& space, const Objective& objective, int parallelism = 1);

/// A resumable training run; `advance_to` continues it up to the given budget and returns
/// the score there.
class Trial {
 public:
  virtual ~Trial() = default;
  virtual double advance_to(double budget) = 0;
};

using TrialFactory = std::function<std::unique_ptr<Trial>(const Point& params, int trial_id)>;

struct AshaOptions {
  std::vector<double> rungs;  // strictly increasing budgets
  int eta = 3;
  int max_trials = 9;
  int workers = 1;
  std::uint64_t seed = 0;
  /// Points to try, in order; sampled from the space when empty or exhausted.
  std::vector<Point> points;
  /// Optional CSV log, one row per (trial, rung).
  std::optional<std::filesystem::path> log_path;
};

struct AshaResult {
  TrialRecord best;
  std::vector<TrialRecord> trials;
  std::vector<int> arrivals;    // results recorded per rung
  std::vector<int> promotions;  // trials promoted out of each rung
};

/// Asynchronous successive halving over a simulated pool of workers (job duration is the
/// budget increment). Rung k offers floor(n_k / eta) promotion slots while results can
/// still arrive there and ceil(n_k / eta) once it is final, n_k being the results recorded
/// so far. A trial is promoted only when it ranks within the top `slots` and fewer than
/// `slots` trials have left the rung. Paused trials become Stopped at the end and never
/// resume.
AshaResult asha_run(const TrialFactory& factory, const SearchSpace& space, const AshaOptions& options);

}  // namespace scim
