#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "scim/tuning.hpp"

namespace scim {

BoResult bo_optimize(const Objective& objective, const SearchSpace& space, int budget, std::uint64_t seed,
                     const BoOptions& options) {
  space.validate();
  const int initial = std::max(1, static_cast<int>(std::lround(options.initial_fraction * budget)));
  if (budget < initial) throw std::invalid_argument("bo_optimize: budget smaller than the initial design");

  Rng rng(seed);
  std::set<Point> seen;
  BoResult result;
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
  const bool small_space = space.size() <= 2e5;

  auto evaluate = [&](const Point& p) {
    TrialRecord t;
    t.id = static_cast<int>(result.history.size());
    t.params = p;
    t.record(1.0, objective(p));
    t.status = TrialStatus::Complete;
    seen.insert(p);
    xs.push_back(space.normalize(p));
    ys.push_back(t.last_score());
    if (result.history.empty() || t.last_score() > result.best.last_score()) result.best = t;
    result.history.push_back(std::move(t));
  };
  auto random_unseen = [&]() -> std::optional<Point> {
    for (int attempt = 0; attempt < 256; ++attempt) {
      auto p = space.sample(rng);
      if (!seen.contains(p)) return p;
    }
    if (small_space) {
      for (auto& p : space.enumerate()) {
        if (!seen.contains(p)) return p;
      }
    }
    return std::nullopt;
  };

  for (int k = 0; k < initial; ++k) {
    auto p = random_unseen();
    if (!p) return result;
    evaluate(*p);
  }

  GaussianProcess gp;
  while (static_cast<int>(result.history.size()) < budget) {
    gp.fit(xs, ys, options.optimize_hyper);
    const double incumbent = result.best.last_score();

    // Random lattice candidates plus lattice points around the incumbent.
    std::vector<Point> candidates;
    candidates.reserve(static_cast<std::size_t>(options.candidates) + 4 * space.dims.size());
    for (int c = 0; c < options.candidates; ++c) candidates.push_back(space.sample(rng));
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
      for (long delta : {-2L, -1L, 1L, 2L}) {
        auto p = result.best.params;
        p[d] += delta;
        if (space.contains(p)) candidates.push_back(std::move(p));
      }
    }
    for (int c = 0; c < options.candidates / 4; ++c) {
      auto p = result.best.params;
      for (std::size_t d = 0; d < space.dims.size(); ++d) p[d] += rng.uniform_int(-1, 1);
      if (space.contains(p)) candidates.push_back(std::move(p));
    }

    std::optional<Point> choice;
    double best_ei = -1.0;
    for (const auto& p : candidates) {
      if (seen.contains(p)) continue;
      const double ei = expected_improvement(gp, space.normalize(p), incumbent);
      if (ei > best_ei) {
        best_ei = ei;
        choice = p;
      }
    }
    if (!choice) choice = random_unseen();
    if (!choice) break;  // space exhausted
    evaluate(*choice);
  }
  return result;
}

std::vector<TrialRecord> grid_search(const SearchSpace& space, const Objective& objective, int parallelism) {
  const auto points = space.enumerate();
  std::vector<TrialRecord> trials(points.size());
  const int n = static_cast<int>(points.size());
  const int workers = std::clamp(parallelism, 1, std::max(n, 1));
  auto run_slice = [&](int w) {
    for (int k = w; k < n; k += workers) {
      auto& t = trials[static_cast<std::size_t>(k)];
      t.id = k;
      t.params = points[static_cast<std::size_t>(k)];
      t.record(1.0, objective(t.params));
      t.status = TrialStatus::Complete;
    }
  };
  if (workers == 1) {
    run_slice(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_slice, w);
  }
  std::stable_sort(trials.begin(), trials.end(),
                   [](const TrialRecord& a, const TrialRecord& b) { return a.last_score() > b.last_score(); });
  return trials;
}

}  // namespace scim
