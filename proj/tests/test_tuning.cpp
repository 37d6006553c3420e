#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "scim/tuning.hpp"

using namespace scim;

TEST_CASE("search space basics") {
  SearchSpace s;
  CHECK_THROWS(s.validate());
  s.dims = {Dimension::integer("x", 0, 2), Dimension::categorical("c", {"a", "b"})};
  CHECK(s.size() == 6);
  const auto all = s.enumerate();
  REQUIRE(all.size() == 6);
  CHECK(all[0] == Point{0, 0});
  CHECK(all[1] == Point{0, 1});
  CHECK(all[5] == Point{2, 1});
  CHECK(s.contains({2, 1}));
  CHECK_FALSE(s.contains({3, 0}));
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(s.contains(s.sample(rng)));
  s.dims.push_back(Dimension::integer("bad", 3, 2));
  CHECK_THROWS(s.validate());
}

TEST_CASE("trial budgets must increase") {
  TrialRecord r;
  r.record(1, 0.5);
  r.record(3, 0.7);
  CHECK_THROWS(r.record(3, 0.9));
  CHECK_THROWS(r.record(2, 0.9));
  CHECK(r.last_score() == 0.7);
}

TEST_CASE("expected improvement closed form") {
  CHECK(expected_improvement(1.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(0.5, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
  // (mu - best) Phi(z) + sigma phi(z) with mu - best = 1, sigma = 2, z = 0.5
  const double phi = std::exp(-0.125) / std::sqrt(2 * M_PI);
  const double Phi = 0.5 * std::erfc(-0.5 / std::sqrt(2.0));
  CHECK(expected_improvement(3.0, 2.0, 2.0) == doctest::Approx(Phi + 2 * phi).epsilon(1e-12));
  Rng rng(7);
  for (int k = 0; k < 1000; ++k) {
    CHECK(expected_improvement(rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-5, 5)) >= 0.0);
  }
}

TEST_CASE("GP posterior properties") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = static_cast<int>(rng.uniform_int(1, 4));
    const int n = static_cast<int>(rng.uniform_int(2, 25));
    std::vector<Eigen::VectorXd> x;
    std::vector<double> y;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd p(dim);
      for (int d = 0; d < dim; ++d) p[d] = rng.uniform();
      x.push_back(p);
      y.push_back(std::sin(3 * p.sum()) * 10 + rng.normal() * 0.1);
    }
    GaussianProcess gp;
    gp.fit(x, y);
    for (int k = 0; k < n; ++k) {
      const auto pr = gp.predict(x[static_cast<std::size_t>(k)]);
      CHECK(pr.variance >= 0.0);
      CHECK(std::abs(pr.mean - y[static_cast<std::size_t>(k)]) <= 3 * gp.noise_std() + 1e-9);
    }
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd q(dim);
      for (int d = 0; d < dim; ++d) q[d] = rng.uniform();
      CHECK(gp.predict(q).variance >= 0.0);
      CHECK(expected_improvement(gp, q, 0.0) >= 0.0);
    }
  }
}

TEST_CASE("bo_optimize finds the maximum of a 1-D parabola") {
  SearchSpace s;
  s.dims = {Dimension::integer("x", 0, 10)};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = bo_optimize([](const Point& p) { return -std::pow(p[0] - 3.0, 2); }, s, 30, seed);
    CHECK(r.best.params == Point{3});
    double best = -1e300;
    for (const auto& h : r.history) {
      CHECK(s.contains(h.params));
      best = std::max(best, h.last_score());
    }
    CHECK(r.best.last_score() == best);
  }
}

TEST_CASE("bo_optimize on a constant objective and reproducibility") {
  SearchSpace s;
  s.dims = {Dimension::integer("a", 0, 20), Dimension::integer("b", -5, 5)};
  const auto r = bo_optimize([](const Point&) { return 4.25; }, s, 25, 9);
  CHECK(r.best.last_score() == 4.25);
  CHECK(s.contains(r.best.params));
  auto f = [](const Point& p) { return -std::abs(p[0] - 7.0) - std::abs(p[1] + 2.0); };
  const auto a = bo_optimize(f, s, 40, 5), b = bo_optimize(f, s, 40, 5);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) CHECK(a.history[k].params == b.history[k].params);
  SearchSpace empty;
  CHECK_THROWS(bo_optimize(f, empty, 10, 1));
}

TEST_CASE("grid search") {
  SearchSpace s;
  s.dims = {Dimension::integer("a", 0, 1), Dimension::integer("b", 0, 1)};
  const auto r = grid_search(s, [](const Point& p) { return double(p[0]); }, 2);
  REQUIRE(r.size() == 4);
  for (const auto& t : r) CHECK(t.status == TrialStatus::Complete);
  CHECK(r[0].params == Point{1, 0});  // ties keep enumeration order
  CHECK(r[1].params == Point{1, 1});
  CHECK(r[2].params == Point{0, 0});
  const auto again = grid_search(s, [](const Point& p) { return double(p[0]); }, 1);
  for (std::size_t k = 0; k < r.size(); ++k) CHECK(again[k].params == r[k].params);

  SearchSpace vpg;
  vpg.dims = {Dimension::categorical("hidden", {"64x64", "128x128"}),
              Dimension::categorical("lr", {"4e-4", "4e-3"}),
              Dimension::categorical("fragment", {"10", "100"}),
              Dimension::categorical("batch", {"200", "2000"})};
  CHECK(vpg.enumerate().size() == 16);
}

namespace {

/// Score depends on the trial's quality and grows with budget; the ranking is budget-invariant.
struct RankStableTrial final : Trial {
  double quality;
  std::vector<double>* seen;
  double advance_to(double budget) override {
    seen->push_back(budget);
    return quality * std::log1p(budget) + budget * 1e-3;
  }
};

AshaResult run_rank_stable(const SearchSpace& space, AshaOptions opt, std::vector<double>& qualities) {
  static std::vector<double> sink;
  const TrialFactory factory = [&](const Point& p, int) {
    auto t = std::make_unique<RankStableTrial>();
    t->quality = static_cast<double>(p[0]) + 0.001 * static_cast<double>(p[1]);
    t->seen = &sink;
    qualities.push_back(t->quality);
    return t;
  };
  return asha_run(factory, space, opt);
}

}  // namespace

TEST_CASE("ASHA synchronous 9 -> 3 -> 1") {
  SearchSpace s;
  s.dims = {Dimension::integer("q", 0, 100), Dimension::integer("r", 0, 100)};
  AshaOptions opt;
  opt.rungs = {1, 3, 9};
  opt.eta = 3;
  opt.max_trials = 9;
  opt.workers = 9;
  opt.seed = 4;
  std::vector<double> q;
  const auto r = run_rank_stable(s, opt, q);
  CHECK(r.arrivals == std::vector<int>{9, 3, 1});
  CHECK(r.promotions[0] == 3);
  CHECK(r.promotions[1] == 1);
  CHECK(r.best.last_budget() == 9);
}

TEST_CASE("ASHA single trial with eta 2 reaches the final rung") {
  SearchSpace s;
  s.dims = {Dimension::integer("q", 0, 10), Dimension::integer("r", 0, 0)};
  AshaOptions opt;
  opt.rungs = {1, 2, 4, 8};
  opt.eta = 2;
  opt.max_trials = 1;
  std::vector<double> q;
  const auto r = run_rank_stable(s, opt, q);
  CHECK(r.best.last_budget() == 8);
  CHECK(r.best.status == TrialStatus::Complete);
}

TEST_CASE("ASHA properties over random configurations") {
  Rng rng(2718);
  for (int k = 0; k < 200; ++k) {
    SearchSpace s;
    s.dims = {Dimension::integer("q", 0, 1000), Dimension::integer("r", 0, 1000)};
    AshaOptions opt;
    const int n_rungs = static_cast<int>(rng.uniform_int(2, 4));
    double b = static_cast<double>(rng.uniform_int(1, 3));
    for (int i = 0; i < n_rungs; ++i) {
      opt.rungs.push_back(b);
      b *= static_cast<double>(rng.uniform_int(2, 4));
    }
    opt.eta = static_cast<int>(rng.uniform_int(2, 4));
    opt.max_trials = static_cast<int>(rng.uniform_int(1, 40));
    opt.workers = static_cast<int>(rng.uniform_int(1, 8));
    opt.seed = rng.next_u64();
    std::vector<double> qualities;
    const auto r = run_rank_stable(s, opt, qualities);

    for (std::size_t i = 0; i + 1 < opt.rungs.size(); ++i) {
      CHECK(r.promotions[i] <= (r.arrivals[i] + opt.eta - 1) / opt.eta);
      CHECK(r.arrivals[i + 1] == r.promotions[i]);
    }
    const double best_quality = *std::max_element(qualities.begin(), qualities.end());
    CHECK(r.best.last_budget() == opt.rungs.back());
    CHECK(static_cast<double>(r.best.params[0]) + 0.001 * static_cast<double>(r.best.params[1]) == best_quality);
    for (const auto& t : r.trials) {
      for (std::size_t i = 1; i < t.scores.size(); ++i) CHECK(t.scores[i].first > t.scores[i - 1].first);
      if (t.status == TrialStatus::Complete) CHECK(t.last_budget() == opt.rungs.back());
      if (t.status == TrialStatus::Stopped) CHECK(t.last_budget() < opt.rungs.back());
      CHECK(t.status != TrialStatus::Running);
      CHECK(t.status != TrialStatus::Paused);
    }
  }
}

TEST_CASE("ASHA writes one log row per (trial, rung)") {
  SearchSpace s;
  s.dims = {Dimension::integer("q", 0, 100), Dimension::integer("r", 0, 100)};
  AshaOptions opt;
  opt.rungs = {1, 3, 9};
  opt.max_trials = 9;
  opt.workers = 3;
  const auto path = std::filesystem::temp_directory_path() / "scim_asha_log_test.csv";
  std::filesystem::remove(path);
  opt.log_path = path;
  std::vector<double> q;
  const auto r = run_rank_stable(s, opt, q);
  std::ifstream in(path);
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.arrivals[0] + r.arrivals[1] + r.arrivals[2]);
  std::filesystem::remove(path);
}
