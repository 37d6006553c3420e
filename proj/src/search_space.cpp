#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scim/tuning.hpp"

namespace scim {

void SearchSpace::validate() const {
  if (dims.empty()) throw std::invalid_argument("search space has no dimensions");
  for (const auto& d : dims) {
    if (d.hi < d.lo) throw std::invalid_argument("search space dimension '" + d.name + "' is empty");
  }
}

bool SearchSpace::contains(const Point& p) const {
  if (p.size() != dims.size()) return false;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (p[k] < dims[k].lo || p[k] > dims[k].hi) return false;
  }
  return true;
}

Point SearchSpace::sample(Rng& rng) const {
  Point p(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) p[k] = rng.uniform_int(dims[k].lo, dims[k].hi);
  return p;
}

Eigen::VectorXd SearchSpace::normalize(const Point& p) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const double width = static_cast<double>(dims[k].hi - dims[k].lo);
    x[static_cast<Eigen::Index>(k)] = width > 0 ? static_cast<double>(p[k] - dims[k].lo) / width : 0.0;
  }
  return x;
}

double SearchSpace::size() const {
  double n = 1.0;
  for (const auto& d : dims) n *= static_cast<double>(d.cardinality());
  return n;
}

std::vector<Point> SearchSpace::enumerate() const {
  validate();
  std::vector<Point> out;
  Point p(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) p[k] = dims[k].lo;
  while (true) {
    out.push_back(p);
    std::size_t k = dims.size();
    while (k > 0) {
      --k;
      if (p[k] < dims[k].hi) {
        ++p[k];
        break;
      }
      p[k] = dims[k].lo;
      if (k == 0) return out;
    }
  }
}

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Running: return "running";
    case TrialStatus::Paused: return "paused";
    case TrialStatus::Stopped: return "stopped";
    case TrialStatus::Complete: return "complete";
  }
  return "unknown";
}

void TrialRecord::record(double budget, double score) {
  if (!scores.empty() && budget <= scores.back().first) {
    throw std::logic_error("trial budgets must be strictly increasing");
  }
  scores.emplace_back(budget, score);
}

}  // namespace scim
