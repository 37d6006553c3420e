#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scim/tuning.hpp"

namespace scim {
namespace {

constexpr double kJitter = 1e-9;

struct LogBox {
  double lo;
  double hi;
};
constexpr LogBox kLengthBox{-3.9, 1.6};   // ~[0.02, 5]
constexpr LogBox kSignalBox{-3.0, 3.0};   // ~[0.05, 20]
constexpr LogBox kNoiseBox{-13.8, 0.0};   // ~[1e-6, 1]

}  // namespace

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Hyper& h) const {
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double ell = h.length_scales.size() > static_cast<std::size_t>(d) ? h.length_scales[static_cast<std::size_t>(d)]
                                                                            : h.length_scale;
    const double u = (a[d] - b[d]) / ell;
    r2 += u * u;
  }
  return h.signal_var * std::exp(-0.5 * r2);
}

double GaussianProcess::log_marginal_likelihood(const Hyper& h) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) k(r, c) = k(c, r) = kernel(x_[r], x_[c], h);
    k(r, r) += h.noise_var + kJitter;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(y_);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * y_.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

void GaussianProcess::refactor() {
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) k(r, c) = k(c, r) = kernel(x_[r], x_[c], hyper_);
    k(r, r) += hyper_.noise_var + kJitter;
  }
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) throw std::runtime_error("GP kernel matrix is not positive definite");
  alpha_ = chol_.solve(y_);
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y, bool optimize_hyper) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("GP fit needs matching, non-empty data");
  x_ = x;
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::VectorXd raw = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  y_mean_ = raw.mean();
  const double var = (raw.array() - y_mean_).square().mean();
  y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  y_ = (raw.array() - y_mean_) / y_scale_;

  if (optimize_hyper && n >= 2) {
    // Coordinate search over log hyperparameters: one length scale per input
    // dimension, then signal and noise variance.
    const std::size_t dims = static_cast<std::size_t>(x_.front().size());
    if (hyper_.length_scales.size() != dims) hyper_.length_scales.assign(dims, hyper_.length_scale);
    std::vector<double> theta;
    std::vector<LogBox> box;
    for (double ell : hyper_.length_scales) {
      theta.push_back(std::log(ell));
      box.push_back(kLengthBox);
    }
    theta.push_back(std::log(hyper_.signal_var));
    box.push_back(kSignalBox);
    theta.push_back(std::log(hyper_.noise_var));
    box.push_back(kNoiseBox);
    auto unpack = [&](const std::vector<double>& t) {
      Hyper h;
      for (std::size_t d = 0; d < dims; ++d) h.length_scales.push_back(std::exp(t[d]));
      h.length_scale = h.length_scales.empty() ? hyper_.length_scale : h.length_scales.front();
      h.signal_var = std::exp(t[dims]);
      h.noise_var = std::exp(t[dims + 1]);
      return h;
    };
    for (std::size_t d = 0; d < theta.size(); ++d) theta[d] = std::clamp(theta[d], box[d].lo, box[d].hi);
    double best = log_marginal_likelihood(unpack(theta));
    double step = 1.0;
    for (int iter = 0; iter < 60 && step > 0.05; ++iter) {
      bool improved = false;
      for (std::size_t d = 0; d < theta.size(); ++d) {
        for (double dir : {1.0, -1.0}) {
          auto trial = theta;
          trial[d] = std::clamp(theta[d] + dir * step, box[d].lo, box[d].hi);
          if (trial[d] == theta[d]) continue;
          const double v = log_marginal_likelihood(unpack(trial));
          if (v > best) {
            best = v;
            theta = trial;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    hyper_ = unpack(theta);
  }
  refactor();
}

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
  if (x_.empty()) throw std::logic_error("GP predict before fit");
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index r = 0; r < n; ++r) ks[r] = kernel(x, x_[r], hyper_);
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(0.0, hyper_.signal_var - v.squaredNorm());
  return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

double GaussianProcess::noise_std() const { return std::sqrt(hyper_.noise_var) * y_scale_; }

double expected_improvement(double mean, double stddev, double best_so_far) {
  const double gap = mean - best_so_far;
  if (!(stddev > 0.0)) return std::max(gap, 0.0);
  const double z = gap / stddev;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::max(0.0, gap * cdf + stddev * pdf);
}

double expected_improvement(const GaussianProcess& gp, const Eigen::VectorXd& x, double best_so_far) {
  const auto p = gp.predict(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), best_so_far);
}

}  // namespace scim
