#include "scim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace scim {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("Mlp layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l] * sizes_[l + 1] + sizes_[l + 1]);
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

void Mlp::init(Rng& rng, double output_gain) {
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double scale = (l + 1 == layers ? output_gain : 1.0) / std::sqrt(static_cast<double>(in));
    double* w = params_.data() + offsets_[l];
    for (int k = 0; k < in * out; ++k) w[k] = scale * rng.normal();
    for (int k = 0; k < out; ++k) w[in * out + k] = 0.0;
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Tape* tape) const {
  if (input.rows() != input_size()) {
    throw std::invalid_argument("Mlp::forward: expected input of size " + std::to_string(input_size()) +
                                ", got " + std::to_string(input.rows()));
  }
  const std::size_t layers = sizes_.size() - 1;
  if (tape) {
    tape->layers.clear();
    tape->layers.push_back(input);
  }
  Eigen::MatrixXd h = input;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + offsets_[l] + in * out, out);
    Eigen::MatrixXd z = (w * h).colwise() + b;
    if (l + 1 < layers) z = z.array().tanh().matrix();
    h = std::move(z);
    if (tape) tape->layers.push_back(h);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_output, Eigen::VectorXd& grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd g = grad_output;  // dL/d(pre-activation) once the activation is undone
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    if (l + 1 < layers) {
      // tanh' = 1 - tanh^2, using the stored activation.
      g = (g.array() * (1.0 - tape.layers[l + 1].array().square())).matrix();
    }
    Eigen::Map<const Eigen::MatrixXd> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + in * out, out);
    gw.noalias() += g * tape.layers[l].transpose();
    gb += g.rowwise().sum();
    g = w.transpose() * g;
  }
  return g;
}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (kind_ == Kind::Sgd) {
    if (momentum_ > 0.0) {
      if (m_.size() != params.size()) m_ = Eigen::VectorXd::Zero(params.size());
      m_ = momentum_ * m_ + grad;
      params -= lr_ * m_;
    } else {
      params -= lr_ * grad;
    }
    return;
  }
  if (m_.size() != params.size()) {
    m_ = Eigen::VectorXd::Zero(params.size());
    v_ = Eigen::VectorXd::Zero(params.size());
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

double clip_grad_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace scim
