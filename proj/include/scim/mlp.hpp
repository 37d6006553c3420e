#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scim/rng.hpp"

namespace scim {

/// Fully connected network with tanh hidden layers and a linear output layer.
///
/// All weights and biases live in one flat parameter vector (per layer: W column-major,
/// then b), so optimizers and gradient checks work on plain vectors. Inputs and outputs
/// are batched column-wise: an input matrix is (input_size x batch).
class Mlp {
 public:
  Mlp() = default;
  /// `sizes` = {input, hidden..., output}.
  explicit Mlp(std::vector<int> sizes);

  /// LeCun-normal hidden weights; output weights scaled by `output_gain`; zero biases.
  void init(Rng& rng, double output_gain = 1.0);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& params() noexcept { return params_; }
  const Eigen::VectorXd& params() const noexcept { return params_; }

  /// Post-activation outputs of every layer, input first.
  struct Tape {
    std::vector<Eigen::MatrixXd> layers;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Tape* tape = nullptr) const;

  /// Reverse pass. Adds dL/dparams into `grad` (sized num_params()) and returns dL/dinput.
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_output, Eigen::VectorXd& grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd params_;
};

/// Plain or momentum SGD, or Adam, over a flat parameter vector.
class Optimizer {
 public:
  enum class Kind { Sgd, Adam };

  Optimizer() = default;
  Optimizer(Kind kind, double learning_rate, double momentum = 0.0)
      : kind_(kind), lr_(learning_rate), momentum_(momentum) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  double learning_rate() const noexcept { return lr_; }

 private:
  Kind kind_ = Kind::Sgd;
  double lr_ = 1e-3;
  double momentum_ = 0.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

/// Rescales `grad` in place so its L2 norm is at most `max_norm` (no-op when max_norm <= 0).
/// Returns the norm before clipping.
double clip_grad_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace scim
