#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "coopinit/errors.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

enum class Activation { kLeakyRelu, kTanh };

// Architecture of a fully connected network. Hidden layers use the
// configured activation; the output layer is always linear.
struct MlpConfig {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int output_dim = 0;
  Activation activation = Activation::kLeakyRelu;
  double leaky_slope = 0.2;  // only used with kLeakyRelu
  std::uint64_t seed = 0;

  void validate() const;
  // [input_dim, hidden..., output_dim]
  std::vector<int> layer_dims() const;
};

// Feedforward network with all parameters stored in one flat vector:
// per layer, the (fan_out x fan_in) weight matrix in row-major order,
// then the bias. Construction from identical configs is bitwise
// reproducible; forward/gradient evaluation never mutates parameters.
class Mlp {
 public:
  explicit Mlp(MlpConfig config);

  const MlpConfig& config() const { return config_; }
  int input_dim() const { return config_.input_dim; }
  int output_dim() const { return config_.output_dim; }
  int layer_count() const { return static_cast<int>(layers_.size()); }
  Eigen::Index param_count() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  struct LayerShape {
    int fan_in = 0;
    int fan_out = 0;
    Eigen::Index weight_offset = 0;
    Eigen::Index bias_offset = 0;
  };
  const LayerShape& layer(int l) const { return layers_[l]; }

  using RowMajorMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Eigen::Map<const RowMajorMatrix> weight(int l) const {
    const LayerShape& s = layers_[l];
    return {params_.data() + s.weight_offset, s.fan_out, s.fan_in};
  }
  Eigen::Map<RowMajorMatrix> weight(int l) {
    LayerShape& s = layers_[l];
    return {params_.data() + s.weight_offset, s.fan_out, s.fan_in};
  }
  Eigen::Map<const Eigen::VectorXd> bias(int l) const {
    const LayerShape& s = layers_[l];
    return {params_.data() + s.bias_offset, s.fan_out};
  }
  Eigen::Map<Eigen::VectorXd> bias(int l) {
    LayerShape& s = layers_[l];
    return {params_.data() + s.bias_offset, s.fan_out};
  }

 private:
  MlpConfig config_;
  std::vector<LayerShape> layers_;
  Eigen::VectorXd params_;
};

// Batched forward pass; batch rows are samples. Throws ShapeError on a
// column-count mismatch and NumericError on non-finite input.
Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& batch);

// Gradient of sum_i <upstream_i, output_i> with respect to the flat
// parameter vector.
Eigen::VectorXd param_grad(const Mlp& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& upstream);

// Row i is d output(x_i) / d x_i. Requires output_dim == 1.
Eigen::MatrixXd input_grad(const Mlp& net, const Eigen::MatrixXd& batch);

// Second-order primitive behind the R1 and gradient-penalty updates.
// For constant per-row directions u_i, computes
//   values_i = <u_i, d output(x_i)/d x_i>
//   grad     = d (sum_i values_i) / d params
// by reverse-mode differentiation of the tangent-augmented forward pass.
// Requires output_dim == 1.
struct DirectionalInputGrad {
  Eigen::VectorXd values;  // one entry per batch row
  Eigen::VectorXd grad;    // flat, length param_count
};
DirectionalInputGrad input_grad_param_grad(const Mlp& net,
                                           const Eigen::MatrixXd& batch,
                                           const Eigen::MatrixXd& directions);

// Mean-squared-error loss against fixed targets and its parameter
// gradient, sharing one forward pass:
//   loss = (1/n) sum_i || output(x_i) - targets_i ||^2.
struct MseLossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};
MseLossGrad mse_param_grad(const Mlp& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& targets);

// Per-row parameter-gradient moments: sum equals param_grad(net, batch,
// upstream); sum_sq accumulates the elementwise square of each row's
// individual gradient. Used for standard-error estimates of
// sample-average gradients.
struct PerSampleGradMoments {
  Eigen::VectorXd sum;
  Eigen::VectorXd sum_sq;
};
PerSampleGradMoments param_grad_moments(const Mlp& net,
                                        const Eigen::MatrixXd& batch,
                                        const Eigen::MatrixXd& upstream);

// Adam optimizer state for one parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_param_count(Eigen::Index n, double lr, double beta1 = 0.5,
                                   double beta2 = 0.999, double eps = 1e-8);
};

// One Adam update, in place. maximize negates the gradient.
void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad, bool maximize = false);

}  // namespace coopinit
