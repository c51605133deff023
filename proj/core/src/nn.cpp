#include "coopinit/nn.hpp"

#include <cmath>
#include <string>

namespace coopinit {

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation act, double slope) {
  if (act == Activation::kLeakyRelu) {
    z = z.unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  } else {
    z = z.array().tanh().matrix();
  }
}

Eigen::MatrixXd activation_d1(const Eigen::MatrixXd& z, Activation act,
                              double slope) {
  if (act == Activation::kLeakyRelu) {
    return z.unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; });
  }
  return z.unaryExpr([](double x) {
    const double t = std::tanh(x);
    return 1.0 - t * t;
  });
}

Eigen::MatrixXd activation_d2(const Eigen::MatrixXd& z, Activation act,
                              double slope) {
  (void)slope;
  if (act == Activation::kLeakyRelu) {
    return Eigen::MatrixXd::Zero(z.rows(), z.cols());
  }
  return z.unaryExpr([](double x) {
    const double t = std::tanh(x);
    return -2.0 * t * (1.0 - t * t);
  });
}

void check_batch(const Mlp& net, const Eigen::MatrixXd& batch,
                 const char* op) {
  if (batch.cols() != net.input_dim()) {
    throw ShapeError(std::string(op) + ": batch has " +
                     std::to_string(batch.cols()) + " columns, expected " +
                     std::to_string(net.input_dim()));
  }
  if (!batch.allFinite()) {
    throw NumericError(std::string(op) + ": non-finite input batch");
  }
}

struct ForwardCache {
  // inputs[l] is the input to layer l (inputs[0] == batch);
  // pre[l] is layer l's pre-activation.
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
};

ForwardCache run_forward(const Mlp& net, const Eigen::MatrixXd& batch) {
  const int L = net.layer_count();
  ForwardCache cache;
  cache.inputs.resize(L);
  cache.pre.resize(L);
  cache.inputs[0] = batch;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = cache.inputs[l] * net.weight(l).transpose();
    z.rowwise() += net.bias(l).transpose();
    cache.pre[l] = z;
    if (l + 1 < L) {
      apply_activation(z, net.config().activation, net.config().leaky_slope);
      cache.inputs[l + 1] = std::move(z);
    }
  }
  return cache;
}

}  // namespace

void MlpConfig::validate() const {
  if (input_dim < 1) throw ContractError("MlpConfig: input_dim must be >= 1");
  if (output_dim < 1) throw ContractError("MlpConfig: output_dim must be >= 1");
  if (hidden_dims.empty()) {
    throw ContractError("MlpConfig: hidden_dims must be non-empty");
  }
  for (int h : hidden_dims) {
    if (h < 1) throw ContractError("MlpConfig: hidden dims must be >= 1");
  }
  if (activation == Activation::kLeakyRelu &&
      (leaky_slope <= 0.0 || leaky_slope >= 1.0)) {
    throw ContractError("MlpConfig: leaky_slope must lie in (0, 1)");
  }
}

std::vector<int> MlpConfig::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

Mlp::Mlp(MlpConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::vector<int> dims = config_.layer_dims();
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    LayerShape s;
    s.fan_in = dims[l];
    s.fan_out = dims[l + 1];
    s.weight_offset = offset;
    offset += static_cast<Eigen::Index>(s.fan_in) * s.fan_out;
    s.bias_offset = offset;
    offset += s.fan_out;
    layers_.push_back(s);
  }
  params_ = Eigen::VectorXd::Zero(offset);

  // He scaling for leaky-relu nets, Glorot for tanh; biases start at zero.
  Rng rng(config_.seed);
  for (const LayerShape& s : layers_) {
    const double std_dev =
        config_.activation == Activation::kLeakyRelu
            ? std::sqrt(2.0 / s.fan_in)
            : std::sqrt(2.0 / (s.fan_in + s.fan_out));
    const Eigen::Index count = static_cast<Eigen::Index>(s.fan_in) * s.fan_out;
    for (Eigen::Index k = 0; k < count; ++k) {
      params_[s.weight_offset + k] = std_dev * rng.normal();
    }
  }
}

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& batch) {
  check_batch(net, batch, "forward");
  const int L = net.layer_count();
  Eigen::MatrixXd a = batch;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = a * net.weight(l).transpose();
    z.rowwise() += net.bias(l).transpose();
    if (l + 1 < L) {
      apply_activation(z, net.config().activation, net.config().leaky_slope);
    }
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd param_grad(const Mlp& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& upstream) {
  check_batch(net, batch, "param_grad");
  if (upstream.rows() != batch.rows() || upstream.cols() != net.output_dim()) {
    throw ShapeError("param_grad: upstream shape " +
                     std::to_string(upstream.rows()) + "x" +
                     std::to_string(upstream.cols()) + " does not match " +
                     std::to_string(batch.rows()) + "x" +
                     std::to_string(net.output_dim()));
  }
  const int L = net.layer_count();
  const ForwardCache cache = run_forward(net, batch);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.param_count());

  Eigen::MatrixXd delta = upstream;  // d S / d pre[l], starting at l = L-1
  for (int l = L - 1; l >= 0; --l) {
    const Mlp::LayerShape& s = net.layer(l);
    Eigen::Map<Mlp::RowMajorMatrix> gw(grad.data() + s.weight_offset,
                                       s.fan_out, s.fan_in);
    gw = delta.transpose() * cache.inputs[l];
    grad.segment(s.bias_offset, s.fan_out) = delta.colwise().sum();
    if (l > 0) {
      delta = (delta * net.weight(l)).cwiseProduct(activation_d1(
          cache.pre[l - 1], net.config().activation, net.config().leaky_slope));
    }
  }
  return grad;
}

Eigen::MatrixXd input_grad(const Mlp& net, const Eigen::MatrixXd& batch) {
  if (net.output_dim() != 1) {
    throw ContractError("input_grad: requires output_dim == 1, got " +
                        std::to_string(net.output_dim()));
  }
  check_batch(net, batch, "input_grad");
  const int L = net.layer_count();
  const ForwardCache cache = run_forward(net, batch);

  Eigen::MatrixXd delta = Eigen::MatrixXd::Ones(batch.rows(), 1);
  for (int l = L - 1; l > 0; --l) {
    delta = (delta * net.weight(l)).cwiseProduct(activation_d1(
        cache.pre[l - 1], net.config().activation, net.config().leaky_slope));
  }
  return delta * net.weight(0);
}

DirectionalInputGrad input_grad_param_grad(const Mlp& net,
                                           const Eigen::MatrixXd& batch,
                                           const Eigen::MatrixXd& directions) {
  if (net.output_dim() != 1) {
    throw ContractError("input_grad_param_grad: requires output_dim == 1");
  }
  check_batch(net, batch, "input_grad_param_grad");
  if (directions.rows() != batch.rows() || directions.cols() != batch.cols()) {
    throw ShapeError("input_grad_param_grad: directions shape mismatch");
  }
  const int L = net.layer_count();
  const Activation act = net.config().activation;
  const double slope = net.config().leaky_slope;

  // Tangent-augmented forward pass: dot-quantities are directional
  // derivatives along `directions` with respect to the input.
  std::vector<Eigen::MatrixXd> inputs(L), inputs_dot(L), pre(L), pre_dot(L);
  std::vector<Eigen::MatrixXd> d1(L);  // activation first derivative, hidden only
  inputs[0] = batch;
  inputs_dot[0] = directions;
  for (int l = 0; l < L; ++l) {
    pre[l] = inputs[l] * net.weight(l).transpose();
    pre[l].rowwise() += net.bias(l).transpose();
    pre_dot[l] = inputs_dot[l] * net.weight(l).transpose();
    if (l + 1 < L) {
      d1[l] = activation_d1(pre[l], act, slope);
      Eigen::MatrixXd a = pre[l];
      apply_activation(a, act, slope);
      inputs[l + 1] = std::move(a);
      inputs_dot[l + 1] = d1[l].cwiseProduct(pre_dot[l]);
    }
  }

  DirectionalInputGrad out;
  out.values = pre_dot[L - 1].col(0);
  out.grad = Eigen::VectorXd::Zero(net.param_count());

  // Reverse pass over the augmented graph. adj_primal/adj_tangent are the
  // adjoints of the layer outputs (activation and its tangent).
  Eigen::MatrixXd adj_primal = Eigen::MatrixXd::Zero(batch.rows(), 1);
  Eigen::MatrixXd adj_tangent = Eigen::MatrixXd::Ones(batch.rows(), 1);
  for (int l = L - 1; l >= 0; --l) {
    Eigen::MatrixXd adj_pre_dot, adj_pre;
    if (l == L - 1) {
      adj_pre_dot = adj_tangent;  // linear output layer
      adj_pre = adj_primal;
    } else {
      adj_pre_dot = adj_tangent.cwiseProduct(d1[l]);
      adj_pre = adj_tangent.cwiseProduct(activation_d2(pre[l], act, slope))
                    .cwiseProduct(pre_dot[l]) +
                adj_primal.cwiseProduct(d1[l]);
    }
    const Mlp::LayerShape& s = net.layer(l);
    Eigen::Map<Mlp::RowMajorMatrix> gw(out.grad.data() + s.weight_offset,
                                       s.fan_out, s.fan_in);
    gw = adj_pre.transpose() * inputs[l] +
         adj_pre_dot.transpose() * inputs_dot[l];
    out.grad.segment(s.bias_offset, s.fan_out) = adj_pre.colwise().sum();
    if (l > 0) {
      adj_primal = adj_pre * net.weight(l);
      adj_tangent = adj_pre_dot * net.weight(l);
    }
  }
  return out;
}

MseLossGrad mse_param_grad(const Mlp& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& targets) {
  check_batch(net, batch, "mse_param_grad");
  if (targets.rows() != batch.rows() || targets.cols() != net.output_dim()) {
    throw ShapeError("mse_param_grad: target shape mismatch");
  }
  const int L = net.layer_count();
  const double n = double(batch.rows());
  const ForwardCache cache = run_forward(net, batch);
  const Eigen::MatrixXd diff = cache.pre[L - 1] - targets;

  MseLossGrad out;
  out.loss = diff.squaredNorm() / n;
  out.grad = Eigen::VectorXd::Zero(net.param_count());
  Eigen::MatrixXd delta = (2.0 / n) * diff;
  for (int l = L - 1; l >= 0; --l) {
    const Mlp::LayerShape& s = net.layer(l);
    Eigen::Map<Mlp::RowMajorMatrix> gw(out.grad.data() + s.weight_offset,
                                       s.fan_out, s.fan_in);
    gw = delta.transpose() * cache.inputs[l];
    out.grad.segment(s.bias_offset, s.fan_out) = delta.colwise().sum();
    if (l > 0) {
      delta = (delta * net.weight(l)).cwiseProduct(activation_d1(
          cache.pre[l - 1], net.config().activation, net.config().leaky_slope));
    }
  }
  return out;
}

PerSampleGradMoments param_grad_moments(const Mlp& net,
                                        const Eigen::MatrixXd& batch,
                                        const Eigen::MatrixXd& upstream) {
  check_batch(net, batch, "param_grad_moments");
  if (upstream.rows() != batch.rows() || upstream.cols() != net.output_dim()) {
    throw ShapeError("param_grad_moments: upstream shape mismatch");
  }
  const int L = net.layer_count();
  const ForwardCache cache = run_forward(net, batch);
  PerSampleGradMoments out;
  out.sum = Eigen::VectorXd::Zero(net.param_count());
  out.sum_sq = Eigen::VectorXd::Zero(net.param_count());

  Eigen::MatrixXd delta = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const Mlp::LayerShape& s = net.layer(l);
    Eigen::Map<Mlp::RowMajorMatrix> gw(out.sum.data() + s.weight_offset,
                                       s.fan_out, s.fan_in);
    gw = delta.transpose() * cache.inputs[l];
    out.sum.segment(s.bias_offset, s.fan_out) = delta.colwise().sum();

    // Per-row weight gradient is an outer product, so its square factors.
    Eigen::Map<Mlp::RowMajorMatrix> gw2(out.sum_sq.data() + s.weight_offset,
                                        s.fan_out, s.fan_in);
    gw2 = delta.cwiseProduct(delta).transpose() *
          cache.inputs[l].cwiseProduct(cache.inputs[l]);
    out.sum_sq.segment(s.bias_offset, s.fan_out) =
        delta.cwiseProduct(delta).colwise().sum();

    if (l > 0) {
      delta = (delta * net.weight(l)).cwiseProduct(activation_d1(
          cache.pre[l - 1], net.config().activation, net.config().leaky_slope));
    }
  }
  return out;
}

AdamState AdamState::for_param_count(Eigen::Index n, double lr, double beta1,
                                     double beta2, double eps) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad, bool maximize) {
  if (state.m.size() != params.size() || state.v.size() != params.size() ||
      grad.size() != params.size()) {
    throw ShapeError("adam_step: length mismatch between state, params, grad");
  }
  const Eigen::VectorXd g = maximize ? Eigen::VectorXd(-grad) : grad;
  state.step_count += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * g;
  state.v = state.beta2 * state.v.array().matrix() +
            (1.0 - state.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(state.beta1, double(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, double(state.step_count));
  params.array() -= state.lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace coopinit
