#include "coopinit/adversarial.hpp"

#include <cmath>
#include <string>

#include "coopinit/errors.hpp"

namespace coopinit {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

void check_pair(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake,
                const char* op) {
  if (real.rows() == 0 || fake.rows() == 0) {
    throw ContractError(std::string(op) + ": batches must be non-empty");
  }
  if (real.cols() != fake.cols()) {
    throw ShapeError(std::string(op) + ": real and fake dimensions differ");
  }
}

}  // namespace

const char* adv_loss_kind_name(AdvLossKind kind) {
  switch (kind) {
    case AdvLossKind::kNs:
      return "ns";
    case AdvLossKind::kHinge:
      return "hinge";
    case AdvLossKind::kWas:
      return "was";
    case AdvLossKind::kWasGp:
      return "was_gp";
  }
  return "?";
}

AdvLossKind adv_loss_kind_from_name(const std::string& name) {
  if (name == "ns") return AdvLossKind::kNs;
  if (name == "hinge") return AdvLossKind::kHinge;
  if (name == "was") return AdvLossKind::kWas;
  if (name == "was_gp") return AdvLossKind::kWasGp;
  throw ConfigError("unknown adversarial loss kind: " + name);
}

void AdversarialConfig::validate() const {
  if (gamma < 0.0) throw ContractError("AdversarialConfig: gamma must be >= 0");
  if (loss_kind == AdvLossKind::kWasGp && lambda_gp <= 0.0) {
    throw ContractError("AdversarialConfig: was_gp requires lambda_gp > 0");
  }
  if (lambda_gp < 0.0) {
    throw ContractError("AdversarialConfig: lambda_gp must be >= 0");
  }
  if (lr_d < 0.0 || lr_g < 0.0) {
    throw ContractError("AdversarialConfig: learning rates must be >= 0");
  }
}

double d_loss_from_logits(AdvLossKind kind, const Eigen::VectorXd& s_real,
                          const Eigen::VectorXd& s_fake) {
  const double nr = double(s_real.size());
  const double nf = double(s_fake.size());
  switch (kind) {
    case AdvLossKind::kNs: {
      double acc = 0.0;
      for (double s : s_real) acc += softplus(-s) / nr;
      for (double s : s_fake) acc += softplus(s) / nf;
      return acc;
    }
    case AdvLossKind::kHinge: {
      double acc = 0.0;
      for (double s : s_real) acc += std::max(0.0, 1.0 - s) / nr;
      for (double s : s_fake) acc += std::max(0.0, 1.0 + s) / nf;
      return acc;
    }
    case AdvLossKind::kWas:
    case AdvLossKind::kWasGp:
      return s_fake.mean() - s_real.mean();
  }
  return 0.0;
}

double g_loss_from_logits(AdvLossKind kind, const Eigen::VectorXd& s_fake) {
  if (kind == AdvLossKind::kNs) {
    double acc = 0.0;
    for (double s : s_fake) acc += softplus(-s);
    return acc / double(s_fake.size());
  }
  return -s_fake.mean();
}

Eigen::MatrixXd interpolate_pairs(const Eigen::MatrixXd& real,
                                  const Eigen::MatrixXd& fake, Rng& rng) {
  check_pair(real, fake, "interpolate_pairs");
  if (real.rows() != fake.rows()) {
    throw ContractError(
        "interpolate_pairs: real and fake batches must be the same size");
  }
  Eigen::MatrixXd mixed(real.rows(), real.cols());
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    const double t = rng.uniform();
    mixed.row(i) = t * real.row(i) + (1.0 - t) * fake.row(i);
  }
  return mixed;
}

LossGrad r1_penalty(const Descriptor& d, const Eigen::MatrixXd& real_batch) {
  if (real_batch.rows() == 0) {
    throw ContractError("r1_penalty: batch must be non-empty");
  }
  const double n = double(real_batch.rows());
  const Eigen::MatrixXd g = input_grad(d.net, real_batch);
  LossGrad out;
  out.loss = g.squaredNorm() / n;
  // d/dtheta of mean ||g_i||^2 with the directions frozen at 2 g_i / n.
  const DirectionalInputGrad second =
      input_grad_param_grad(d.net, real_batch, (2.0 / n) * g);
  out.grad = second.grad;
  return out;
}

LossGrad d_loss(const AdversarialConfig& cfg, const Descriptor& d,
                const Eigen::MatrixXd& real_batch,
                const Eigen::MatrixXd& fake_batch, Rng& rng) {
  cfg.validate();
  check_pair(real_batch, fake_batch, "d_loss");
  const double nr = double(real_batch.rows());
  const double nf = double(fake_batch.rows());
  const Eigen::VectorXd s_real = score(d, real_batch);
  const Eigen::VectorXd s_fake = score(d, fake_batch);

  LossGrad out;
  out.loss = d_loss_from_logits(cfg.loss_kind, s_real, s_fake);

  // Upstream per-logit derivatives of the loss.
  Eigen::MatrixXd up_real(s_real.size(), 1);
  Eigen::MatrixXd up_fake(s_fake.size(), 1);
  switch (cfg.loss_kind) {
    case AdvLossKind::kNs:
      for (Eigen::Index i = 0; i < s_real.size(); ++i) {
        up_real(i, 0) = -sigmoid(-s_real[i]) / nr;
      }
      for (Eigen::Index i = 0; i < s_fake.size(); ++i) {
        up_fake(i, 0) = sigmoid(s_fake[i]) / nf;
      }
      break;
    case AdvLossKind::kHinge:
      for (Eigen::Index i = 0; i < s_real.size(); ++i) {
        up_real(i, 0) = (1.0 - s_real[i] > 0.0) ? -1.0 / nr : 0.0;
      }
      for (Eigen::Index i = 0; i < s_fake.size(); ++i) {
        up_fake(i, 0) = (1.0 + s_fake[i] > 0.0) ? 1.0 / nf : 0.0;
      }
      break;
    case AdvLossKind::kWas:
    case AdvLossKind::kWasGp:
      up_real.setConstant(-1.0 / nr);
      up_fake.setConstant(1.0 / nf);
      break;
  }
  out.grad = param_grad(d.net, real_batch, up_real) +
             param_grad(d.net, fake_batch, up_fake);

  if (cfg.loss_kind == AdvLossKind::kNs && cfg.gamma > 0.0) {
    const LossGrad r1 = r1_penalty(d, real_batch);
    out.loss += 0.5 * cfg.gamma * r1.loss;
    out.grad += 0.5 * cfg.gamma * r1.grad;
  }

  if (cfg.loss_kind == AdvLossKind::kWasGp) {
    const Eigen::MatrixXd mixed = interpolate_pairs(real_batch, fake_batch, rng);
    const double n = double(mixed.rows());
    const Eigen::MatrixXd g = input_grad(d.net, mixed);
    Eigen::MatrixXd dirs(g.rows(), g.cols());
    double penalty = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double norm = g.row(i).norm();
      penalty += (norm - 1.0) * (norm - 1.0) / n;
      if (norm > 0.0) {
        dirs.row(i) = (2.0 / n) * (norm - 1.0) / norm * g.row(i);
      } else {
        dirs.row(i).setZero();
      }
    }
    const DirectionalInputGrad second = input_grad_param_grad(d.net, mixed, dirs);
    out.loss += cfg.lambda_gp * penalty;
    out.grad += cfg.lambda_gp * second.grad;
  }

  if (!std::isfinite(out.loss)) {
    throw NumericError("d_loss: non-finite loss value");
  }
  return out;
}

LossGrad g_loss(const AdversarialConfig& cfg, const Descriptor& d,
                const Generator& g, const Eigen::MatrixXd& z_batch) {
  cfg.validate();
  if (z_batch.rows() == 0) {
    throw ContractError("g_loss: latent batch must be non-empty");
  }
  const double n = double(z_batch.rows());
  const Eigen::MatrixXd fake = generate(g, z_batch);
  const Eigen::VectorXd s_fake = score(d, fake);

  LossGrad out;
  out.loss = g_loss_from_logits(cfg.loss_kind, s_fake);

  Eigen::VectorXd w(s_fake.size());
  if (cfg.loss_kind == AdvLossKind::kNs) {
    for (Eigen::Index i = 0; i < s_fake.size(); ++i) {
      w[i] = -sigmoid(-s_fake[i]) / n;
    }
  } else {
    w.setConstant(-1.0 / n);
  }
  // Chain rule through the descriptor input into the generator.
  Eigen::MatrixXd dx = input_grad(d.net, fake);
  dx.array().colwise() *= w.array();
  out.grad = param_grad(g.net, z_batch, dx);

  if (!std::isfinite(out.loss)) {
    throw NumericError("g_loss: non-finite loss value");
  }
  return out;
}

}  // namespace coopinit
