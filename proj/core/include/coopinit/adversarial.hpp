#pragma once

#include <Eigen/Core>

#include "coopinit/ebm.hpp"
#include "coopinit/generator.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

enum class AdvLossKind { kNs, kHinge, kWas, kWasGp };

const char* adv_loss_kind_name(AdvLossKind kind);
AdvLossKind adv_loss_kind_from_name(const std::string& name);

// Stage-two loss settings. gamma is the R1 strength (applied with the
// non-saturating loss only); lambda_gp the gradient-penalty coefficient.
struct AdversarialConfig {
  AdvLossKind loss_kind = AdvLossKind::kNs;
  double gamma = 0.0;
  double lambda_gp = 10.0;
  double lr_d = 1e-3;
  double lr_g = 1e-3;

  void validate() const;
};

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

// Discriminator loss evaluated directly on logits; minimization form.
//   ns:     mean softplus(-s_real) + mean softplus(s_fake)
//   hinge:  mean relu(1 - s_real) + mean relu(1 + s_fake)
//   was(-gp): mean s_fake - mean s_real (penalty handled in d_loss)
double d_loss_from_logits(AdvLossKind kind, const Eigen::VectorXd& s_real,
                          const Eigen::VectorXd& s_fake);

// Generator loss on fake logits; minimization form.
//   ns:                 mean softplus(-s_fake)
//   hinge/was/was_gp:   -mean s_fake
double g_loss_from_logits(AdvLossKind kind, const Eigen::VectorXd& s_fake);

// Full discriminator loss and its parameter gradient. The rng feeds the
// per-pair interpolation points of the was_gp penalty (it is untouched for
// the other kinds); was_gp requires equally sized batches. With the ns
// loss and gamma > 0 the R1 term (gamma/2) * E_real ||grad_x score||^2 is
// included.
LossGrad d_loss(const AdversarialConfig& cfg, const Descriptor& d,
                const Eigen::MatrixXd& real_batch,
                const Eigen::MatrixXd& fake_batch, Rng& rng);

// Generator loss and its parameter gradient; gradients flow through the
// descriptor's input but never touch descriptor parameters.
LossGrad g_loss(const AdversarialConfig& cfg, const Descriptor& d,
                const Generator& g, const Eigen::MatrixXd& z_batch);

// R1 penalty value E_real ||grad_x score||^2 (before the gamma/2 factor)
// and its exact parameter gradient via second-pass differentiation.
LossGrad r1_penalty(const Descriptor& d, const Eigen::MatrixXd& real_batch);

// Per-pair convex interpolation used by the was_gp penalty; row i lies on
// the segment between real row i and fake row i.
Eigen::MatrixXd interpolate_pairs(const Eigen::MatrixXd& real,
                                  const Eigen::MatrixXd& fake, Rng& rng);

}  // namespace coopinit
