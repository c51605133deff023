#pragma once

#include <Eigen/Core>

#include "coopinit/nn.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

// Standard normal latent distribution.
struct LatentPrior {
  int dim = 16;
};

// Ancestral sampler: maps latent draws through a top-down network.
struct Generator {
  Mlp net;
  LatentPrior prior;

  Generator(Mlp net_in, LatentPrior prior_in);
};

// n i.i.d. latent rows, deterministic per rng state.
Eigen::MatrixXd sample_latents(const Generator& g, int n, Rng& rng);

// Pure forward map of latents to data space.
Eigen::MatrixXd generate(const Generator& g, const Eigen::MatrixXd& z);

// Mean-squared regression of the generator's outputs onto revised samples:
//   loss = mean_i || revised_i - G(z_i) ||^2.
// `revised` is treated as constant; grad is the exact parameter gradient.
struct TeachingLossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};
TeachingLossGrad teaching_loss_grad(const Generator& g,
                                    const Eigen::MatrixXd& z_batch,
                                    const Eigen::MatrixXd& revised);

}  // namespace coopinit
