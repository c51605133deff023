#include "coopinit/generator.hpp"

#include <string>

#include "coopinit/errors.hpp"

namespace coopinit {

Generator::Generator(Mlp net_in, LatentPrior prior_in)
    : net(std::move(net_in)), prior(prior_in) {
  if (prior.dim < 1) {
    throw ContractError("Generator: latent dim must be >= 1");
  }
  if (net.input_dim() != prior.dim) {
    throw ContractError("Generator: net input_dim " +
                        std::to_string(net.input_dim()) +
                        " != latent dim " + std::to_string(prior.dim));
  }
}

Eigen::MatrixXd sample_latents(const Generator& g, int n, Rng& rng) {
  if (n < 1) throw ContractError("sample_latents: n must be >= 1");
  Eigen::MatrixXd z(n, g.prior.dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < g.prior.dim; ++j) z(i, j) = rng.normal();
  }
  return z;
}

Eigen::MatrixXd generate(const Generator& g, const Eigen::MatrixXd& z) {
  return forward(g.net, z);
}

TeachingLossGrad teaching_loss_grad(const Generator& g,
                                    const Eigen::MatrixXd& z_batch,
                                    const Eigen::MatrixXd& revised) {
  if (revised.rows() != z_batch.rows() ||
      revised.cols() != g.net.output_dim()) {
    throw ShapeError("teaching_loss_grad: revised shape " +
                     std::to_string(revised.rows()) + "x" +
                     std::to_string(revised.cols()) + " does not match " +
                     std::to_string(z_batch.rows()) + "x" +
                     std::to_string(g.net.output_dim()));
  }
  const MseLossGrad mse = mse_param_grad(g.net, z_batch, revised);
  return TeachingLossGrad{mse.loss, mse.grad};
}

}  // namespace coopinit
