#include "coopinit/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopinit/errors.hpp"

namespace coopinit {

Descriptor::Descriptor(Mlp net_in) : net(std::move(net_in)) {
  if (net.output_dim() != 1) {
    throw ContractError("Descriptor: net must have output_dim == 1, got " +
                        std::to_string(net.output_dim()));
  }
}

Eigen::VectorXd score(const Descriptor& d, const Eigen::MatrixXd& batch) {
  return forward(d.net, batch).col(0);
}

Eigen::VectorXd mle_gradient(const Descriptor& d, const Eigen::MatrixXd& real,
                             const Eigen::MatrixXd& synth) {
  if (real.rows() == 0 || synth.rows() == 0) {
    throw ContractError("mle_gradient: batches must be non-empty");
  }
  if (real.cols() != synth.cols()) {
    throw ShapeError("mle_gradient: real and synth dimensions differ");
  }
  const Eigen::MatrixXd up_real =
      Eigen::MatrixXd::Constant(real.rows(), 1, 1.0 / double(real.rows()));
  const Eigen::MatrixXd up_synth =
      Eigen::MatrixXd::Constant(synth.rows(), 1, 1.0 / double(synth.rows()));
  return param_grad(d.net, real, up_real) - param_grad(d.net, synth, up_synth);
}

MleGradientStats mle_gradient_with_stderr(const Descriptor& d,
                                          const Eigen::MatrixXd& real,
                                          const Eigen::MatrixXd& synth) {
  if (real.rows() == 0 || synth.rows() == 0) {
    throw ContractError("mle_gradient_with_stderr: batches must be non-empty");
  }
  const auto moments_of = [&](const Eigen::MatrixXd& batch) {
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(batch.rows(), 1);
    return param_grad_moments(d.net, batch, ones);
  };
  const PerSampleGradMoments mr = moments_of(real);
  const PerSampleGradMoments ms = moments_of(synth);
  const double nr = double(real.rows());
  const double ns = double(synth.rows());

  MleGradientStats out;
  out.grad = mr.sum / nr - ms.sum / ns;
  // Variance of each batch mean, per coordinate.
  const Eigen::ArrayXd var_r =
      (mr.sum_sq.array() / nr - (mr.sum.array() / nr).square()).max(0.0) / nr;
  const Eigen::ArrayXd var_s =
      (ms.sum_sq.array() / ns - (ms.sum.array() / ns).square()).max(0.0) / ns;
  out.stderr_per_coord = (var_r + var_s).sqrt().matrix();
  return out;
}

void Grid1d::validate() const {
  if (bins < 2) throw ContractError("Grid1d: bins must be >= 2");
  if (!(hi > lo)) throw ContractError("Grid1d: needs hi > lo");
}

Eigen::VectorXd Grid1d::centers() const {
  validate();
  Eigen::VectorXd c(bins);
  for (int j = 0; j < bins; ++j) c[j] = center(j);
  return c;
}

Eigen::VectorXd gibbs_weights(const Descriptor& d, const Grid1d& grid,
                              bool enforce_containment) {
  grid.validate();
  const Eigen::VectorXd xs = grid.centers();
  const Eigen::MatrixXd batch = xs;
  Eigen::VectorXd scores = score(d, batch);
  const double m = scores.maxCoeff();
  Eigen::VectorXd w = (scores.array() - m).exp();
  w /= w.sum();
  const double boundary_mass = w[0] + w[grid.bins - 1];
  if (enforce_containment && boundary_mass > 1e-6) {
    throw ContractError(
        "gibbs_weights: grid too coarse or too narrow, boundary bins hold "
        "mass " +
        std::to_string(boundary_mass));
  }
  return w;
}

Eigen::VectorXd data_weights(const DatasetSpec& spec, const Grid1d& grid) {
  if (spec.dim() != 1) {
    throw ContractError("data_weights: requires a 1D dataset");
  }
  grid.validate();
  Eigen::VectorXd logp(grid.bins);
  Eigen::VectorXd point(1);
  for (int j = 0; j < grid.bins; ++j) {
    point[0] = grid.center(j);
    logp[j] = log_density(spec, point);
  }
  const double m = logp.maxCoeff();
  Eigen::VectorXd w = (logp.array() - m).exp();
  w /= w.sum();
  return w;
}

Eigen::VectorXd exact_loglik_grad_oracle(const Descriptor& d,
                                         const DatasetSpec& spec,
                                         const Grid1d& grid,
                                         bool enforce_containment) {
  if (spec.dim() != 1) {
    throw ContractError("exact_loglik_grad_oracle: requires a 1D dataset");
  }
  if (grid.bins < 256) {
    throw ContractError("exact_loglik_grad_oracle: bins must be >= 256");
  }
  const Eigen::MatrixXd centers = mode_centers(spec);
  const double outermost_lo = centers.col(0).minCoeff() - 6.0 * spec.sigma;
  const double outermost_hi = centers.col(0).maxCoeff() + 6.0 * spec.sigma;
  if (grid.lo > outermost_lo || grid.hi < outermost_hi) {
    throw ContractError(
        "exact_loglik_grad_oracle: grid must reach 6 sigma beyond all modes");
  }

  const Eigen::MatrixXd batch = grid.centers();
  const Eigen::VectorXd w_data = data_weights(spec, grid);
  const Eigen::VectorXd w_model = gibbs_weights(d, grid, enforce_containment);
  // param_grad with weights as upstream is exactly the weighted expectation
  // of the per-point parameter gradient.
  return param_grad(d.net, batch, w_data) - param_grad(d.net, batch, w_model);
}

Eigen::MatrixXd sample_grid_distribution(const Eigen::VectorXd& weights,
                                         const Grid1d& grid, int n, Rng& rng) {
  grid.validate();
  if (weights.size() != grid.bins) {
    throw ShapeError("sample_grid_distribution: weight count != bins");
  }
  if (n < 1) throw ContractError("sample_grid_distribution: n must be >= 1");
  Eigen::VectorXd cdf(weights.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    cdf[j] = acc;
  }
  Eigen::MatrixXd out(n, 1);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    const double* begin = cdf.data();
    const double* it = std::lower_bound(begin, begin + cdf.size(), u);
    Eigen::Index j = it - begin;
    if (j >= cdf.size()) j = cdf.size() - 1;
    out(i, 0) = grid.center(static_cast<int>(j));
  }
  return out;
}

}  // namespace coopinit
