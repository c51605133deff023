#pragma once

#include <Eigen/Core>

#include "coopinit/datasets.hpp"
#include "coopinit/nn.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

// The descriptor network. Its scalar output is a score (negative energy):
// the model density is proportional to exp(score). The same output serves
// as the pre-sigmoid classifier logit during adversarial training.
struct Descriptor {
  Mlp net;

  explicit Descriptor(Mlp net_in);
};

// Scores for a batch, one per row. Higher score means lower energy.
Eigen::VectorXd score(const Descriptor& d, const Eigen::MatrixXd& batch);

// Sample estimate of the log-likelihood gradient:
//   mean over real of grad_theta score  -  mean over synth of grad_theta score.
// This is an ascent direction for the data log-likelihood when the synth
// batch is drawn from the model.
Eigen::VectorXd mle_gradient(const Descriptor& d, const Eigen::MatrixXd& real,
                             const Eigen::MatrixXd& synth);

// Same estimate plus its per-coordinate Monte Carlo standard error
// (combining the sampling variance of both batch averages).
struct MleGradientStats {
  Eigen::VectorXd grad;
  Eigen::VectorXd stderr_per_coord;
};
MleGradientStats mle_gradient_with_stderr(const Descriptor& d,
                                          const Eigen::MatrixXd& real,
                                          const Eigen::MatrixXd& synth);

// Uniform 1D grid of bin centers on [lo, hi].
struct Grid1d {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;

  double step() const { return (hi - lo) / bins; }
  double center(int j) const { return lo + (j + 0.5) * step(); }
  Eigen::VectorXd centers() const;
  void validate() const;
};

// Normalized model weights exp(score)/Z over the grid centers. With
// enforce_containment (the default) throws ContractError when the mass in
// the two boundary bins exceeds 1e-6, i.e. when the grid fails to contain
// the model distribution; pass false to evaluate the grid-restricted
// model as-is (e.g. for deliberately flat scores).
Eigen::VectorXd gibbs_weights(const Descriptor& d, const Grid1d& grid,
                              bool enforce_containment = true);

// Normalized data-density weights over the grid centers (1D specs only).
Eigen::VectorXd data_weights(const DatasetSpec& spec, const Grid1d& grid);

// Exact log-likelihood gradient of the grid-discretized model:
//   E_data[grad_theta score] - E_model[grad_theta score],
// both expectations taken over the grid with exact normalization.
// Deterministic; intended as a test oracle for mle_gradient.
// Requires a 1D dataset, bins >= 256, and a grid reaching at least
// 6 sigma beyond the outermost mode.
Eigen::VectorXd exact_loglik_grad_oracle(const Descriptor& d,
                                         const DatasetSpec& spec,
                                         const Grid1d& grid,
                                         bool enforce_containment = true);

// Inverse-CDF draws of bin centers from a discrete distribution over the
// grid; used to produce exact samples of the discretized model.
Eigen::MatrixXd sample_grid_distribution(const Eigen::VectorXd& weights,
                                         const Grid1d& grid, int n, Rng& rng);

}  // namespace coopinit
