#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "coopinit/nn.hpp"
#include "coopinit/rng.hpp"

namespace coopinit::test {

// Central finite differences of a scalar function of a flat vector.
inline Eigen::VectorXd finite_diff(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
    double h = 1e-5) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Max relative error between two gradient vectors. Coordinates are
// compared relative to their own magnitude, floored at 1e-3 of the
// overall gradient scale so near-zero entries are checked absolutely.
inline double max_rel_error(const Eigen::VectorXd& got,
                            const Eigen::VectorXd& want) {
  const double scale = std::max(
      {got.cwiseAbs().maxCoeff(), want.cwiseAbs().maxCoeff(), 1e-12});
  const double floor = 1e-3 * scale;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    const double denom = std::max(floor, std::abs(want[i]));
    worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
  }
  return worst;
}

// Small random network fixture for gradient checks.
inline Mlp random_net(Rng& rng, int input_dim, int output_dim,
                      Activation act, std::vector<int> hidden = {8, 8}) {
  MlpConfig cfg;
  cfg.input_dim = input_dim;
  cfg.hidden_dims = std::move(hidden);
  cfg.output_dim = output_dim;
  cfg.activation = act;
  cfg.leaky_slope = 0.2;
  cfg.seed = rng.next_u64();
  return Mlp(cfg);
}

inline Eigen::MatrixXd random_batch(Rng& rng, int n, int d,
                                    double scale = 1.0) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

// Analytic score-gradient fixture for Langevin and chase tests:
// score(x) = -0.5 * alpha * ||x||^2, so the Gibbs density exp(score)
// is N(0, I/alpha) and the score gradient is -alpha * x.
struct QuadraticEnergy {
  double alpha = 1.0;

  Eigen::MatrixXd grad(const Eigen::MatrixXd& x) const { return -alpha * x; }
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> grad_fn() const {
    const double a = alpha;
    return [a](const Eigen::MatrixXd& x) { return Eigen::MatrixXd(-a * x); };
  }
};

}  // namespace coopinit::test
