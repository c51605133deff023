#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "coopinit/nn.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

// Unadjusted Langevin sampler settings. Each step moves a sample along the
// score gradient with step size eta and, when noise is enabled, adds
// independent Gaussian noise of standard deviation sqrt(2*eta) per
// coordinate. No Metropolis correction is applied.
struct LangevinConfig {
  double eta = 1.0;
  int steps = 10;
  bool noise_enabled = true;
  std::uint64_t rng_seed = 0;
  // Optional per-sample L2 clipping of the score gradient before stepping.
  bool clip_enabled = false;
  double clip_norm = 100.0;

  void validate() const;
};

// Batched score gradient: maps an (n x d) batch of points to the (n x d)
// matrix of per-sample gradients of the scalar score. Lets chains run
// against either an Mlp descriptor or an analytic test energy.
using ScoreGradFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

ScoreGradFn score_grad_fn(const Mlp& d);

// One Langevin transition. Inputs are not mutated; throws NumericError
// naming the offending (row, col) if the gradient is non-finite.
Eigen::MatrixXd langevin_step(const ScoreGradFn& grad_fn,
                              const Eigen::MatrixXd& x, double eta, bool noise,
                              Rng& rng, bool clip_enabled = false,
                              double clip_norm = 100.0);
Eigen::MatrixXd langevin_step(const Mlp& d, const Eigen::MatrixXd& x,
                              double eta, bool noise, Rng& rng);

// cfg.steps transitions from x0; steps == 0 returns x0 unchanged. When
// trace is non-null it receives every intermediate state (x1..xT).
// Chain outputs are plain values with no link back to the score model.
Eigen::MatrixXd run_chain(const ScoreGradFn& grad_fn,
                          const Eigen::MatrixXd& x0, const LangevinConfig& cfg,
                          Rng& rng,
                          std::vector<Eigen::MatrixXd>* trace = nullptr);
Eigen::MatrixXd run_chain(const Mlp& d, const Eigen::MatrixXd& x0,
                          const LangevinConfig& cfg, Rng& rng,
                          std::vector<Eigen::MatrixXd>* trace = nullptr);
// Self-seeding overload; draws its generator from cfg.rng_seed.
Eigen::MatrixXd run_chain(const Mlp& d, const Eigen::MatrixXd& x0,
                          const LangevinConfig& cfg,
                          std::vector<Eigen::MatrixXd>* trace = nullptr);

// Trace export: one row per (step, sample) with the sample coordinates.
void write_trace_csv(const std::vector<Eigen::MatrixXd>& trace,
                     std::ostream& os);

}  // namespace coopinit
