#include "coopinit/langevin.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "coopinit/errors.hpp"

namespace coopinit {

void LangevinConfig::validate() const {
  if (eta <= 0.0) throw ContractError("LangevinConfig: eta must be > 0");
  if (steps < 0) throw ContractError("LangevinConfig: steps must be >= 0");
  if (clip_enabled && clip_norm <= 0.0) {
    throw ContractError("LangevinConfig: clip_norm must be > 0");
  }
}

ScoreGradFn score_grad_fn(const Mlp& d) {
  if (d.output_dim() != 1) {
    throw ContractError("score_grad_fn: descriptor must have output_dim == 1");
  }
  return [&d](const Eigen::MatrixXd& x) { return input_grad(d, x); };
}

Eigen::MatrixXd langevin_step(const ScoreGradFn& grad_fn,
                              const Eigen::MatrixXd& x, double eta, bool noise,
                              Rng& rng, bool clip_enabled, double clip_norm) {
  Eigen::MatrixXd grad = grad_fn(x);
  if (!grad.allFinite()) {
    for (Eigen::Index i = 0; i < grad.rows(); ++i) {
      for (Eigen::Index j = 0; j < grad.cols(); ++j) {
        if (!std::isfinite(grad(i, j))) {
          throw NumericError("langevin_step: non-finite score gradient at sample " +
                             std::to_string(i) + ", coordinate " +
                             std::to_string(j));
        }
      }
    }
  }
  if (clip_enabled) {
    for (Eigen::Index i = 0; i < grad.rows(); ++i) {
      const double norm = grad.row(i).norm();
      if (norm > clip_norm) grad.row(i) *= clip_norm / norm;
    }
  }
  Eigen::MatrixXd next = x + eta * grad;
  if (noise) {
    const double noise_std = std::sqrt(2.0 * eta);
    for (Eigen::Index i = 0; i < next.rows(); ++i) {
      for (Eigen::Index j = 0; j < next.cols(); ++j) {
        next(i, j) += noise_std * rng.normal();
      }
    }
  }
  return next;
}

Eigen::MatrixXd langevin_step(const Mlp& d, const Eigen::MatrixXd& x,
                              double eta, bool noise, Rng& rng) {
  return langevin_step(score_grad_fn(d), x, eta, noise, rng);
}

Eigen::MatrixXd run_chain(const ScoreGradFn& grad_fn,
                          const Eigen::MatrixXd& x0, const LangevinConfig& cfg,
                          Rng& rng, std::vector<Eigen::MatrixXd>* trace) {
  cfg.validate();
  Eigen::MatrixXd x = x0;
  for (int t = 0; t < cfg.steps; ++t) {
    x = langevin_step(grad_fn, x, cfg.eta, cfg.noise_enabled, rng,
                      cfg.clip_enabled, cfg.clip_norm);
    if (trace) trace->push_back(x);
  }
  return x;
}

Eigen::MatrixXd run_chain(const Mlp& d, const Eigen::MatrixXd& x0,
                          const LangevinConfig& cfg, Rng& rng,
                          std::vector<Eigen::MatrixXd>* trace) {
  return run_chain(score_grad_fn(d), x0, cfg, rng, trace);
}

Eigen::MatrixXd run_chain(const Mlp& d, const Eigen::MatrixXd& x0,
                          const LangevinConfig& cfg,
                          std::vector<Eigen::MatrixXd>* trace) {
  Rng rng(cfg.rng_seed);
  return run_chain(score_grad_fn(d), x0, cfg, rng, trace);
}

void write_trace_csv(const std::vector<Eigen::MatrixXd>& trace,
                     std::ostream& os) {
  if (trace.empty()) {
    os << "step,sample\n";
    return;
  }
  os << "step,sample";
  for (Eigen::Index j = 0; j < trace.front().cols(); ++j) os << ",x" << j;
  os << "\n";
  char buf[64];
  for (std::size_t t = 0; t < trace.size(); ++t) {
    for (Eigen::Index i = 0; i < trace[t].rows(); ++i) {
      os << (t + 1) << "," << i;
      for (Eigen::Index j = 0; j < trace[t].cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.9g", trace[t](i, j));
        os << "," << buf;
      }
      os << "\n";
    }
  }
}

}  // namespace coopinit
