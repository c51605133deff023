#include "coopinit/trainer.hpp"

#include <chrono>
#include <string>

#include "coopinit/metrics.hpp"

namespace coopinit {

namespace {

// Stream tags for deriving independent rng streams from the run seed.
constexpr std::uint64_t kTagDescriptorInit = 0xD15C;
constexpr std::uint64_t kTagGeneratorInit = 0x6E4E;
constexpr std::uint64_t kTagTrainStream = 0x7EA1;
constexpr std::uint64_t kTagEvalStream = 0xE7A1;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

void check_finite_params(const TrainerState& state) {
  if (!state.d.net.params().allFinite() || !state.g.net.params().allFinite()) {
    throw TrainingError(
        "training diverged: non-finite parameters at consumed = " +
        std::to_string(state.consumed));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (n < 1) throw ConfigError("TrainConfig: n must be >= 1");
  langevin.validate();
  adv.validate();
  if (coop_lr_d < 0.0 || coop_lr_g < 0.0) {
    throw ConfigError("TrainConfig: cooperative learning rates must be >= 0");
  }
  if (eval_every == 0) {
    throw ConfigError("TrainConfig: eval_every must be >= 1");
  }
  if (eval_samples < 1) {
    throw ConfigError("TrainConfig: eval_samples must be >= 1");
  }
  if (latent_dim < 1) throw ConfigError("TrainConfig: latent_dim must be >= 1");
  if (d_hidden.empty() || g_hidden.empty()) {
    throw ConfigError("TrainConfig: hidden layer lists must be non-empty");
  }
  if (adam_beta1 <= 0.0 || adam_beta1 >= 1.0 || adam_beta2 <= 0.0 ||
      adam_beta2 >= 1.0) {
    throw ConfigError("TrainConfig: Adam betas must lie in (0, 1)");
  }
  if (adam_eps <= 0.0) throw ConfigError("TrainConfig: adam_eps must be > 0");
}

std::uint64_t TrainConfig::coop_iterations() const {
  return n_coop == 0 ? 0 : ceil_div(n_coop, std::uint64_t(n));
}

std::uint64_t TrainConfig::adv_iterations() const {
  return n_adv == 0 ? 0 : ceil_div(n_adv, std::uint64_t(n));
}

TrainerState make_initial_state(const TrainConfig& cfg,
                                const DatasetSpec& dataset) {
  cfg.validate();
  dataset.validate();
  const int data_dim = dataset.dim();

  MlpConfig d_cfg;
  d_cfg.input_dim = data_dim;
  d_cfg.hidden_dims = cfg.d_hidden;
  d_cfg.output_dim = 1;
  d_cfg.activation = Activation::kLeakyRelu;
  d_cfg.leaky_slope = cfg.d_leaky_slope;
  d_cfg.seed = mix_seed(cfg.seed, kTagDescriptorInit);

  MlpConfig g_cfg;
  g_cfg.input_dim = cfg.latent_dim;
  g_cfg.hidden_dims = cfg.g_hidden;
  g_cfg.output_dim = data_dim;
  g_cfg.activation = Activation::kTanh;
  g_cfg.seed = mix_seed(cfg.seed, kTagGeneratorInit);

  TrainerState state{Descriptor(Mlp(d_cfg)),
                     Generator(Mlp(g_cfg), LatentPrior{cfg.latent_dim}),
                     AdamState{},
                     AdamState{},
                     0,
                     TrainStage::kCooperative,
                     Rng(mix_seed(cfg.seed, kTagTrainStream))};
  const bool has_coop = cfg.coop_iterations() > 0;
  state.stage = has_coop ? TrainStage::kCooperative : TrainStage::kAdversarial;
  const double lr_d = has_coop ? cfg.coop_lr_d : cfg.adv.lr_d;
  const double lr_g = has_coop ? cfg.coop_lr_g : cfg.adv.lr_g;
  state.adam_d = AdamState::for_param_count(state.d.net.param_count(), lr_d,
                                            cfg.adam_beta1, cfg.adam_beta2,
                                            cfg.adam_eps);
  state.adam_g = AdamState::for_param_count(state.g.net.param_count(), lr_g,
                                            cfg.adam_beta1, cfg.adam_beta2,
                                            cfg.adam_eps);
  return state;
}

void coop_iteration(TrainerState& state, const TrainConfig& cfg,
                    const Eigen::MatrixXd& real_batch) {
  if (state.stage != TrainStage::kCooperative) {
    throw ContractError("coop_iteration: trainer is not in the cooperative stage");
  }
  const int n = static_cast<int>(real_batch.rows());

  const Eigen::MatrixXd z = sample_latents(state.g, n, state.rng);
  const Eigen::MatrixXd proposals = generate(state.g, z);
  const Eigen::MatrixXd revised =
      run_chain(state.d.net, proposals, cfg.langevin, state.rng);

  state.last_d_loss =
      score(state.d, revised).mean() - score(state.d, real_batch).mean();

  const Eigen::VectorXd d_grad = mle_gradient(state.d, real_batch, revised);
  adam_step(state.adam_d, state.d.net.params(), d_grad, /*maximize=*/true);

  const TeachingLossGrad teach = teaching_loss_grad(state.g, z, revised);
  adam_step(state.adam_g, state.g.net.params(), teach.grad);
  state.last_g_loss = teach.loss;

  state.consumed += std::uint64_t(n);
  check_finite_params(state);
}

void adv_iteration(TrainerState& state, const TrainConfig& cfg,
                   const Eigen::MatrixXd& real_batch) {
  if (state.stage != TrainStage::kAdversarial) {
    throw ContractError("adv_iteration: trainer is not in the adversarial stage");
  }
  const int n = static_cast<int>(real_batch.rows());

  // Descriptor update sees the generator's pre-update parameters.
  const Eigen::MatrixXd z_d = sample_latents(state.g, n, state.rng);
  const Eigen::MatrixXd fake = generate(state.g, z_d);
  const LossGrad dl = d_loss(cfg.adv, state.d, real_batch, fake, state.rng);
  adam_step(state.adam_d, state.d.net.params(), dl.grad);
  state.last_d_loss = dl.loss;

  const Eigen::MatrixXd z_g = sample_latents(state.g, n, state.rng);
  const LossGrad gl = g_loss(cfg.adv, state.d, state.g, z_g);
  adam_step(state.adam_g, state.g.net.params(), gl.grad);
  state.last_g_loss = gl.loss;

  state.consumed += std::uint64_t(n);
  check_finite_params(state);
}

bool advance_stage_if_needed(TrainerState& state, const TrainConfig& cfg) {
  if (state.stage != TrainStage::kCooperative ||
      state.consumed < cfg.transition_consumed()) {
    return false;
  }
  state.stage = TrainStage::kAdversarial;
  if (cfg.carry_adam) {
    state.adam_d.lr = cfg.adv.lr_d;
    state.adam_g.lr = cfg.adv.lr_g;
  } else {
    state.adam_d = AdamState::for_param_count(
        state.d.net.param_count(), cfg.adv.lr_d, cfg.adam_beta1,
        cfg.adam_beta2, cfg.adam_eps);
    state.adam_g = AdamState::for_param_count(
        state.g.net.param_count(), cfg.adv.lr_g, cfg.adam_beta1,
        cfg.adam_beta2, cfg.adam_eps);
  }
  return true;
}

RunRecord evaluate(const TrainerState& state, const TrainConfig& cfg,
                   const DatasetSpec& dataset, std::uint64_t wall_ms) {
  Rng eval_rng(mix_seed(mix_seed(cfg.seed, kTagEvalStream), state.consumed));
  const Eigen::MatrixXd z = sample_latents(state.g, cfg.eval_samples, eval_rng);
  const Eigen::MatrixXd gen = generate(state.g, z);
  const Eigen::MatrixXd real = sample_batch(dataset, cfg.eval_samples, eval_rng);
  const CoverageReport cov =
      mode_coverage(gen, mode_centers(dataset), dataset.sigma);
  const EnergyDistanceReport ed = energy_distance(gen, real);

  RunRecord r;
  r.consumed = state.consumed;
  r.stage = stage_name(state.stage);
  r.d_loss = state.last_d_loss;
  r.g_loss = state.last_g_loss;
  r.modes_covered = cov.modes_covered;
  r.hq_fraction = cov.high_quality_fraction;
  r.energy_distance = ed.value;
  r.wall_ms = wall_ms;
  return r;
}

RunResult run(const TrainConfig& cfg, const DatasetSpec& dataset,
              RunSinks& sinks, const std::optional<TrainerState>& resume) {
  cfg.validate();
  dataset.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto wall_ms = [&start]() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start)
            .count());
  };

  TrainerState state =
      resume ? *resume : make_initial_state(cfg, dataset);
  const std::uint64_t transition = cfg.transition_consumed();
  const std::uint64_t final_target = cfg.final_consumed();

  // Emission thresholds derive from `consumed` alone so that a resumed run
  // reproduces the uninterrupted schedule.
  const auto next_multiple = [](std::uint64_t consumed, std::uint64_t every) {
    return every == 0 ? std::uint64_t(-1) : (consumed / every + 1) * every;
  };
  std::uint64_t next_eval = next_multiple(state.consumed, cfg.eval_every);
  std::uint64_t next_ckpt = next_multiple(state.consumed, cfg.checkpoint_every);
  std::uint64_t next_snap = next_multiple(state.consumed, sinks.snapshot_every);
  std::uint64_t last_emitted =
      sinks.metrics ? sinks.metrics->last_consumed() : 0;

  const auto save_state = [&](const std::string& name) {
    if (sinks.checkpoint_dir.empty()) return;
    save_checkpoint(state_to_checkpoint(state, cfg, sinks.config_text),
                    sinks.checkpoint_dir / name);
  };

  RunResult result;
  result.transition_consumed = transition;
  std::uint64_t iterations = 0;
  try {
    while (state.consumed < final_target) {
      advance_stage_if_needed(state, cfg);
      const Eigen::MatrixXd real = sample_batch(dataset, cfg.n, state.rng);
      if (state.stage == TrainStage::kCooperative) {
        coop_iteration(state, cfg, real);
      } else {
        adv_iteration(state, cfg, real);
      }
      ++iterations;

      if (state.consumed >= next_eval && sinks.metrics) {
        sinks.metrics->append(evaluate(state, cfg, dataset, wall_ms()));
        last_emitted = state.consumed;
        next_eval = next_multiple(state.consumed, cfg.eval_every);
      }
      if (state.consumed >= next_snap && sinks.snapshot) {
        sinks.snapshot(state, dataset);
        next_snap = next_multiple(state.consumed, sinks.snapshot_every);
      }
      if (state.consumed >= next_ckpt) {
        save_state("ckpt_" + std::to_string(state.consumed) + ".bin");
        next_ckpt = next_multiple(state.consumed, cfg.checkpoint_every);
      }
    }
  } catch (const std::exception&) {
    // Flush a diagnostic snapshot of the failed state, then propagate.
    if (!sinks.checkpoint_dir.empty()) {
      try {
        save_state("diagnostic_" + std::to_string(state.consumed) + ".bin");
      } catch (...) {
      }
    }
    throw;
  }

  state.stage = TrainStage::kDone;
  if (sinks.metrics && state.consumed > last_emitted) {
    sinks.metrics->append(evaluate(state, cfg, dataset, wall_ms()));
  }
  save_state("final.bin");

  result.final_consumed = state.consumed;
  result.iterations = iterations;
  return result;
}

Checkpoint state_to_checkpoint(const TrainerState& state,
                               const TrainConfig& cfg,
                               const std::string& config_text) {
  (void)cfg;
  Checkpoint ckpt;
  ckpt.format_version = kCheckpointFormatVersion;
  ckpt.config_text = config_text;
  ckpt.theta = state.d.net.params();
  ckpt.phi = state.g.net.params();
  ckpt.adam_d = state.adam_d;
  ckpt.adam_g = state.adam_g;
  ckpt.consumed = state.consumed;
  ckpt.stage = state.stage;
  ckpt.rng_state = state.rng.serialize();
  return ckpt;
}

TrainerState state_from_checkpoint(const Checkpoint& ckpt,
                                   const TrainConfig& cfg,
                                   const DatasetSpec& dataset) {
  TrainerState state = make_initial_state(cfg, dataset);
  if (state.d.net.params().size() != ckpt.theta.size() ||
      state.g.net.params().size() != ckpt.phi.size()) {
    throw FormatError(
        "checkpoint parameter counts do not match the configured "
        "architectures");
  }
  state.d.net.params() = ckpt.theta;
  state.g.net.params() = ckpt.phi;
  state.adam_d = ckpt.adam_d;
  state.adam_g = ckpt.adam_g;
  state.consumed = ckpt.consumed;
  state.stage = ckpt.stage;
  state.rng = Rng::deserialize(ckpt.rng_state);
  return state;
}

}  // namespace coopinit
