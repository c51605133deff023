#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coopinit/adversarial.hpp"
#include "coopinit/datasets.hpp"
#include "coopinit/ebm.hpp"
#include "coopinit/generator.hpp"
#include "coopinit/langevin.hpp"
#include "coopinit/persistence.hpp"
#include "coopinit/stage.hpp"

namespace coopinit {

// Two-stage training schedule: n_coop examples of cooperative training
// (descriptor trained as an EBM by maximum likelihood, generator by
// regression onto the Langevin-revised samples), then n_adv examples of
// adversarial training with the parameters carried over unchanged.
struct TrainConfig {
  int n = 256;  // batch size
  std::uint64_t n_coop = 60'000;
  std::uint64_t n_adv = 1'940'000;
  LangevinConfig langevin;
  AdversarialConfig adv;
  double coop_lr_d = 1e-3;
  double coop_lr_g = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t eval_every = 20'000;
  int eval_samples = 2'000;
  std::uint64_t checkpoint_every = 0;  // 0: final checkpoint only
  // Keep Adam moments across the stage transition instead of resetting.
  bool carry_adam = false;

  // Architectures.
  int latent_dim = 16;
  std::vector<int> d_hidden = {64, 64};
  std::vector<int> g_hidden = {64, 64};
  double d_leaky_slope = 0.2;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
  std::uint64_t coop_iterations() const;  // ceil(n_coop / n)
  std::uint64_t adv_iterations() const;   // ceil(n_adv / n)
  std::uint64_t total_iterations() const {
    return coop_iterations() + adv_iterations();
  }
  // Consumed-example count at which the adversarial stage begins.
  std::uint64_t transition_consumed() const {
    return coop_iterations() * std::uint64_t(n);
  }
  std::uint64_t final_consumed() const {
    return transition_consumed() + adv_iterations() * std::uint64_t(n);
  }
};

struct TrainerState {
  Descriptor d;
  Generator g;
  AdamState adam_d;
  AdamState adam_g;
  std::uint64_t consumed = 0;
  TrainStage stage = TrainStage::kCooperative;
  Rng rng;
  // Monitors from the most recent iteration. During the cooperative stage
  // d_loss is the score gap mean(score(synth)) - mean(score(real)) and
  // g_loss the MCMC-teaching regression loss; during the adversarial stage
  // they are the configured adversarial losses.
  double last_d_loss = 0.0;
  double last_g_loss = 0.0;
};

// Fresh state with networks seeded deterministically from cfg.seed.
TrainerState make_initial_state(const TrainConfig& cfg,
                                const DatasetSpec& dataset);

// One cooperative iteration: latents -> generated proposals -> T-step
// Langevin revision under the current descriptor -> descriptor ascent on
// the likelihood-gradient estimate (against the pre-update chain output)
// -> generator regression onto the same revised samples.
void coop_iteration(TrainerState& state, const TrainConfig& cfg,
                    const Eigen::MatrixXd& real_batch);

// One adversarial iteration: a descriptor update on (real, fresh fakes),
// then a generator update on fresh latents against the updated descriptor.
void adv_iteration(TrainerState& state, const TrainConfig& cfg,
                   const Eigen::MatrixXd& real_batch);

// Switches to the adversarial stage once the cooperative example budget is
// exhausted. Parameters are never touched; Adam moments restart (or are
// carried when cfg.carry_adam) with the adversarial learning rates.
// Returns true when a transition occurred.
bool advance_stage_if_needed(TrainerState& state, const TrainConfig& cfg);

// Output hooks for run(). Any member may be left unset.
struct RunSinks {
  MetricSink* metrics = nullptr;
  std::uint64_t snapshot_every = 0;
  std::function<void(const TrainerState&, const DatasetSpec&)> snapshot;
  std::filesystem::path checkpoint_dir;  // empty: no checkpoints
  std::string config_text;               // embedded in checkpoints
};

struct RunResult {
  std::uint64_t final_consumed = 0;
  std::uint64_t transition_consumed = 0;
  std::uint64_t iterations = 0;
};

// Executes the full schedule. Deterministic per (cfg, dataset): identical
// inputs produce identical parameter trajectories and metric rows (wall_ms
// excepted). On numeric failure a diagnostic checkpoint is written (when a
// checkpoint dir is configured) and TrainingError propagates.
// `resume` continues from a previously checkpointed state.
RunResult run(const TrainConfig& cfg, const DatasetSpec& dataset,
              RunSinks& sinks,
              const std::optional<TrainerState>& resume = std::nullopt);

// Checkpoint conversion. config_text is embedded verbatim on save; load
// requires architectures matching cfg.
Checkpoint state_to_checkpoint(const TrainerState& state,
                               const TrainConfig& cfg,
                               const std::string& config_text);
TrainerState state_from_checkpoint(const Checkpoint& ckpt,
                                   const TrainConfig& cfg,
                                   const DatasetSpec& dataset);

// Metric row computed from the current state (samples drawn with an rng
// derived from (seed, consumed), leaving the training stream untouched).
RunRecord evaluate(const TrainerState& state, const TrainConfig& cfg,
                   const DatasetSpec& dataset, std::uint64_t wall_ms);

}  // namespace coopinit
