#include <benchmark/benchmark.h>

#include "coopinit/datasets.hpp"
#include "coopinit/langevin.hpp"
#include "coopinit/metrics.hpp"
#include "coopinit/nn.hpp"
#include "coopinit/trainer.hpp"

using namespace coopinit;

namespace {

Mlp descriptor_net() {
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {64, 64};
  cfg.output_dim = 1;
  cfg.activation = Activation::kLeakyRelu;
  cfg.seed = 42;
  return Mlp(cfg);
}

Eigen::MatrixXd batch_2d(int n) {
  Rng rng(7);
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  return x;
}

void BM_Forward(benchmark::State& state) {
  const Mlp net = descriptor_net();
  const Eigen::MatrixXd x = batch_2d(256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(net, x));
  }
}
BENCHMARK(BM_Forward);

void BM_ParamGrad(benchmark::State& state) {
  const Mlp net = descriptor_net();
  const Eigen::MatrixXd x = batch_2d(256);
  const Eigen::MatrixXd up = Eigen::MatrixXd::Ones(256, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(param_grad(net, x, up));
  }
}
BENCHMARK(BM_ParamGrad);

void BM_InputGradParamGrad(benchmark::State& state) {
  const Mlp net = descriptor_net();
  const Eigen::MatrixXd x = batch_2d(256);
  const Eigen::MatrixXd dirs = batch_2d(256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(input_grad_param_grad(net, x, dirs));
  }
}
BENCHMARK(BM_InputGradParamGrad);

void BM_LangevinChain(benchmark::State& state) {
  const Mlp net = descriptor_net();
  const Eigen::MatrixXd x0 = batch_2d(256);
  LangevinConfig cfg;
  cfg.eta = 1.0;
  cfg.steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(run_chain(net, x0, cfg, rng));
  }
}
BENCHMARK(BM_LangevinChain)->Arg(10);

void BM_EnergyDistance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd x = batch_2d(n);
  const Eigen::MatrixXd y = batch_2d(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_distance(x, y));
  }
}
BENCHMARK(BM_EnergyDistance)->Arg(500)->Arg(2000);

void BM_CoopIteration(benchmark::State& state) {
  TrainConfig cfg;
  cfg.n = 256;
  const DatasetSpec data = DatasetSpec::canonical_ring();
  TrainerState st = make_initial_state(cfg, data);
  for (auto _ : state) {
    const Eigen::MatrixXd real = sample_batch(data, cfg.n, st.rng);
    coop_iteration(st, cfg, real);
  }
}
BENCHMARK(BM_CoopIteration);

void BM_AdvIteration(benchmark::State& state) {
  TrainConfig cfg;
  cfg.n = 256;
  cfg.n_coop = 0;
  const DatasetSpec data = DatasetSpec::canonical_ring();
  TrainerState st = make_initial_state(cfg, data);
  for (auto _ : state) {
    const Eigen::MatrixXd real = sample_batch(data, cfg.n, st.rng);
    adv_iteration(st, cfg, real);
  }
}
BENCHMARK(BM_AdvIteration);

}  // namespace

BENCHMARK_MAIN();
