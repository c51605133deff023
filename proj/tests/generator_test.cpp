#include <doctest.h>

#include <cmath>

#include "coopinit/generator.hpp"
#include "support/test_util.hpp"

using namespace coopinit;
using coopinit::test::finite_diff;
using coopinit::test::max_rel_error;
using coopinit::test::random_batch;
using coopinit::test::random_net;

namespace {

Generator make_generator(std::uint64_t seed, int z_dim = 4, int out_dim = 2) {
  MlpConfig cfg;
  cfg.input_dim = z_dim;
  cfg.hidden_dims = {8, 8};
  cfg.output_dim = out_dim;
  cfg.activation = Activation::kTanh;
  cfg.seed = seed;
  return Generator(Mlp(cfg), LatentPrior{z_dim});
}

}  // namespace

TEST_CASE("generator checks latent dimension agreement") {
  Rng rng(1);
  Mlp net = random_net(rng, 4, 2, Activation::kTanh);
  CHECK_THROWS_AS(Generator(std::move(net), LatentPrior{5}), ContractError);
}

TEST_CASE("latent sampler: shape, determinism, moments") {
  Generator g = make_generator(2, 6);
  Rng a(10), b(10);
  const Eigen::MatrixXd z1 = sample_latents(g, 100'000, a);
  CHECK(z1.rows() == 100'000);
  CHECK(z1.cols() == 6);
  const Eigen::MatrixXd z2 = sample_latents(g, 100'000, b);
  CHECK(z1 == z2);
  CHECK_THROWS_AS(sample_latents(g, 0, a), ContractError);

  for (int j = 0; j < 6; ++j) {
    const double mean = z1.col(j).mean();
    const double var = z1.col(j).squaredNorm() / z1.rows() - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 0.01);
  }
}

TEST_CASE("generate is a pure forward map") {
  Generator g = make_generator(3);
  Rng rng(11);
  const Eigen::MatrixXd z = sample_latents(g, 5, rng);
  CHECK(generate(g, z) == generate(g, z));
  CHECK_THROWS_AS(generate(g, random_batch(rng, 5, 7)), ShapeError);

  Generator zeros = make_generator(4);
  zeros.net.params().setZero();
  CHECK(generate(zeros, z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("teaching loss vanishes at the fixed point") {
  Generator g = make_generator(5);
  Rng rng(12);
  const Eigen::MatrixXd z = sample_latents(g, 6, rng);
  const Eigen::MatrixXd revised = generate(g, z);
  const TeachingLossGrad t = teaching_loss_grad(g, z, revised);
  CHECK(t.loss == 0.0);
  CHECK(t.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("teaching loss rejects mismatched shapes") {
  Generator g = make_generator(6);
  Rng rng(13);
  const Eigen::MatrixXd z = sample_latents(g, 6, rng);
  CHECK_THROWS_AS(teaching_loss_grad(g, z, random_batch(rng, 5, 2)),
                  ShapeError);
  CHECK_THROWS_AS(teaching_loss_grad(g, z, random_batch(rng, 6, 3)),
                  ShapeError);
}

TEST_CASE("one-sample linear generator has the analytic gradient") {
  // Identity passthrough on the positive orthant makes G(z) = W z; the
  // squared-error gradient for one sample is then 2 (W z - target) z^T.
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {2};
  cfg.output_dim = 1;
  cfg.activation = Activation::kLeakyRelu;
  Mlp net(cfg);
  net.params().setZero();
  net.weight(0).setIdentity();
  net.weight(1) << 0.4, 0.6;
  Generator g(std::move(net), LatentPrior{2});

  Eigen::MatrixXd z(1, 2), target(1, 1);
  z << 2.0, 1.0;  // positive, keeps the hidden layer in its linear regime
  target << 5.0;
  const TeachingLossGrad t = teaching_loss_grad(g, z, target);
  const double produced = 0.4 * 2.0 + 0.6 * 1.0;
  CHECK(t.loss == doctest::Approx(std::pow(produced - 5.0, 2)).epsilon(1e-12));
  const auto& s = g.net.layer(1);
  CHECK(t.grad[s.weight_offset + 0] ==
        doctest::Approx(2.0 * (produced - 5.0) * 2.0).epsilon(1e-10));
  CHECK(t.grad[s.weight_offset + 1] ==
        doctest::Approx(2.0 * (produced - 5.0) * 1.0).epsilon(1e-10));
}

TEST_CASE("teaching gradient matches finite differences") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    Generator g = make_generator(rng.next_u64());
    const Eigen::MatrixXd z = random_batch(rng, 4, 4);
    const Eigen::MatrixXd revised = random_batch(rng, 4, 2);
    const TeachingLossGrad t = teaching_loss_grad(g, z, revised);
    const Eigen::VectorXd fd = finite_diff(
        [&](const Eigen::VectorXd& p) {
          Generator probe = g;
          probe.net.params() = p;
          return teaching_loss_grad(probe, z, revised).loss;
        },
        g.net.params());
    CHECK(max_rel_error(t.grad, fd) < 1e-4);
  }
}

TEST_CASE("a small Adam step strictly decreases the teaching loss") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    Generator g = make_generator(rng.next_u64());
    const Eigen::MatrixXd z = random_batch(rng, 8, 4);
    const Eigen::MatrixXd revised = random_batch(rng, 8, 2);
    const TeachingLossGrad before = teaching_loss_grad(g, z, revised);
    AdamState opt = AdamState::for_param_count(g.net.param_count(), 1e-4);
    adam_step(opt, g.net.params(), before.grad);
    const TeachingLossGrad after = teaching_loss_grad(g, z, revised);
    CHECK(after.loss < before.loss);
  }
}
