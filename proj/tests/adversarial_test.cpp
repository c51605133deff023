#include <doctest.h>

#include <cmath>

#include "coopinit/adversarial.hpp"
#include "support/test_util.hpp"

using namespace coopinit;
using coopinit::test::finite_diff;
using coopinit::test::max_rel_error;
using coopinit::test::random_batch;
using coopinit::test::random_net;

namespace {

Descriptor random_descriptor(Rng& rng, int dim = 2, Activation act = Activation::kLeakyRelu) {
  return Descriptor(random_net(rng, dim, 1, act));
}

Descriptor zero_descriptor(int dim = 2) {
  Rng rng(0);
  Mlp net = random_net(rng, dim, 1, Activation::kLeakyRelu);
  net.params().setZero();
  return Descriptor(std::move(net));
}

// Positive-orthant linear descriptor: score(x) = w . x for x > 0.
Descriptor linear_descriptor(double w0, double w1) {
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {2};
  cfg.output_dim = 1;
  cfg.activation = Activation::kLeakyRelu;
  Mlp net(cfg);
  net.params().setZero();
  net.weight(0).setIdentity();
  net.weight(1) << w0, w1;
  return Descriptor(std::move(net));
}

Generator small_generator(std::uint64_t seed) {
  MlpConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dims = {8};
  cfg.output_dim = 2;
  cfg.activation = Activation::kTanh;
  cfg.seed = seed;
  return Generator(Mlp(cfg), LatentPrior{4});
}

AdversarialConfig config_for(AdvLossKind kind) {
  AdversarialConfig cfg;
  cfg.loss_kind = kind;
  return cfg;
}

constexpr AdvLossKind kAllKinds[] = {AdvLossKind::kNs, AdvLossKind::kHinge,
                                     AdvLossKind::kWas, AdvLossKind::kWasGp};

}  // namespace

TEST_CASE("config invariants") {
  AdversarialConfig cfg;
  cfg.gamma = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  cfg = AdversarialConfig{};
  cfg.loss_kind = AdvLossKind::kWasGp;
  cfg.lambda_gp = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
}

TEST_CASE("zero-logit closed forms") {
  Descriptor d = zero_descriptor();
  Rng rng(1);
  const Eigen::MatrixXd real = random_batch(rng, 8, 2);
  const Eigen::MatrixXd fake = random_batch(rng, 8, 2);

  const LossGrad ns = d_loss(config_for(AdvLossKind::kNs), d, real, fake, rng);
  CHECK(std::abs(ns.loss - 2.0 * std::log(2.0)) < 1e-12);

  const LossGrad hinge =
      d_loss(config_for(AdvLossKind::kHinge), d, real, fake, rng);
  CHECK(std::abs(hinge.loss - 2.0) < 1e-12);

  const Generator g = small_generator(2);
  const Eigen::MatrixXd z = random_batch(rng, 8, 4);
  const LossGrad gl = g_loss(config_for(AdvLossKind::kNs), d, g, z);
  CHECK(std::abs(gl.loss - std::log(2.0)) < 1e-12);
}

TEST_CASE("wasserstein loss cancels on identical batches") {
  Rng rng(3);
  Descriptor d = random_descriptor(rng);
  const Eigen::MatrixXd batch = random_batch(rng, 6, 2);
  const LossGrad was = d_loss(config_for(AdvLossKind::kWas), d, batch, batch, rng);
  CHECK(was.loss == 0.0);
  CHECK(was.grad.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hinge and wasserstein generator losses coincide") {
  Rng rng(4);
  Descriptor d = random_descriptor(rng);
  const Generator g = small_generator(5);
  const Eigen::MatrixXd z = random_batch(rng, 10, 4);
  const LossGrad a = g_loss(config_for(AdvLossKind::kHinge), d, g, z);
  const LossGrad b = g_loss(config_for(AdvLossKind::kWas), d, g, z);
  CHECK(a.loss == b.loss);
  CHECK(a.grad == b.grad);
}

TEST_CASE("gradient-penalty value on a linear descriptor") {
  // ||grad_x score|| is the final-layer weight norm everywhere on the
  // positive orthant: unit norm gives zero penalty, norm 2 gives lambda.
  Rng rng(6);
  Eigen::MatrixXd real = random_batch(rng, 8, 2).cwiseAbs();
  Eigen::MatrixXd fake = random_batch(rng, 8, 2).cwiseAbs();
  real.array() += 0.1;
  fake.array() += 0.1;

  AdversarialConfig cfg = config_for(AdvLossKind::kWasGp);
  cfg.lambda_gp = 10.0;

  Descriptor unit = linear_descriptor(0.6, 0.8);  // ||w|| = 1
  Rng r1(7);
  const double was_only =
      d_loss_from_logits(AdvLossKind::kWas, score(unit, real), score(unit, fake));
  const LossGrad with_gp = d_loss(cfg, unit, real, fake, r1);
  CHECK(std::abs(with_gp.loss - was_only) < 1e-12);

  Descriptor two = linear_descriptor(1.2, 1.6);  // ||w|| = 2
  Rng r2(8);
  const double was_two =
      d_loss_from_logits(AdvLossKind::kWas, score(two, real), score(two, fake));
  const LossGrad with_gp_two = d_loss(cfg, two, real, fake, r2);
  CHECK(std::abs(with_gp_two.loss - (was_two + 10.0)) < 1e-12);
}

TEST_CASE("r1 penalty: constant and linear descriptors") {
  Descriptor constant = zero_descriptor();
  Rng rng(9);
  const Eigen::MatrixXd batch = random_batch(rng, 5, 2);
  const LossGrad zero = r1_penalty(constant, batch);
  CHECK(zero.loss == 0.0);
  CHECK(zero.grad.cwiseAbs().maxCoeff() == 0.0);

  Descriptor linear = linear_descriptor(0.3, -0.4);
  Eigen::MatrixXd pos = random_batch(rng, 5, 2).cwiseAbs();
  pos.array() += 0.1;
  const LossGrad lin = r1_penalty(linear, pos);
  CHECK(lin.loss == doctest::Approx(0.3 * 0.3 + 0.4 * 0.4).epsilon(1e-12));
}

TEST_CASE("r1 parameter gradient matches finite differences") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Activation act =
        trial % 2 == 0 ? Activation::kLeakyRelu : Activation::kTanh;
    Descriptor d = random_descriptor(rng, 2, act);
    const Eigen::MatrixXd batch = random_batch(rng, 4, 2);
    const LossGrad got = r1_penalty(d, batch);
    const Eigen::VectorXd fd = finite_diff(
        [&](const Eigen::VectorXd& p) {
          Descriptor probe = d;
          probe.net.params() = p;
          return r1_penalty(probe, batch).loss;
        },
        d.net.params());
    CHECK(max_rel_error(got.grad, fd) < 1e-4);
  }
}

TEST_CASE("d_loss gradients match finite differences for every kind") {
  Rng rng(11);
  for (AdvLossKind kind : kAllKinds) {
    for (int trial = 0; trial < 5; ++trial) {
      const Activation act =
          trial % 2 == 0 ? Activation::kLeakyRelu : Activation::kTanh;
      Descriptor d = random_descriptor(rng, 2, act);
      const Eigen::MatrixXd real = random_batch(rng, 4, 2);
      const Eigen::MatrixXd fake = random_batch(rng, 4, 2);
      AdversarialConfig cfg = config_for(kind);
      if (kind == AdvLossKind::kNs) cfg.gamma = trial % 2 == 0 ? 0.0 : 0.3;

      const Rng rng_at_call(1234 + trial);  // frozen interpolation draws
      Rng r_analytic = rng_at_call;
      const LossGrad got = d_loss(cfg, d, real, fake, r_analytic);
      const Eigen::VectorXd fd = finite_diff(
          [&](const Eigen::VectorXd& p) {
            Descriptor probe = d;
            probe.net.params() = p;
            Rng r = rng_at_call;
            return d_loss(cfg, probe, real, fake, r).loss;
          },
          d.net.params());
      CHECK(max_rel_error(got.grad, fd) < 1e-4);
    }
  }
}

TEST_CASE("g_loss gradients match finite differences for every kind") {
  Rng rng(12);
  for (AdvLossKind kind : kAllKinds) {
    for (int trial = 0; trial < 5; ++trial) {
      Descriptor d = random_descriptor(rng);
      Generator g = small_generator(rng.next_u64());
      const Eigen::MatrixXd z = random_batch(rng, 4, 4);
      const AdversarialConfig cfg = config_for(kind);
      const LossGrad got = g_loss(cfg, d, g, z);
      const Eigen::VectorXd fd = finite_diff(
          [&](const Eigen::VectorXd& p) {
            Generator probe = g;
            probe.net.params() = p;
            return g_loss(cfg, d, probe, z).loss;
          },
          g.net.params());
      CHECK(max_rel_error(got.grad, fd) < 1e-4);
    }
  }
}

TEST_CASE("g_loss leaves descriptor parameters untouched") {
  Rng rng(13);
  Descriptor d = random_descriptor(rng);
  Generator g = small_generator(14);
  const Eigen::VectorXd theta_before = d.net.params();
  g_loss(config_for(AdvLossKind::kNs), d, g, random_batch(rng, 6, 4));
  CHECK(d.net.params() == theta_before);
}

TEST_CASE("non-saturating gradient stays alive for very negative logits") {
  // At fake logit -20 the per-logit slope of the ns generator loss is
  // sigmoid(20) ~ 1; the saturating alternative would be e^-20.
  Eigen::VectorXd s(1);
  s << -20.0;
  const double h = 1e-6;
  Eigen::VectorXd sp(1), sm(1);
  sp << -20.0 + h;
  sm << -20.0 - h;
  const double slope = (g_loss_from_logits(AdvLossKind::kNs, sp) -
                        g_loss_from_logits(AdvLossKind::kNs, sm)) /
                       (2.0 * h);
  CHECK(std::abs(slope + 1.0) < 1e-6);  // d/ds mean softplus(-s) = -sigmoid(-s)
}

TEST_CASE("d losses fall when real logits rise and rise when fake logits rise") {
  Rng rng(15);
  for (AdvLossKind kind : kAllKinds) {
    Eigen::VectorXd s_real(3), s_fake(3);
    for (int i = 0; i < 3; ++i) {
      s_real[i] = 0.5 * rng.normal();
      s_fake[i] = 0.5 * rng.normal();
    }
    const double base = d_loss_from_logits(kind, s_real, s_fake);
    Eigen::VectorXd up_real = s_real;
    up_real.array() += 1e-3;
    CHECK(d_loss_from_logits(kind, up_real, s_fake) < base);
    Eigen::VectorXd up_fake = s_fake;
    up_fake.array() += 1e-3;
    CHECK(d_loss_from_logits(kind, s_real, up_fake) > base);
  }
}

TEST_CASE("interpolation points stay on the segment") {
  Rng rng(16);
  const Eigen::MatrixXd real = random_batch(rng, 50, 2);
  const Eigen::MatrixXd fake = random_batch(rng, 50, 2);
  const Eigen::MatrixXd mixed = interpolate_pairs(real, fake, rng);
  for (int i = 0; i < mixed.rows(); ++i) {
    for (int j = 0; j < 2; ++j) {
      const double lo = std::min(real(i, j), fake(i, j));
      const double hi = std::max(real(i, j), fake(i, j));
      CHECK(mixed(i, j) >= lo - 1e-12);
      CHECK(mixed(i, j) <= hi + 1e-12);
    }
  }
  CHECK_THROWS_AS(interpolate_pairs(real, random_batch(rng, 49, 2), rng),
                  ContractError);
}

TEST_CASE("empty batches are rejected") {
  Rng rng(17);
  Descriptor d = random_descriptor(rng);
  const Eigen::MatrixXd batch = random_batch(rng, 3, 2);
  Rng r(0);
  CHECK_THROWS_AS(
      d_loss(config_for(AdvLossKind::kNs), d, Eigen::MatrixXd(0, 2), batch, r),
      ContractError);
  CHECK_THROWS_AS(r1_penalty(d, Eigen::MatrixXd(0, 2)), ContractError);
}
