#include <cmath>

#include "doctest.h"

#include "neural.hpp"

using namespace mamimo;

TEST_CASE("creation produces the declared shapes and bounded init") {
  Rng rng(1);
  const Mlp net = Mlp::create({3, 8, 8, 2}, Head::kTanh, rng);
  REQUIRE(net.layers() == 3);
  CHECK(net.input_dim() == 3);
  CHECK(net.output_dim() == 2);
  CHECK(net.w[0].rows() == 8);
  CHECK(net.w[0].cols() == 3);
  CHECK(net.w[2].rows() == 2);
  CHECK(net.b[2].size() == 2);
  CHECK(parameter_count(net) == 3 * 8 + 8 + 8 * 8 + 8 + 8 * 2 + 2);
  // Hidden layers: uniform +-1/sqrt(fan_in); output layer: uniform +-3e-3.
  CHECK(net.w[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(3.0));
  CHECK(net.w[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
  CHECK(net.w[2].cwiseAbs().maxCoeff() <= 3e-3);
  CHECK(net.b[2].cwiseAbs().maxCoeff() <= 3e-3);
  CHECK(net.w[2].cwiseAbs().maxCoeff() > 0.0);
  // Same seed, same parameters; different seed, different parameters.
  Rng rng2(1);
  const Mlp net2 = Mlp::create({3, 8, 8, 2}, Head::kTanh, rng2);
  CHECK((net.w[0] - net2.w[0]).cwiseAbs().maxCoeff() == 0.0);
  Rng rng3(2);
  const Mlp net3 = Mlp::create({3, 8, 8, 2}, Head::kTanh, rng3);
  CHECK((net.w[0] - net3.w[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("tanh head is bounded, identity head is not clipped") {
  Rng rng(5);
  const Mlp actor = Mlp::create({4, 16, 16, 3}, Head::kTanh, rng);
  RVector x(4);
  x << 100.0, -100.0, 50.0, -50.0;
  const RVector y = forward(actor, x);
  for (int i = 0; i < 3; ++i) {
    CHECK(y[i] <= 1.0);
    CHECK(y[i] >= -1.0);
  }
  const Mlp critic = Mlp::create({4, 16, 16, 1}, Head::kIdentity, rng);
  // Identity output equals the last pre-activation.
  ForwardCache cache;
  const RMatrix out = forward(critic, RMatrix(x), &cache);
  CHECK(out(0, 0) == doctest::Approx(cache.pre.back()(0, 0)).epsilon(1e-15));
}

TEST_CASE("batched forward equals per-column forward") {
  Rng rng(7);
  const Mlp net = Mlp::create({3, 6, 2}, Head::kTanh, rng);
  RMatrix x(3, 4);
  Rng data(8);
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 3; ++r) x(r, c) = data.gaussian();
  const RMatrix y = forward(net, x);
  for (int c = 0; c < 4; ++c) {
    const RVector yc = forward(net, RVector(x.col(c)));
    CHECK((y.col(c) - yc).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("backward matches finite differences on both heads") {
  // The release-gate validation runs a larger version of this check; this is
  // the quick per-build variant.
  Rng rng(9);
  for (const Head head : {Head::kTanh, Head::kIdentity}) {
    Mlp net = Mlp::create({2, 5, 3}, head, rng);
    RMatrix x(2, 2);
    x << 0.3, -0.8, 1.1, 0.4;
    RMatrix upstream(3, 2);
    upstream << 0.5, -0.2, 1.0, 0.7, -0.4, 0.1;

    ForwardCache cache;
    forward(net, x, &cache);
    const Gradients g = backward(net, cache, upstream);

    const auto objective = [&]() {
      return upstream.cwiseProduct(forward(net, x)).sum();
    };
    const double h = 1e-6;
    double worst = 0.0;
    for (int l = 0; l < net.layers(); ++l) {
      for (Eigen::Index r = 0; r < net.w[l].rows(); ++r)
        for (Eigen::Index c = 0; c < net.w[l].cols(); ++c) {
          const double keep = net.w[l](r, c);
          net.w[l](r, c) = keep + h;
          const double fp = objective();
          net.w[l](r, c) = keep - h;
          const double fm = objective();
          net.w[l](r, c) = keep;
          const double fd = (fp - fm) / (2.0 * h);
          worst = std::max(worst,
                           std::abs(fd - g.w[l](r, c)) / std::max(1.0, std::abs(fd)));
        }
    }
    CHECK(worst < 1e-6);
    // Input gradient too (used by the actor update through the critic).
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double keep = x(r, 0);
      x(r, 0) = keep + h;
      const double fp = objective();
      x(r, 0) = keep - h;
      const double fm = objective();
      x(r, 0) = keep;
      const double fd = (fp - fm) / (2.0 * h);
      CHECK(std::abs(fd - g.input(r, 0)) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("preactivation upstream bypasses the output head") {
  // Feeding the gradient at the final logits of a tanh network must give the
  // same parameter gradients as the ordinary path through an identity head
  // with the same weights (the logits objective never sees the squash).
  Rng rng(21);
  const Mlp net = Mlp::create({3, 6, 2}, Head::kTanh, rng);
  Mlp plain = net;
  plain.head = Head::kIdentity;

  RMatrix x(3, 4);
  x << 0.4, -1.2, 0.9, 0.1, -0.3, 0.8, -0.5, 1.4, 0.7, 0.2, -1.1, 0.6;
  RMatrix upstream(2, 4);
  upstream << 0.5, -0.2, 1.0, 0.3, 0.7, -0.4, 0.1, -0.9;

  ForwardCache squash_cache, plain_cache;
  forward(net, x, &squash_cache);
  forward(plain, x, &plain_cache);

  const Gradients a = backward(net, squash_cache, upstream, true);
  const Gradients b = backward(plain, plain_cache, upstream);
  for (int l = 0; l < net.layers(); ++l) {
    CHECK((a.w[l] - b.w[l]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.b[l] - b.b[l]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((a.input - b.input).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("first Adam step moves every parameter by about the learning rate") {
  // With gradient 1 everywhere: m_hat = 1, v_hat = 1, so the step is
  // -lr / (1 + eps) regardless of the gradient's scale.
  Rng rng(11);
  Mlp net = Mlp::create({2, 3, 1}, Head::kIdentity, rng);
  AdamState opt = AdamState::create(net, 0.01);
  Gradients g;
  for (int l = 0; l < net.layers(); ++l) {
    g.w.push_back(RMatrix::Ones(net.w[l].rows(), net.w[l].cols()));
    g.b.push_back(RVector::Ones(net.b[l].size()));
  }
  const RMatrix w0 = net.w[0];
  adam_step(opt, net, g);
  CHECK(opt.step == 1);
  const RMatrix delta = net.w[0] - w0;
  for (Eigen::Index r = 0; r < delta.rows(); ++r)
    for (Eigen::Index c = 0; c < delta.cols(); ++c)
      CHECK(std::abs(delta(r, c) + 0.01) < 1e-9);
}

TEST_CASE("zero learning rate leaves parameters bit-identical") {
  Rng rng(13);
  Mlp net = Mlp::create({2, 4, 1}, Head::kIdentity, rng);
  AdamState opt = AdamState::create(net, 0.0);
  Gradients g;
  Rng gr(14);
  for (int l = 0; l < net.layers(); ++l) {
    RMatrix gw(net.w[l].rows(), net.w[l].cols());
    for (Eigen::Index r = 0; r < gw.rows(); ++r)
      for (Eigen::Index c = 0; c < gw.cols(); ++c) gw(r, c) = gr.gaussian();
    g.w.push_back(gw);
    g.b.push_back(RVector::Ones(net.b[l].size()));
  }
  const RMatrix w0 = net.w[0];
  const RVector b1 = net.b[1];
  adam_step(opt, net, g);
  adam_step(opt, net, g);
  CHECK((net.w[0] - w0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((net.b[1] - b1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft_update blends toward the online network") {
  Rng rng(15);
  const Mlp online = Mlp::create({2, 3, 1}, Head::kIdentity, rng);
  Mlp target = Mlp::create({2, 3, 1}, Head::kIdentity, rng);
  const RMatrix before = target.w[0];
  soft_update(target, online, 0.25);
  const RMatrix expected = 0.25 * online.w[0] + 0.75 * before;
  CHECK((target.w[0] - expected).cwiseAbs().maxCoeff() < 1e-15);
  // tau = 1 copies outright.
  soft_update(target, online, 1.0);
  CHECK((target.w[0] - online.w[0]).cwiseAbs().maxCoeff() == 0.0);

  Mlp other = Mlp::create({2, 4, 1}, Head::kIdentity, rng);
  CHECK_THROWS_AS(soft_update(other, online, 0.5), Error);
}

TEST_CASE("head names round-trip and reject junk") {
  CHECK(head_from_name(head_name(Head::kTanh)) == Head::kTanh);
  CHECK(head_from_name(head_name(Head::kIdentity)) == Head::kIdentity);
  CHECK_THROWS_AS(head_from_name("relu6"), Error);
}
