// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <cmath>

#include "error.hpp"
#include "nn.hpp"
#include "oracles.hpp"

using namespace e2t;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("activations") {
  CHECK(nn::sigmoid(0.0) == 0.5);
  CHECK_THAT(nn::sigmoid(2.0), WithinRel(1.0 / (1.0 + std::exp(-2.0)), 1e-15));
  CHECK(nn::sigmoid(-800.0) >= 0.0);
  CHECK(nn::sigmoid(800.0) == 1.0);
  CHECK(nn::relu(-3.0) == 0.0);
  CHECK(nn::relu(2.5) == 2.5);

  nn::Vec x(3);
  x << 1.0, 2.0, 3.0;
  const nn::Vec p = nn::softmax(x);
  CHECK_THAT(p.sum(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(p[2], WithinRel(std::exp(3.0) / (std::exp(1.0) + std::exp(2.0) + std::exp(3.0)),
                             1e-14));
  nn::Vec big(2);
  big << 1000.0, 1000.0;
  CHECK(nn::softmax(big).isApprox(nn::Vec::Constant(2, 0.5)));

  const nn::Mat m = oracle::random_matrix(4, 5, 9, 10.0);
  const nn::Mat s = nn::softmax_rows(m);
  const nn::Mat ls = nn::log_softmax_rows(m);
  for (Eigen::Index r = 0; r < 4; ++r) CHECK_THAT(s.row(r).sum(), WithinAbs(1.0, 1e-14));
  CHECK((ls.array().exp().matrix() - s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("glorot initialisation") {
  nn::ParamStore a(5), b(5), c(6);
  const auto& wa = a.add_weight("w", 20, 10);
  const auto& wb = b.add_weight("w", 20, 10);
  const auto& wc = c.add_weight("w", 20, 10);
  CHECK(wa.value == wb.value);
  CHECK(wa.value != wc.value);
  const double bound = std::sqrt(6.0 / 30.0);
  for (double v : wa.value) CHECK(std::abs(v) <= bound);
  CHECK(wa.shape == std::vector<std::size_t>{20, 10});
  const auto& z = a.add_zeros("b", {10});
  for (double v : z.value) CHECK(v == 0.0);
  CHECK_THROWS_AS(a.add_zeros("b", {3}), ParameterError);
  CHECK_THROWS_AS(a.at("nope"), ParameterError);
  CHECK(a.num_values() == 210);
}

TEST_CASE("adam update") {
  nn::ParamStore p(1);
  auto& t = p.add_zeros("x", {3});
  t.value = {1.0, -2.0, 0.5};
  t.grad = {0.3, -5.0, 0.0};
  nn::AdamState st;
  nn::adam_update(p, st);
  // First step moves by lr * sign(g) for nonzero g.
  CHECK_THAT(t.value[0], WithinAbs(1.0 - 1e-3, 1e-9));
  CHECK_THAT(t.value[1], WithinAbs(-2.0 + 1e-3, 1e-9));
  CHECK(t.value[2] == 0.5);
  CHECK(st.step == 1);

  // Zero gradient throughout leaves values untouched.
  nn::ParamStore q(1);
  auto& u = q.add_weight("w", 3, 3);
  const auto before = u.value;
  nn::AdamState s2;
  for (int i = 0; i < 5; ++i) nn::adam_update(q, s2);
  CHECK(u.value == before);

  // Minimises a quadratic.
  nn::ParamStore r(1);
  auto& v = r.add_zeros("v", {1});
  v.value = {3.0};
  nn::AdamState s3;
  s3.config.learning_rate = 0.05;
  for (int i = 0; i < 2000; ++i) {
    v.grad = {2.0 * (v.value[0] - 1.0)};
    nn::adam_update(r, s3);
  }
  CHECK_THAT(v.value[0], WithinAbs(1.0, 1e-3));
}

TEST_CASE("seed derivation") {
  CHECK(nn::derive_seed(1, "a") == nn::derive_seed(1, "a"));
  CHECK(nn::derive_seed(1, "a") != nn::derive_seed(1, "b"));
  CHECK(nn::derive_seed(1, "a") != nn::derive_seed(2, "a"));
}

TEST_CASE("checkpoint round trip") {
  nn::ParamStore p(3);
  p.add_weight("layer.weight", 4, 2);
  p.add_zeros("layer.bias", {2});
  const std::string bytes = nn::encode_checkpoint("toy", {1.0, 2.5}, p);
  CHECK(bytes.substr(0, 4) == "NNCK");
  const auto ck = nn::decode_checkpoint(bytes, "mem");
  CHECK(ck.kind == "toy");
  CHECK(ck.meta == std::vector<double>{1.0, 2.5});

  nn::ParamStore q(99);
  q.add_weight("layer.weight", 4, 2);
  q.add_zeros("layer.bias", {2});
  nn::load_parameters(q, ck, "mem");
  CHECK(q.at("layer.weight").value == p.at("layer.weight").value);

  nn::ParamStore wrong(1);
  wrong.add_weight("layer.weight", 2, 4);
  wrong.add_zeros("layer.bias", {2});
  CHECK_THROWS_AS(nn::load_parameters(wrong, ck, "mem"), IngestError);
  nn::ParamStore fewer(1);
  fewer.add_zeros("layer.bias", {2});
  CHECK_THROWS_AS(nn::load_parameters(fewer, ck, "mem"), IngestError);
  CHECK_THROWS_AS(nn::decode_checkpoint(bytes.substr(0, bytes.size() - 1), "mem"),
                  IngestError);
}
