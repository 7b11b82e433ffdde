// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <functional>

#include "error.hpp"
#include "layers.hpp"
#include "oracles.hpp"

using namespace e2t;
using namespace e2t::nn;
using Catch::Matchers::WithinAbs;

namespace {

SeqBatch random_seq(std::size_t steps, std::size_t batch, std::size_t ch, std::uint64_t seed) {
  SeqBatch s(steps, batch, ch);
  s.data = oracle::random_matrix(static_cast<Eigen::Index>(steps * batch),
                                 static_cast<Eigen::Index>(ch), seed);
  return s;
}

// Checks every parameter gradient and the input gradient of a layer
// against central differences on loss = sum(out .* weights).
void check_gradients(ParamStore& params, Mat& input, const std::function<Mat()>& forward,
                     const std::function<Mat(const Mat&)>& backward) {
  const Mat out0 = forward();
  const Mat weights = oracle::random_matrix(out0.rows(), out0.cols(), 1234);
  const auto loss = [&] { return forward().cwiseProduct(weights).sum(); };

  params.zero_grad();
  const Mat dx = backward(weights);

  for (auto& [name, t] : params.tensors()) {
    INFO("parameter " << name);
    const auto num = oracle::numeric_gradient(t.value, loss);
    CHECK(oracle::relative_error(t.grad, num) < 1e-6);
  }
  std::vector<double> xs(input.data(), input.data() + input.size());
  const auto num = oracle::numeric_gradient(xs, [&] {
    std::copy(xs.begin(), xs.end(), input.data());
    return loss();
  });
  std::copy(xs.begin(), xs.end(), input.data());
  std::vector<double> ana(dx.data(), dx.data() + dx.size());
  CHECK(oracle::relative_error(ana, num) < 1e-6);
}

}  // namespace

TEST_CASE("dense closed form") {
  ParamStore p(0);
  Dense d(p, "d", 2, 1);
  p.at("d.weight").value = {1.0, 1.0};
  p.at("d.bias").value = {0.5};
  Mat x(1, 2);
  x << 1.0, 2.0;
  CHECK(d.forward(x)(0, 0) == 3.5);
  CHECK_THROWS_AS(d.forward(Mat::Zero(1, 3)), ParameterError);
}

TEST_CASE("dense gradients") {
  ParamStore p(2);
  Dense d(p, "d", 4, 3);
  p.at("d.bias").value = {0.1, -0.2, 0.3};
  Mat x = oracle::random_matrix(5, 4, 3);
  check_gradients(
      p, x, [&] { return d.forward(x); }, [&](const Mat& dy) { return d.backward(x, dy); });
}

TEST_CASE("gru with zero parameters stays at zero") {
  ParamStore p(0);
  Gru g(p, "g", 3, 4);
  for (auto& [n, t] : p.tensors()) std::fill(t.value.begin(), t.value.end(), 0.0);
  const SeqBatch x = random_seq(6, 2, 3, 1);
  const SeqBatch h = g.forward(x, nullptr);
  CHECK(h.data.cwiseAbs().maxCoeff() == 0.0);
  // Candidate bias 1 only: h_t = 0.5 h_{t-1} + 0.5 tanh(1).
  auto& b = p.at("g.bias").value;
  for (std::size_t i = 8; i < 12; ++i) b[i] = 1.0;
  const SeqBatch h2 = g.forward(x, nullptr);
  double expect = 0.0;
  for (std::size_t t = 0; t < 6; ++t) {
    expect = 0.5 * expect + 0.5 * std::tanh(1.0);
    CHECK_THAT(h2.step(t)(1, 2), WithinAbs(expect, 1e-15));
  }
}

TEST_CASE("gru forward agrees with step") {
  ParamStore p(4);
  Gru g(p, "g", 3, 5);
  const SeqBatch x = random_seq(7, 3, 3, 2);
  const SeqBatch h = g.forward(x, nullptr);
  Mat state = Mat::Zero(3, 5);
  for (std::size_t t = 0; t < 7; ++t) {
    state = g.step(x.step(t), state);
    CHECK((state - h.step(t)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("gru gradients") {
  ParamStore p(5);
  Gru g(p, "g", 3, 4);
  for (double& v : p.at("g.bias").value) v = 0.1;
  SeqBatch x = random_seq(5, 2, 3, 6);
  check_gradients(
      p, x.data, [&] { return g.forward(x, nullptr).data; },
      [&](const Mat& dy) {
        GruCache cache;
        const SeqBatch h = g.forward(x, &cache);
        SeqBatch d(h.steps, h.batch, h.channels());
        d.data = dy;
        return g.backward(cache, d).data;
      });
}

TEST_CASE("tcn block gradients") {
  for (std::size_t out : {3u, 4u}) {
    for (std::size_t dil : {1u, 2u}) {
      ParamStore p(7);
      TcnBlock blk(p, "t", 3, out, 3, dil);
      for (auto& [n, t] : p.tensors())
        if (n.find("bias") != std::string::npos) std::fill(t.value.begin(), t.value.end(), 0.05);
      SeqBatch x = random_seq(5, 2, 3, 8);
      check_gradients(
          p, x.data, [&] { return blk.forward(x, nullptr).data; },
          [&](const Mat& dy) {
            TcnCache cache;
            const SeqBatch y = blk.forward(x, &cache);
            SeqBatch d(y.steps, y.batch, y.channels());
            d.data = dy;
            return blk.backward(cache, d).data;
          });
    }
  }
}

TEST_CASE("tcn block is causal") {
  ParamStore p(9);
  TcnBlock blk(p, "t", 3, 4, 3, 2);
  SeqBatch x = random_seq(10, 1, 3, 10);
  const SeqBatch y0 = blk.forward(x, nullptr);
  x.step(6).setConstant(42.0);
  const SeqBatch y1 = blk.forward(x, nullptr);
  for (std::size_t t = 0; t < 6; ++t) CHECK(y0.step(t) == y1.step(t));
  CHECK(y0.step(6) != y1.step(6));
}

TEST_CASE("pack, unpack and average pooling") {
  const RowMatrix a = oracle::random_matrix(4, 3, 1);
  const RowMatrix b = oracle::random_matrix(4, 3, 2);
  const SeqBatch s = SeqBatch::pack({&a, &b});
  CHECK(s.steps == 4);
  CHECK(s.batch == 2);
  CHECK(s.unpack(1) == b);
  const Mat pooled = avg_pool_time(s);
  CHECK((pooled.row(0) - a.colwise().mean()).cwiseAbs().maxCoeff() < 1e-15);
  const SeqBatch back = avg_pool_time_backward(Mat::Ones(2, 3), 4);
  CHECK((back.data.array() - 0.25).abs().maxCoeff() < 1e-15);
  const RowMatrix c = oracle::random_matrix(5, 3, 2);
  CHECK_THROWS_AS(SeqBatch::pack({&a, &c}), ParameterError);
}

TEST_CASE("dropout mask") {
  std::mt19937_64 rng(3);
  const Mat m = dropout_mask(200, 100, 0.2, rng);
  const double kept = (m.array() > 0).cast<double>().mean();
  CHECK_THAT(kept, WithinAbs(0.8, 0.01));
  CHECK_THAT(m.mean(), WithinAbs(1.0, 0.02));
  for (Eigen::Index i = 0; i < m.size(); ++i)
    CHECK((m.data()[i] == 0.0 || m.data()[i] == 1.25));
  std::mt19937_64 r0(3);
  CHECK(dropout_mask(3, 3, 0.0, r0) == Mat::Ones(3, 3));
  CHECK_THROWS_AS(dropout_mask(1, 1, 1.0, rng), ParameterError);
}
