// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "error.hpp"
#include "ica.hpp"
#include "oracles.hpp"

using namespace e2t;

namespace {

EegRecording from_data(const RowMatrix& data) {
  EegRecording r;
  for (Eigen::Index c = 0; c < data.rows(); ++c) r.channels.push_back("c" + std::to_string(c));
  r.data = data;
  r.id = "ica";
  return r;
}

double correlation(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const Eigen::RowVectorXd x = a.array() - a.mean();
  const Eigen::RowVectorXd y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

// Sine, uniform noise and a sparse spike train.
RowMatrix sources(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RowMatrix s(3, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    s(0, i) = std::sin(2 * std::numbers::pi * 7.0 * static_cast<double>(i) / 1000.0);
    s(1, i) = u(rng);
    s(2, i) = (i % 250 < 3) ? 20.0 : 0.0;
  }
  return s;
}

}  // namespace

TEST_CASE("FastICA separates a two-channel sine / noise mixture") {
  const RowMatrix s = sources(4000, 11).topRows(2);
  RowMatrix a(2, 2);
  a << 1.0, 0.6, 0.4, 1.0;
  const auto model = ica::fit_ica(from_data(a * s), 2, 5);
  const RowMatrix x = a * s;
  const RowMatrix est = model.unmixing * (x.colwise() - model.channel_mean);
  // Best matching of estimated to true sources.
  const double direct = std::min(std::abs(correlation(est.row(0), s.row(0))),
                                 std::abs(correlation(est.row(1), s.row(1))));
  const double swapped = std::min(std::abs(correlation(est.row(0), s.row(1))),
                                  std::abs(correlation(est.row(1), s.row(0))));
  CHECK(std::max(direct, swapped) >= 0.95);
  // Unit-variance components.
  for (Eigen::Index i = 0; i < 2; ++i) {
    const Eigen::RowVectorXd c = est.row(i).array() - est.row(i).mean();
    CHECK(std::abs(c.squaredNorm() / static_cast<double>(c.size()) - 1.0) < 1e-6);
  }
}

TEST_CASE("unmixing times mixing is the identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RowMatrix white(4, 2000);
  for (Eigen::Index i = 0; i < white.size(); ++i) white.data()[i] = u(rng);
  const auto model = ica::fit_ica(from_data(white), 4, 9);
  const RowMatrix wa = model.unmixing * model.mixing;
  CHECK((wa - RowMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reconstruction with nothing rejected") {
  const RowMatrix s = sources(3000, 4);
  const RowMatrix a = oracle::random_matrix(3, 3, 8);
  const auto rec = from_data(a * s);
  const auto model = ica::fit_ica(rec, 3, 2);
  const auto out = ica::reject_artifacts(model, rec, std::numeric_limits<double>::infinity());
  CHECK((out.data - rec.data).norm() / rec.data.norm() <= 1e-6);
}

TEST_CASE("spiky component is removed") {
  const RowMatrix s = sources(4000, 6);
  RowMatrix a(3, 3);
  a << 1.0, 0.2, 0.1,  //
      0.3, 1.0, 0.2,   //
      0.2, 0.1, 1.0;   // channel 2 carries the spikes
  const auto rec = from_data(a * s);
  const auto model = ica::fit_ica(rec, 3, 1);
  REQUIRE(ica::artifact_components(model, 5.0).size() == 1);
  const auto out = ica::reject_artifacts(model, rec, 5.0);
  auto var = [](const Eigen::RowVectorXd& v) { return (v.array() - v.mean()).square().mean(); };
  CHECK(var(out.data.row(2)) <= 0.5 * var(rec.data.row(2)));
  CHECK(out.data.rows() == rec.data.rows());
  CHECK(out.data.cols() == rec.data.cols());
}

TEST_CASE("rejecting everything is degenerate") {
  const RowMatrix s = sources(3000, 7);
  const auto rec = from_data(oracle::random_matrix(3, 3, 1) * s);
  const auto model = ica::fit_ica(rec, 3, 1);
  CHECK_THROWS_AS(ica::reject_artifacts(model, rec, 0.0), DegenerateOutputError);
}

TEST_CASE("ICA preconditions, convergence failure and determinism") {
  const RowMatrix s = sources(3000, 9);
  const auto rec = from_data(oracle::random_matrix(3, 3, 2) * s);
  CHECK_THROWS_AS(ica::fit_ica(rec, 4, 1), ParameterError);
  CHECK_THROWS_AS(ica::fit_ica(from_data(oracle::random_matrix(3, 20, 1)), 3, 1), ParameterError);

  try {
    ica::fit_ica(rec, 3, 1, ica::IcaOptions{1, 1e-15});
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations == 1);
  }

  const auto m1 = ica::fit_ica(rec, 3, 42);
  const auto m2 = ica::fit_ica(rec, 3, 42);
  CHECK(m1.unmixing == m2.unmixing);
  CHECK(m1.mixing == m2.mixing);
}
