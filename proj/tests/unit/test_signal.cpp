// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "oracles.hpp"
#include "signal.hpp"

using namespace e2t;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> sine(double f, double fs, std::size_t n, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return x;
}

double tail_peak(const std::vector<double>& y, std::size_t n_tail) {
  double m = 0;
  for (std::size_t i = y.size() - n_tail; i < y.size(); ++i) m = std::max(m, std::abs(y[i]));
  return m;
}

EegRecording recording(const RowMatrix& data, double fs = 1000.0) {
  EegRecording r;
  for (Eigen::Index c = 0; c < data.rows(); ++c) r.channels.push_back("c" + std::to_string(c));
  r.data = data;
  r.sample_rate_hz = fs;
  r.id = "r";
  r.transcript = "t";
  return r;
}

}  // namespace

TEST_CASE("bandpass coefficients match a reference Butterworth design") {
  // Frozen from an independent Butterworth implementation (2nd-order band
  // design, 0.1-70 Hz at 1 kHz).
  const std::vector<double> b_ref{0.036483369252988104, 0.0, -0.07296673850597621, 0.0,
                                  0.036483369252988104};
  const std::vector<double> a_ref{1.0, -3.391260004255191, 4.320319724930037,
                                  -2.4667294659623353, 0.5376698030620064};
  const auto f = signal::design_bandpass(0.1, 70.0, 1000.0);
  REQUIRE(f.b.size() == 5);
  REQUIRE(f.a.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK_THAT(f.b[i], WithinAbs(b_ref[i], 1e-12));
    CHECK_THAT(f.a[i], WithinAbs(a_ref[i], 1e-12));
  }
  CHECK(f.design.order == 4);
  CHECK(signal::is_stable(f));
}

TEST_CASE("notch coefficients match the reference second-order notch") {
  const std::vector<double> b_ref{0.9937559649536571, -1.8479418578501994, 0.9937559649536571};
  const std::vector<double> a_ref{1.0, -1.8479418578501994, 0.9875119299073143};
  const auto f = signal::design_notch(60.0, 30.0, 1000.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK_THAT(f.b[i], WithinAbs(b_ref[i], 1e-12));
    CHECK_THAT(f.a[i], WithinAbs(a_ref[i], 1e-12));
  }
  CHECK(signal::is_stable(f));
}

TEST_CASE("bandpass frequency response") {
  const auto f = signal::design_bandpass(0.1, 70.0, 1000.0);
  CHECK_THAT(std::abs(signal::frequency_response(f, 10.0, 1000.0)),
             WithinAbs(0.9998537682135336, 1e-9));
  CHECK_THAT(std::abs(signal::frequency_response(f, 200.0, 1000.0)),
             WithinAbs(0.0939945767648413, 1e-9));
  CHECK(std::abs(signal::frequency_response(f, 0.0, 1000.0)) < 1e-12);
  // Geometric-mean passband frequency within 1 dB.
  const double g = std::abs(signal::frequency_response(f, std::sqrt(0.1 * 70.0), 1000.0));
  CHECK(g > std::pow(10.0, -1.0 / 20.0));
  // Independent evaluation from the coefficients agrees.
  CHECK_THAT(oracle::response_magnitude(f.b, f.a, 37.0, 1000.0),
             WithinAbs(std::abs(signal::frequency_response(f, 37.0, 1000.0)), 1e-12));
}

TEST_CASE("bandpass time-domain behaviour") {
  const auto f = signal::design_bandpass(0.1, 70.0, 1000.0);
  SECTION("DC is removed") {
    // The 0.1 Hz edge settles slowly; 120 s is ample.
    const auto y = signal::filter_samples(f, std::vector<double>(120000, 5.0));
    CHECK(tail_peak(y, 1000) < 1e-3);
  }
  SECTION("10 Hz passes within 1 dB") {
    const auto y = signal::filter_samples(f, sine(10.0, 1000.0, 60000));
    const double amp = tail_peak(y, 1000);
    CHECK(amp >= 0.89);
    CHECK(amp <= 1.0);
  }
  SECTION("200 Hz is attenuated") {
    const auto y = signal::filter_samples(f, sine(200.0, 1000.0, 5000));
    CHECK(tail_peak(y, 1000) <= 0.35);
  }
  SECTION("matches a naive difference equation") {
    std::vector<double> x(3000);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::sin(2 * std::numbers::pi * 10 * i / 1000.0) +
             0.5 * std::cos(2 * std::numbers::pi * 60 * i / 1000.0);
    const auto y = signal::filter_samples(f, x);
    const auto ref = oracle::lfilter(f.b, f.a, x);
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE_THAT(y[i], WithinAbs(ref[i], 1e-12));
    // Frozen samples from an independent direct-form filter run.
    CHECK_THAT(y[0], WithinAbs(0.018241684626494052, 1e-12));
    CHECK_THAT(y[10], WithinAbs(0.10535911652887259, 1e-12));
    CHECK_THAT(y[2999], WithinAbs(-0.30948791651421453, 1e-9));
  }
}

TEST_CASE("notch behaviour") {
  const auto f = signal::design_notch(60.0, 30.0, 1000.0);
  CHECK(std::abs(signal::frequency_response(f, 60.0, 1000.0)) <= 0.01);
  CHECK(std::abs(signal::frequency_response(f, 30.0, 1000.0)) >= 0.9);
  CHECK(std::abs(signal::frequency_response(f, 90.0, 1000.0)) >= 0.9);

  SECTION("60 Hz sine: last-second RMS ratio") {
    const auto y = signal::filter_samples(f, sine(60.0, 1000.0, 5000));
    double ey = 0;
    for (std::size_t i = 4000; i < 5000; ++i) ey += y[i] * y[i];
    CHECK(std::sqrt(ey / 1000.0) / std::sqrt(0.5) <= 0.01);
  }
  SECTION("10 Hz passes") {
    const auto y = signal::filter_samples(f, sine(10.0, 1000.0, 5000));
    CHECK(tail_peak(y, 1000) >= 0.95);
  }
  SECTION("DC passes") {
    const auto y = signal::filter_samples(f, std::vector<double>(5000, 1.0));
    CHECK(y.back() >= 0.99);
    CHECK(y.back() <= 1.01);
  }
}

TEST_CASE("filter designs are stable across a parameter sweep") {
  for (double fs : {250.0, 500.0, 1000.0, 2000.0})
    for (double lo : {0.1, 0.5, 1.0, 4.0})
      for (double hi : {30.0, 45.0, 70.0, 100.0}) {
        if (hi >= fs / 2) continue;
        const auto f = signal::design_bandpass(lo, hi, fs);
        for (const auto& p : signal::poles(f)) REQUIRE(std::abs(p) < 1.0);
      }
  for (double q : {1.0, 5.0, 30.0, 100.0}) {
    const auto f = signal::design_notch(50.0, q, 1000.0);
    for (const auto& p : signal::poles(f)) REQUIRE(std::abs(p) < 1.0);
  }
}

TEST_CASE("filter design rejects bad parameters") {
  CHECK_THROWS_AS(signal::design_bandpass(70.0, 0.1, 1000.0), ParameterError);
  CHECK_THROWS_AS(signal::design_bandpass(0.0, 70.0, 1000.0), ParameterError);
  CHECK_THROWS_AS(signal::design_bandpass(0.1, 600.0, 1000.0), ParameterError);
  CHECK_THROWS_AS(signal::design_notch(600.0, 30.0, 1000.0), ParameterError);
  CHECK_THROWS_AS(signal::design_notch(60.0, 0.0, 1000.0), ParameterError);
}

TEST_CASE("apply_filter on recordings") {
  const RowMatrix data = oracle::random_matrix(3, 400, 1);
  const auto rec = recording(data);
  SECTION("identity filter") {
    signal::IirFilter id{{1.0}, {1.0}, {}};
    CHECK(signal::apply_filter(id, rec).data == rec.data);
  }
  SECTION("pure gain") {
    signal::IirFilter half{{0.5}, {1.0}, {}};
    const auto out = signal::apply_filter(half, recording(RowMatrix::Constant(2, 10, 2.0)));
    CHECK((out.data.array() == 1.0).all());
  }
  SECTION("metadata and shape preserved") {
    const auto out = signal::apply_filter(signal::design_bandpass(0.1, 70, 1000), rec);
    CHECK(out.channels == rec.channels);
    CHECK(out.id == rec.id);
    CHECK(out.data.rows() == 3);
    CHECK(out.data.cols() == 400);
  }
  SECTION("linearity") {
    const auto f = signal::design_bandpass(0.1, 70, 1000);
    const RowMatrix other = oracle::random_matrix(3, 400, 2);
    const auto lhs = signal::apply_filter(f, recording(2.0 * data - 3.0 * other)).data;
    const RowMatrix rhs = 2.0 * signal::apply_filter(f, rec).data -
                          3.0 * signal::apply_filter(f, recording(other)).data;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("10 Hz dominates a 10 + 60 Hz mixture after bandpass and notch") {
    const auto s10 = sine(10.0, 1000.0, 2000);
    const auto s60 = sine(60.0, 1000.0, 2000);
    RowMatrix mix(1, 2000);
    for (int i = 0; i < 2000; ++i) mix(0, i) = s10[i] + s60[i];
    const auto out = signal::apply_filter(
        signal::design_notch(60, 30, 1000),
        signal::apply_filter(signal::design_bandpass(0.1, 70, 1000), recording(mix)));
    std::vector<double> tail(out.data.row(0).data() + 1000, out.data.row(0).data() + 2000);
    const auto p = oracle::periodogram(tail);  // 1 Hz bins starting at 1 Hz
    CHECK(p[9] > 100.0 * p[59]);
  }
  SECTION("unstable filter raises a numeric error") {
    signal::IirFilter bad{{1.0}, {1.0, -2.0}, {}};
    CHECK_THROWS_AS(signal::apply_filter(bad, rec), NumericError);
  }
}

TEST_CASE("recording validation") {
  auto rec = recording(oracle::random_matrix(2, 10, 3));
  CHECK_NOTHROW(validate(rec));
  rec.channels.pop_back();
  CHECK_THROWS_AS(validate(rec), ParameterError);
  rec = recording(oracle::random_matrix(2, 10, 3));
  rec.data(1, 3) = std::nan("");
  CHECK_THROWS_AS(validate(rec), ParameterError);
  rec = recording(oracle::random_matrix(2, 10, 3));
  rec.sample_rate_hz = 0;
  CHECK_THROWS_AS(validate(rec), ParameterError);
}
