// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "binio.hpp"
#include "error.hpp"
#include "features.hpp"
#include "oracles.hpp"

using namespace e2t;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> sine(double f, double fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return x;
}

EegRecording montage(const RowMatrix& data) {
  EegRecording r;
  for (Eigen::Index c = 0; c < data.rows(); ++c) r.channels.push_back("c" + std::to_string(c));
  r.data = data;
  r.id = "feat";
  r.transcript = "hello";
  return r;
}

double pse_oracle(const std::vector<double>& w) {
  const auto p = oracle::periodogram(w);
  double total = 0;
  for (double v : p) total += v;
  if (total <= 0) return 0.0;
  double h = 0;
  for (double v : p)
    if (v > 0) h -= (v / total) * std::log(v / total);
  return h / std::log(static_cast<double>(p.size()));
}

}  // namespace

TEST_CASE("rms") {
  CHECK_THAT(features::rms(std::vector<double>(7, 3.0)), WithinAbs(3.0, 1e-15));
  CHECK_THAT(features::rms(std::vector<double>{3, 4}), WithinAbs(std::sqrt(12.5), 1e-12));
  CHECK_THAT(features::rms(sine(10, 1000, 1000)), WithinAbs(std::sqrt(0.5), 0.01));
  CHECK_THROWS_AS(features::rms(std::vector<double>{}), ParameterError);
}

TEST_CASE("zero crossing rate") {
  CHECK(features::zero_crossing_rate(std::vector<double>(10, 1.0)) == 0.0);
  std::vector<double> alt(9);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  CHECK(features::zero_crossing_rate(alt) == 1.0);
  // 10 Hz over 100 ms: two crossings inside the window (zero counts as positive).
  const auto s = sine(10, 1000, 100);
  CHECK_THAT(features::zero_crossing_rate(s), WithinAbs(2.0 / 99.0, 1.0 / 99.0 + 1e-12));
  CHECK(features::zero_crossing_rate(std::vector<double>{0.0, -0.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(features::zero_crossing_rate(std::vector<double>{1.0}), ParameterError);
}

TEST_CASE("moving window average") {
  CHECK(features::moving_window_average(std::vector<double>{1, 2, 3}) == 2.0);
  CHECK(features::moving_window_average(std::vector<double>(5, -4.5)) == -4.5);
  CHECK_THAT(features::moving_window_average(sine(10, 1000, 1000)), WithinAbs(0.0, 1e-3));
  CHECK_THROWS_AS(features::moving_window_average(std::vector<double>{}), ParameterError);
}

TEST_CASE("kurtosis") {
  CHECK_THAT(features::kurtosis(std::vector<double>{1, -1, 1, -1}), WithinAbs(1.0, 1e-15));
  CHECK(features::kurtosis(std::vector<double>(8, 2.0)) == 0.0);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = g(rng);
  CHECK_THAT(features::kurtosis(x), WithinAbs(3.0, 0.1));
  CHECK_THROWS_AS(features::kurtosis(std::vector<double>{1, 2, 3}), ParameterError);
}

TEST_CASE("power spectral entropy") {
  CHECK(features::power_spectral_entropy(sine(10, 1000, 100)) <= 0.35);
  CHECK(features::power_spectral_entropy(std::vector<double>(100, 0.0)) == 0.0);
  CHECK_THROWS_AS(features::power_spectral_entropy(std::vector<double>{1, 2, 3}), ParameterError);

  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  double mean = 0.0;
  for (int w = 0; w < 1000; ++w) {
    std::vector<double> x(100);
    for (auto& v : x) v = g(rng);
    const double h = features::power_spectral_entropy(x);
    REQUIRE(h >= 0.0);
    REQUIRE(h <= 1.0);
    if (w < 20) REQUIRE_THAT(h, WithinAbs(pse_oracle(x), 1e-10));
    mean += h / 1000.0;
  }
  CHECK(mean >= 0.85);
  // Odd length agrees with the direct-DFT oracle too.
  std::vector<double> odd(37);
  for (auto& v : odd) v = g(rng);
  CHECK_THAT(features::power_spectral_entropy(odd), WithinAbs(pse_oracle(odd), 1e-10));
}

TEST_CASE("window spec") {
  const auto w = features::WindowSpec::for_rate(1000.0);
  CHECK(w.hop_samples == 10);
  CHECK(w.window_len_samples == 100);
  CHECK(w.frame_rate_hz() == 100.0);
  CHECK(features::WindowSpec::for_rate(500.0).hop_samples == 5);
  CHECK_THROWS_AS(features::WindowSpec::for_rate(1000.0, 1), ParameterError);
  CHECK_THROWS_AS(features::WindowSpec::for_rate(1050.0), ParameterError);
}

TEST_CASE("frame count formula") {
  for (std::size_t len = 100; len < 400; len += 7)
    for (std::size_t win : {2u, 10u, 100u})
      for (std::size_t hop : {1u, 3u, 10u}) {
        if (len < win) continue;
        features::WindowSpec spec{win, hop, 100.0 * static_cast<double>(hop)};
        CHECK(features::frame_count(len, spec) == (len - win) / hop + 1);
      }
}

TEST_CASE("extract_features shapes and closed forms") {
  const auto spec = features::WindowSpec::for_rate(1000.0);
  SECTION("5000 samples give 491 frames") {
    const auto seq = features::extract_features(montage(oracle::random_matrix(31, 5000, 1)), spec);
    CHECK(seq.num_frames() == 491);
    CHECK(seq.dim() == 155);
    CHECK(seq.provenance == Provenance::kRaw155);
    CHECK(seq.frame_rate_hz == 100.0);
  }
  SECTION("one window gives one frame") {
    CHECK(features::extract_features(montage(oracle::random_matrix(31, 100, 1)), spec)
              .num_frames() == 1);
  }
  SECTION("constant input") {
    const auto seq = features::extract_features(montage(RowMatrix::Constant(31, 300, 1.0)), spec);
    for (Eigen::Index t = 0; t < seq.frames.rows(); ++t)
      for (Eigen::Index c = 0; c < 31; ++c) {
        CHECK(seq.frames(t, 5 * c + 0) == 1.0);
        CHECK(seq.frames(t, 5 * c + 1) == 0.0);
        CHECK(seq.frames(t, 5 * c + 2) == 1.0);
        CHECK(seq.frames(t, 5 * c + 3) == 0.0);
        CHECK(seq.frames(t, 5 * c + 4) == 0.0);
      }
  }
  SECTION("feature layout is channel-major") {
    const RowMatrix data = oracle::random_matrix(31, 250, 5);
    const auto seq = features::extract_features(montage(data), spec);
    const Eigen::Index t = 7, c = 12;
    std::vector<double> w(data.row(c).data() + t * 10, data.row(c).data() + t * 10 + 100);
    CHECK(seq.frames(t, 5 * c + 0) == features::rms(w));
    CHECK(seq.frames(t, 5 * c + 1) == features::zero_crossing_rate(w));
    CHECK(seq.frames(t, 5 * c + 2) == features::moving_window_average(w));
    CHECK(seq.frames(t, 5 * c + 3) == features::kurtosis(w));
    CHECK(seq.frames(t, 5 * c + 4) == features::power_spectral_entropy(w));
  }
  SECTION("shift consistency") {
    const RowMatrix data = oracle::random_matrix(31, 600, 6);
    const auto full = features::extract_features(montage(data), spec);
    const auto shifted =
        features::extract_features(montage(data.rightCols(data.cols() - 10)), spec);
    REQUIRE(shifted.num_frames() + 1 == full.num_frames());
    CHECK(shifted.frames == full.frames.bottomRows(shifted.frames.rows()));
  }
  SECTION("channel independence") {
    RowMatrix data = oracle::random_matrix(31, 300, 7);
    const auto a = features::extract_features(montage(data), spec);
    data.row(3) = oracle::random_matrix(1, 300, 99).row(0);
    const auto b = features::extract_features(montage(data), spec);
    CHECK(a.frames.leftCols(15) == b.frames.leftCols(15));
    CHECK(a.frames.rightCols(155 - 20) == b.frames.rightCols(155 - 20));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(features::extract_features(montage(oracle::random_matrix(31, 99, 1)), spec),
                    ParameterError);
    CHECK_THROWS_AS(features::extract_features(montage(oracle::random_matrix(30, 500, 1)), spec),
                    ParameterError);
  }
}

TEST_CASE("feature file round trip and validation") {
  FeatureSequence seq;
  seq.frames = oracle::random_matrix(9, 30, 3);
  seq.provenance = Provenance::kKpca30;
  seq.recording_id = "x";
  const std::string bytes = features::encode(seq);
  CHECK(bytes.substr(0, 4) == "EEGF");
  CHECK(bytes.size() == 4 + 4 + 8 + 8 + 8 + 1 + 9 * 30 * 8);
  const auto back = features::decode(bytes, "mem");
  CHECK(back.frames == seq.frames);
  CHECK(back.provenance == Provenance::kKpca30);
  CHECK(back.frame_rate_hz == 100.0);

  CHECK_THROWS_AS(features::decode(bytes.substr(0, bytes.size() - 3), "mem"), IngestError);
  CHECK_THROWS_AS(features::decode("XXXX" + bytes.substr(4), "mem"), IngestError);

  const auto dir = oracle::fresh_dir("features_io");
  features::write_file(dir / "a.eegf", seq);
  CHECK(features::read_file(dir / "a.eegf").frames == seq.frames);
  CHECK_THROWS_AS(features::read_file(dir / "missing.eegf"), IoError);

  const std::string csv = features::to_csv(seq);
  CHECK(csv.rfind("frame,t_ms,f0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  seq.provenance = Provenance::kGan32;
  CHECK_THROWS_AS(validate(seq), ParameterError);
  seq.provenance = Provenance::kKpca30;
  seq.frames(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS(validate(seq));

  CHECK(parse_provenance("gan32") == Provenance::kGan32);
  CHECK(provenance_dim(Provenance::kRaw155) == 155);
  CHECK_THROWS_AS(parse_provenance("gan64"), ParameterError);
}
