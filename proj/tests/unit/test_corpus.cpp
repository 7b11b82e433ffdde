// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "corpus.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace e2t;
using namespace e2t::corpus;

namespace {

SyntheticCorpusSpec two_sentences(std::size_t per_sentence = 51) {
  SyntheticCorpusSpec s;
  s.sentences = {"turn on the light", "open the door"};
  s.examples_per_sentence = per_sentence;
  s.seed = 42;
  return s;
}

// Channel-averaged DFT magnitude at integer frequencies 1..40 Hz.
std::vector<double> spectrum(const EegRecording& r) {
  const auto n = static_cast<double>(r.num_samples());
  std::vector<double> out;
  for (int f = 1; f <= 40; ++f) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < r.data.rows(); ++c) {
      double re = 0.0, im = 0.0;
      for (Eigen::Index i = 0; i < r.data.cols(); ++i) {
        const double ph = 2 * std::numbers::pi * f * static_cast<double>(i) / r.sample_rate_hz;
        re += r.data(c, i) * std::cos(ph);
        im -= r.data(c, i) * std::sin(ph);
      }
      acc += std::hypot(re, im) / n;
    }
    out.push_back(acc / static_cast<double>(r.data.rows()));
  }
  return out;
}

}  // namespace

TEST_CASE("synthetic corpus shape and determinism") {
  const auto spec = two_sentences();
  const auto a = generate_synthetic_corpus(spec);
  const auto b = generate_synthetic_corpus(spec);
  REQUIRE(a.size() == 102);
  std::map<std::string, int> per_sentence;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].data == b[i].data);
    CHECK(a[i].num_channels() == 31);
    CHECK(a[i].num_samples() == 1000);
    CHECK(a[i].channels == default_channel_names());
    CHECK(a[i].dataset_tag == "synthetic");
    CHECK(a[i].data.allFinite());
    ++per_sentence[a[i].transcript];
    ids.insert(a[i].id);
  }
  CHECK(ids.size() == 102);
  CHECK(per_sentence["turn on the light"] == 51);
  CHECK(per_sentence["open the door"] == 51);

  auto other = spec;
  other.seed = 43;
  CHECK(generate_synthetic_corpus(other)[0].data != a[0].data);
}

TEST_CASE("sentence frequencies are distinct and in band") {
  SyntheticCorpusSpec spec;
  spec.sentences = builtin_sentences();
  const auto freqs = sentence_frequencies(spec);
  REQUIRE(freqs.size() == spec.sentences.size());
  std::vector<double> all;
  for (const auto& f : freqs) {
    CHECK(f.size() == spec.latent_sources);
    for (double v : f) {
      CHECK(v >= 4.0);
      CHECK(v <= 30.0);
      all.push_back(v);
    }
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i] - all[i - 1] >= 1.0 - 1e-12);
}

TEST_CASE("sentences are separable by spectrum") {
  const auto recs = generate_synthetic_corpus(two_sentences(20));
  std::map<std::string, std::vector<double>> centroid;
  std::map<std::string, int> count;
  std::vector<std::vector<double>> spectra;
  for (const auto& r : recs) spectra.push_back(spectrum(r));
  // Recordings alternate between sentences; train on every other pair.
  const auto is_train = [](std::size_t i) { return i % 4 < 2; };
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!is_train(i)) continue;
    auto& c = centroid[recs[i].transcript];
    c.resize(40, 0.0);
    for (std::size_t k = 0; k < 40; ++k) c[k] += spectra[i][k];
    ++count[recs[i].transcript];
  }
  for (auto& [t, c] : centroid)
    for (double& v : c) v /= count[t];
  REQUIRE(centroid.size() == 2);
  int correct = 0, total = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (is_train(i)) continue;
    std::string best;
    double best_d = 1e300;
    for (const auto& [t, c] : centroid) {
      double d = 0;
      for (std::size_t k = 0; k < 40; ++k) d += (spectra[i][k] - c[k]) * (spectra[i][k] - c[k]);
      if (d < best_d) {
        best_d = d;
        best = t;
      }
    }
    correct += best == recs[i].transcript;
    ++total;
  }
  CHECK(correct >= 0.8 * total);
}

TEST_CASE("train/test split") {
  std::vector<std::string> ids;
  for (int i = 0; i < 102; ++i) ids.push_back("r" + std::to_string(i));
  const auto s = split_train_test(ids, 0.8, 7);
  CHECK(s.train.size() == 82);
  CHECK(s.test.size() == 20);
  std::set<std::string> all(s.train.begin(), s.train.end());
  for (const auto& t : s.test) CHECK(all.insert(t).second);
  CHECK(all.size() == 102);
  CHECK(split_train_test(ids, 0.8, 7).train == s.train);
  CHECK(split_train_test(ids, 0.8, 8).train != s.train);
  CHECK_THROWS_AS(split_train_test(ids, 1.0, 7), ParameterError);
  CHECK_THROWS_AS(split_train_test({"a", "a"}, 0.5, 7), ParameterError);
}

TEST_CASE("manifest round trip") {
  auto spec = two_sentences(2);
  spec.dataset_tag = "B";
  const auto recs = generate_synthetic_corpus(spec);
  const auto dir = oracle::fresh_dir("corpus_io");
  save_corpus(recs, dir);
  const auto back = load_manifest(dir / "manifest.csv");
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].id == recs[i].id);
    CHECK(back[i].transcript == recs[i].transcript);
    CHECK(back[i].dataset_tag == "B");
    CHECK(back[i].sample_rate_hz == 1000.0);
    CHECK((back[i].data - recs[i].data).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("manifest errors") {
  const auto recs = generate_synthetic_corpus(two_sentences(1));
  const auto dir = oracle::fresh_dir("corpus_bad");
  save_corpus(recs, dir);
  SECTION("missing recording file names the path and line") {
    std::filesystem::remove(dir / "recordings" / (recs[1].id + ".csv"));
    try {
      load_manifest(dir / "manifest.csv");
      FAIL("expected an ingest error");
    } catch (const IngestError& e) {
      CHECK(e.line == 3);
      CHECK(std::string(e.what()).find(recs[1].id + ".csv") != std::string::npos);
    }
  }
  SECTION("wrong channel count") {
    CHECK_THROWS_AS(load_manifest(dir / "manifest.csv", 30), IngestError);
  }
  SECTION("30-channel recording") {
    EegRecording r = recs[0];
    r.channels.pop_back();
    r.data = r.data.topRows(30).eval();
    std::ofstream(dir / "recordings" / (r.id + ".csv")) << recording_to_csv(r);
    CHECK_THROWS_AS(load_manifest(dir / "manifest.csv"), IngestError);
  }
  SECTION("malformed rows") {
    std::ofstream(dir / "manifest.csv", std::ios::app) << "x,y\n";
    CHECK_THROWS_AS(load_manifest(dir / "manifest.csv"), IngestError);
  }
  SECTION("bad header") {
    std::ofstream(dir / "manifest.csv") << "id,path\n";
    CHECK_THROWS_AS(load_manifest(dir / "manifest.csv"), IngestError);
  }
}

TEST_CASE("recording csv") {
  EegRecording r;
  r.channels = {"Fz", "Cz"};
  r.data = oracle::random_matrix(2, 5, 1);
  r.sample_rate_hz = 500.0;
  r.id = "x";
  const std::string csv = recording_to_csv(r);
  CHECK(csv.rfind("t_ms,\"Fz\",\"Cz\"\n0,", 0) == 0);
  const auto back = recording_from_csv(csv, "mem");
  CHECK(back.sample_rate_hz == 500.0);
  CHECK(back.data == r.data);
  CHECK_THROWS_AS(recording_from_csv("t_ms,a\n0,1\n2,x\n", "mem"), IngestError);
  CHECK_THROWS_AS(recording_from_csv("time,a\n0,1\n", "mem"), IngestError);
}
