// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <fstream>

#include "config.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace e2t;

TEST_CASE("defaults") {
  const ExperimentConfig c;
  CHECK(c.preprocess.bandpass_low_hz == 0.1);
  CHECK(c.preprocess.bandpass_high_hz == 70.0);
  CHECK(c.preprocess.notch_hz == 60.0);
  CHECK(c.kpca.degree == 3);
  CHECK(c.kpca.components == 30);
  CHECK(c.gan_train.epochs == 201);
  CHECK(c.gan_train.batch_size == 50);
  CHECK(c.train_ratio == 0.8);
  CHECK(c.generator.tcn_channels == 32);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("json round trip") {
  ExperimentConfig c;
  c.seed = 99;
  c.synth.sentences = {"a b", "c d", "e f"};
  c.gan_train.epochs = 7;
  c.discriminator.joint_units = 0;
  c.buckets = {10, 20};
  const std::string text = to_json(c);
  const auto back = config_from_json(text, "mem");
  CHECK(back.seed == 99);
  CHECK(back.synth.sentences == c.synth.sentences);
  CHECK(back.gan_train.epochs == 7);
  CHECK(back.discriminator.joint_units == 0);
  CHECK(back.buckets == c.buckets);
  CHECK(to_json(back) == text);

  const auto dir = oracle::fresh_dir("config_io");
  std::ofstream(dir / "c.json") << text;
  CHECK(load_config(dir / "c.json").seed == 99);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), IoError);
}

TEST_CASE("partial configs keep defaults") {
  const auto c = config_from_json(R"({"seed": 5, "gan": {"epochs": 3}})", "mem");
  CHECK(c.seed == 5);
  CHECK(c.gan_train.epochs == 3);
  CHECK(c.gan_train.batch_size == 50);
}

TEST_CASE("bad configs are rejected") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(config_from_json(text, "mem"), ParameterError);
  };
  bad(R"({"sed": 5})");
  bad(R"({"gan": {"epoch": 3}})");
  bad(R"({"seed": "five"})");
  bad(R"({"seed": -1})");
  bad(R"({"gan": 3})");
  bad(R"([1, 2])");
  bad(R"({"seed": )");
  bad(R"({"kpca": {"components": 20}})");
  bad(R"({"gan": {"tcn_channels": 16}})");
  bad(R"({"preprocess": {"bandpass_low_hz": 80}})");
  bad(R"({"split": {"train_ratio": 1.5}})");
  bad(R"({"report": {"buckets": []}})");
  try {
    config_from_json(R"({"asr": {"dropuot": 0.1}})", "cfg.json");
    FAIL("expected a parameter error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("asr.dropuot") != std::string::npos);
  }
}
