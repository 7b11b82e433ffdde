// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asr.hpp"
#include "corpus.hpp"
#include "gan.hpp"

namespace e2t {

struct PreprocessConfig {
  double bandpass_low_hz = 0.1;
  double bandpass_high_hz = 70.0;
  double notch_hz = 60.0;
  double notch_quality = 30.0;
  std::size_t ica_components = 5;
  double kurtosis_threshold = 5.0;
  std::size_t ica_max_iterations = 500;
  double ica_tolerance = 1e-6;
};

struct KpcaConfig {
  std::size_t components = 30;
  int degree = 3;
  double offset = 1.0;
  std::size_t max_fit_frames = 2000;
};

struct DecoderConfig {
  std::size_t lm_order = 3;
  double lm_add_k = 0.1;
  asr::BeamOptions beam;
};

// Every knob of one experiment. Serialized as JSON; unknown keys are rejected.
struct ExperimentConfig {
  std::string manifest;  // empty: synthesize a corpus into the work dir
  std::string work_dir = "work";
  std::uint64_t seed = 0;

  corpus::SyntheticCorpusSpec synth{.sentences = {"turn on the light", "open the door"}};
  PreprocessConfig preprocess;
  std::size_t window_samples = 100;
  KpcaConfig kpca;
  gan::GeneratorConfig generator;
  gan::DiscriminatorConfig discriminator;
  gan::GanTrainConfig gan_train;
  asr::CtcModelConfig ctc_model;
  asr::CtcTrainConfig ctc_train;
  DecoderConfig decoder;
  double train_ratio = 0.8;
  std::vector<std::size_t> buckets{30, 60, 90};
};

void validate(const ExperimentConfig& config);

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text, const std::string& source);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace e2t
