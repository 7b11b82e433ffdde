// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signal.hpp"

namespace e2t::corpus {

// Standard 10-20 labels for the 31-channel montage.
const std::vector<std::string>& default_channel_names();
// Small English command list used when no sentences are configured.
const std::vector<std::string>& builtin_sentences();

struct SyntheticCorpusSpec {
  std::vector<std::string> sentences;
  std::size_t examples_per_sentence = 51;
  std::size_t channels = 31;
  double sample_rate_hz = 1000.0;
  double duration_s = 1.0;
  std::size_t latent_sources = 3;
  double noise_level = 0.5;
  double line_noise_amplitude = 1.0;
  double burst_rate_hz = 0.5;
  std::uint64_t seed = 0;
  std::string dataset_tag = "synthetic";
};

void validate(const SyntheticCorpusSpec& spec);

// Center frequencies (Hz) of the latent oscillations for each sentence, in
// sentence order. Pairwise at least 1 Hz apart across the whole list.
std::vector<std::vector<double>> sentence_frequencies(const SyntheticCorpusSpec& spec);

// Recordings are interleaved: example e of every sentence precedes example
// e + 1 of any sentence.
std::vector<EegRecording> generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  double ratio = 0.8;
  std::uint64_t seed = 0;
};

DatasetSplit split_train_test(const std::vector<std::string>& ids, double ratio,
                              std::uint64_t seed);

// manifest.csv plus one CSV per recording under `dir`.
void save_corpus(const std::vector<EegRecording>& recordings, const std::filesystem::path& dir);
// Reads the manifest and every referenced recording. Paths are relative to
// the manifest. Channel counts other than `expected_channels` are rejected.
std::vector<EegRecording> load_manifest(const std::filesystem::path& manifest,
                                        std::size_t expected_channels = 31);

std::string recording_to_csv(const EegRecording& rec);
EegRecording recording_from_csv(const std::string& text, const std::string& source);

}  // namespace e2t::corpus
