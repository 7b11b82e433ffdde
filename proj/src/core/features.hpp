// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "signal.hpp"

namespace e2t {

enum class Provenance : std::uint8_t { kRaw155 = 0, kKpca30 = 1, kGan32 = 2 };

std::size_t provenance_dim(Provenance p);
const char* provenance_name(Provenance p);
// Throws ParameterError for unknown names.
Provenance parse_provenance(std::string_view name);

// Time-major frame features (T x D).
struct FeatureSequence {
  RowMatrix frames;
  double frame_rate_hz = 100.0;
  Provenance provenance = Provenance::kRaw155;
  std::string recording_id;
  std::string transcript;
  std::string dataset_tag;  // carried in the work-dir index, not in EEGF

  std::size_t num_frames() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(frames.cols()); }
};

// Finite entries, D equal to the provenance width.
void validate(const FeatureSequence& seq);

}  // namespace e2t

namespace e2t::features {

inline constexpr std::size_t kFeaturesPerChannel = 5;
inline constexpr std::size_t kExpectedChannels = 31;
inline constexpr double kFrameRateHz = 100.0;

struct WindowSpec {
  std::size_t window_len_samples = 100;
  std::size_t hop_samples = 10;
  double sample_rate_hz = 1000.0;

  // Hop chosen so frames come out at exactly 100 Hz.
  static WindowSpec for_rate(double sample_rate_hz,
                             std::size_t window_len_samples = 100);
  double frame_rate_hz() const {
    return sample_rate_hz / static_cast<double>(hop_samples);
  }
};

void validate(const WindowSpec& spec);

double rms(std::span<const double> w);
// Sign changes over (len - 1); zero counts as positive.
double zero_crossing_rate(std::span<const double> w);
double moving_window_average(std::span<const double> w);
// Pearson m4 / m2^2; 0 for (near) zero-variance windows.
double kurtosis(std::span<const double> w);
// Normalized Shannon entropy of the one-sided periodogram, DC excluded.
double power_spectral_entropy(std::span<const double> w);

std::size_t frame_count(std::size_t num_samples, const WindowSpec& spec);

// Per frame: channel-major [rms, zcr, avg, kurtosis, pse].
FeatureSequence extract_features(const EegRecording& rec, const WindowSpec& spec);

// "EEGF" binary container.
std::string encode(const FeatureSequence& seq);
FeatureSequence decode(std::string_view bytes, const std::string& source);
void write_file(const std::filesystem::path& path, const FeatureSequence& seq);
FeatureSequence read_file(const std::filesystem::path& path);
std::string to_csv(const FeatureSequence& seq);

}  // namespace e2t::features
