// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace e2t {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Multichannel scalp recording. `data` is channels x samples in microvolts.
struct EegRecording {
  std::vector<std::string> channels;
  RowMatrix data;
  double sample_rate_hz = 1000.0;
  std::string id;
  std::string transcript;
  std::string subject;
  std::string dataset_tag;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return static_cast<std::size_t>(data.cols()); }
};

// Throws ParameterError when the recording breaks its invariants.
void validate(const EegRecording& rec);

}  // namespace e2t

namespace e2t::signal {

struct FilterDesign {
  std::string kind;  // "bandpass", "notch", "custom"
  double low_hz = 0.0;
  double high_hz = 0.0;
  double quality = 0.0;
  int order = 0;
  double sample_rate_hz = 0.0;
};

// Transfer function b(z)/a(z), a[0] == 1.
struct IirFilter {
  std::vector<double> b;
  std::vector<double> a;
  FilterDesign design;
};

// 4th-order Butterworth band-pass: 2nd-order analog prototype, band
// transformation, bilinear transform with frequency prewarping.
IirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz);

// 2nd-order notch with zeros on the unit circle at `center_hz`.
IirFilter design_notch(double center_hz, double quality, double sample_rate_hz);

// Complex response at `freq_hz` evaluated from the coefficients.
std::complex<double> frequency_response(const IirFilter& f, double freq_hz,
                                        double sample_rate_hz);

// Roots of the denominator polynomial (companion-matrix eigenvalues).
std::vector<std::complex<double>> poles(const IirFilter& f);
bool is_stable(const IirFilter& f);

// Direct-form I, zero initial state. Throws NumericError on non-finite output.
std::vector<double> filter_samples(const IirFilter& f,
                                   const std::vector<double>& x);
EegRecording apply_filter(const IirFilter& f, const EegRecording& rec);

}  // namespace e2t::signal
