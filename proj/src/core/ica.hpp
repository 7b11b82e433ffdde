// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <vector>

#include "signal.hpp"

namespace e2t::ica {

// Symmetric FastICA solution for one recording. Sources are
// unmixing * (x - channel_mean); reconstruction is mixing * sources + mean.
struct IcaModel {
  std::vector<std::string> channels;
  RowMatrix unmixing;  // components x channels
  RowMatrix mixing;    // channels x components
  Eigen::VectorXd channel_mean;
  std::vector<double> excess_kurtosis;  // per component, on the fit data
  std::vector<std::size_t> rejected;
  std::size_t iterations = 0;

  std::size_t num_components() const {
    return static_cast<std::size_t>(unmixing.rows());
  }
};

struct IcaOptions {
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;
};

// FastICA with PCA whitening, tanh contrast and symmetric decorrelation.
// Throws ConvergenceError (carrying the iteration count) when the fixed point
// is not reached within max_iterations.
IcaModel fit_ica(const EegRecording& rec, std::size_t n_components,
                 std::uint64_t seed, const IcaOptions& opts = {});

// Components whose |excess kurtosis| exceeds the threshold.
std::vector<std::size_t> artifact_components(const IcaModel& model,
                                             double kurtosis_threshold);

// Zeroes the artifact components and reconstructs through the mixing matrix.
// Throws DegenerateOutputError when every component would be removed.
EegRecording reject_artifacts(const IcaModel& model, const EegRecording& rec,
                              double kurtosis_threshold);

}  // namespace e2t::ica
