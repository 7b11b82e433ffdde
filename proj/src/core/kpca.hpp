// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "signal.hpp"

namespace e2t::kpca {

// Fitted polynomial-kernel PCA projector.
struct KpcaModel {
  RowMatrix training;           // N x D
  int degree = 3;
  double offset = 1.0;
  Eigen::VectorXd eigenvalues;  // k, of the centred Gram matrix, descending
  RowMatrix alphas;             // N x k; lambda_i * |alpha_i|^2 == 1
  Eigen::VectorXd kernel_row_means;  // N
  double kernel_grand_mean = 0.0;
  double spectrum_mass = 0.0;   // sum of all positive centred-Gram eigenvalues

  std::size_t num_training() const { return static_cast<std::size_t>(training.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(training.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

double poly_kernel(std::span<const double> x, std::span<const double> y,
                   int degree, double offset);

// K_ij = (x_i . x_j + offset)^degree for rows of `x`.
Eigen::MatrixXd gram_matrix(const RowMatrix& x, int degree, double offset);

// Evenly spaced rows, at most `max_rows`, first row always kept.
RowMatrix subsample_rows(const RowMatrix& x, std::size_t max_rows);

// Throws RankError when fewer than k positive eigenvalues survive.
KpcaModel fit_kpca(const RowMatrix& x, std::size_t k, int degree = 3,
                   double offset = 1.0);

Eigen::VectorXd transform(const KpcaModel& model, std::span<const double> x);
RowMatrix transform_rows(const KpcaModel& model, const RowMatrix& x);

// Cumulative eigenvalue share for the retained components.
std::vector<double> explained_variance_curve(const KpcaModel& model);

std::string encode(const KpcaModel& model);
KpcaModel decode(std::string_view bytes, const std::string& source);
void write_file(const std::filesystem::path& path, const KpcaModel& model);
KpcaModel read_file(const std::filesystem::path& path);

}  // namespace e2t::kpca
