// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "ica.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace e2t::ica {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// W <- (W W^T)^{-1/2} W
MatrixXd symmetric_decorrelate(const MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w * w.transpose());
  VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().transpose() * w;
}

double excess_kurtosis(const Eigen::Ref<const Eigen::RowVectorXd>& s) {
  const double mean = s.mean();
  const Eigen::RowVectorXd d = s.array() - mean;
  const double m2 = d.array().square().mean();
  if (m2 < 1e-12) return 0.0;
  const double m4 = d.array().square().square().mean();
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace

IcaModel fit_ica(const EegRecording& rec, std::size_t n_components,
                 std::uint64_t seed, const IcaOptions& opts) {
  validate(rec);
  const std::size_t nch = rec.num_channels();
  const std::size_t m = rec.num_samples();
  if (n_components == 0 || n_components > nch)
    throw ParameterError("fit_ica: n_components must be in [1, " +
                         std::to_string(nch) + "], got " +
                         std::to_string(n_components));
  if (m < 10 * nch)
    throw ParameterError("fit_ica: need at least " + std::to_string(10 * nch) +
                         " samples, got " + std::to_string(m));

  IcaModel model;
  model.channels = rec.channels;
  model.channel_mean = rec.data.rowwise().mean();
  const MatrixXd x = rec.data.colwise() - model.channel_mean;

  // PCA whitening onto the leading n_components directions.
  const MatrixXd cov = (x * x.transpose()) / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  const Eigen::Index n = static_cast<Eigen::Index>(n_components);
  const Eigen::Index first = static_cast<Eigen::Index>(nch) - n;
  const VectorXd evals = es.eigenvalues().segment(first, n).reverse();
  const MatrixXd evecs = es.eigenvectors().middleCols(first, n).rowwise().reverse();
  if (evals.minCoeff() <= 1e-12 * std::max(1.0, evals.maxCoeff()))
    throw NumericError("fit_ica: data covariance is rank deficient for " +
                       std::to_string(n_components) + " components");
  const MatrixXd whitening =
      evals.cwiseSqrt().cwiseInverse().asDiagonal() * evecs.transpose();
  const MatrixXd dewhitening = evecs * evals.cwiseSqrt().asDiagonal();
  const MatrixXd z = whitening * x;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = normal(rng);
  w = symmetric_decorrelate(w);

  const double inv_m = 1.0 / static_cast<double>(m);
  bool converged = false;
  std::size_t it = 0;
  while (it < opts.max_iterations) {
    ++it;
    const MatrixXd g = (w * z).array().tanh().matrix();
    const VectorXd gprime_mean =
        (1.0 - g.array().square()).matrix().rowwise().mean();
    MatrixXd w_next = (g * z.transpose()) * inv_m - gprime_mean.asDiagonal() * w;
    w_next = symmetric_decorrelate(w_next);
    const double lim =
        ((w_next * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = std::move(w_next);
    if (lim < opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("fit_ica: FastICA did not converge on '" + rec.id +
                               "' after " + std::to_string(it) + " iterations",
                           it);

  model.iterations = it;
  model.unmixing = w * whitening;
  model.mixing = dewhitening * w.transpose();
  const MatrixXd sources = model.unmixing * x;
  model.excess_kurtosis.resize(n_components);
  for (Eigen::Index i = 0; i < n; ++i)
    model.excess_kurtosis[i] = excess_kurtosis(sources.row(i));
  return model;
}

std::vector<std::size_t> artifact_components(const IcaModel& model,
                                             double kurtosis_threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.excess_kurtosis.size(); ++i)
    if (std::abs(model.excess_kurtosis[i]) > kurtosis_threshold) out.push_back(i);
  return out;
}

EegRecording reject_artifacts(const IcaModel& model, const EegRecording& rec,
                              double kurtosis_threshold) {
  validate(rec);
  if (rec.channels != model.channels)
    throw ParameterError("reject_artifacts: channel layout of '" + rec.id +
                         "' differs from the fitted model");
  const auto rejected = artifact_components(model, kurtosis_threshold);
  if (rejected.size() == model.num_components())
    throw DegenerateOutputError(
        "reject_artifacts: all " + std::to_string(rejected.size()) +
        " components exceed |excess kurtosis| " +
        std::to_string(kurtosis_threshold) + " on '" + rec.id + "'");

  MatrixXd sources =
      model.unmixing * (rec.data.colwise() - model.channel_mean);
  for (std::size_t i : rejected) sources.row(static_cast<Eigen::Index>(i)).setZero();

  EegRecording out = rec;
  out.data = (model.mixing * sources).colwise() + model.channel_mean;
  return out;
}

}  // namespace e2t::ica
