// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "kpca.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "binio.hpp"
#include "error.hpp"

namespace e2t::kpca {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

double ipow(double v, int degree) {
  double out = 1.0;
  for (int i = 0; i < degree; ++i) out *= v;
  return out;
}

void check_degree(int degree) {
  if (degree < 1) throw ParameterError("kpca: kernel degree must be >= 1");
}

}  // namespace

double poly_kernel(std::span<const double> x, std::span<const double> y,
                   int degree, double offset) {
  check_degree(degree);
  if (x.size() != y.size())
    throw ParameterError("poly_kernel: dimension mismatch (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return ipow(dot + offset, degree);
}

Eigen::MatrixXd gram_matrix(const RowMatrix& x, int degree, double offset) {
  check_degree(degree);
  Eigen::MatrixXd k = x * x.transpose();
  k.array() += offset;
  return k.unaryExpr([degree](double v) { return ipow(v, degree); });
}

RowMatrix subsample_rows(const RowMatrix& x, std::size_t max_rows) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  if (max_rows == 0) throw ParameterError("subsample_rows: max_rows must be > 0");
  if (n <= max_rows) return x;
  RowMatrix out(static_cast<Eigen::Index>(max_rows), x.cols());
  for (std::size_t i = 0; i < max_rows; ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        x.row(static_cast<Eigen::Index>(i * n / max_rows));
  return out;
}

KpcaModel fit_kpca(const RowMatrix& x, std::size_t k, int degree, double offset) {
  check_degree(degree);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  if (k == 0) throw ParameterError("fit_kpca: k must be positive");
  if (n < k + 1)
    throw ParameterError("fit_kpca: need at least k + 1 = " + std::to_string(k + 1) +
                         " rows, got " + std::to_string(n));
  if (!x.allFinite()) throw ParameterError("fit_kpca: non-finite input");

  KpcaModel m;
  m.training = x;
  m.degree = degree;
  m.offset = offset;

  const Eigen::MatrixXd gram = gram_matrix(x, degree, offset);
  m.kernel_row_means = gram.rowwise().mean();
  m.kernel_grand_mean = m.kernel_row_means.mean();
  Eigen::MatrixXd centred = gram;
  centred.colwise() -= m.kernel_row_means;
  centred.rowwise() -= m.kernel_row_means.transpose();
  centred.array() += m.kernel_grand_mean;
  // Restore exact symmetry lost to rounding.
  centred = 0.5 * (centred + centred.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centred);
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
  const double floor = 1e-10 * scale;

  std::size_t positive = 0;
  m.spectrum_mass = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] > floor) {
      ++positive;
      m.spectrum_mass += evals[i];
    }
  }
  if (positive < k)
    throw RankError("fit_kpca: only " + std::to_string(positive) +
                        " positive eigenvalues for k = " + std::to_string(k),
                    positive);

  m.eigenvalues.resize(static_cast<Eigen::Index>(k));
  m.alphas.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Index src = evals.size() - 1 - static_cast<Eigen::Index>(i);
    const double lambda = evals[src];
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    m.eigenvalues[static_cast<Eigen::Index>(i)] = lambda;
    m.alphas.col(static_cast<Eigen::Index>(i)) = v / std::sqrt(lambda);
  }
  return m;
}

Eigen::VectorXd transform(const KpcaModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim())
    throw ParameterError("kpca transform: expected " +
                         std::to_string(model.input_dim()) + " inputs, got " +
                         std::to_string(x.size()));
  RowMatrix row = Eigen::Map<const RowMatrix>(x.data(), 1,
                                              static_cast<Eigen::Index>(x.size()));
  return transform_rows(model, row).row(0).transpose();
}

RowMatrix transform_rows(const KpcaModel& model, const RowMatrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim())
    throw ParameterError("kpca transform: expected " +
                         std::to_string(model.input_dim()) + " inputs, got " +
                         std::to_string(x.cols()));
  if (!x.allFinite()) throw ParameterError("kpca transform: non-finite input");
  Eigen::MatrixXd kx = x * model.training.transpose();  // rows x N
  kx.array() += model.offset;
  kx = kx.unaryExpr([d = model.degree](double v) { return ipow(v, d); });
  const Eigen::VectorXd own_means = kx.rowwise().mean();
  kx.rowwise() -= model.kernel_row_means.transpose();
  kx.colwise() -= own_means;
  kx.array() += model.kernel_grand_mean;
  return kx * model.alphas;
}

std::vector<double> explained_variance_curve(const KpcaModel& model) {
  std::vector<double> out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
    acc += model.eigenvalues[i];
    out.push_back(model.spectrum_mass > 0.0
                      ? std::min(1.0, acc / model.spectrum_mass)
                      : 0.0);
  }
  return out;
}

std::string encode(const KpcaModel& m) {
  io::ByteWriter w;
  w.put_bytes("KPCA");
  w.put_u32(kFormatVersion);
  w.put_u64(m.num_training());
  w.put_u64(m.input_dim());
  w.put_u64(m.output_dim());
  w.put_u32(static_cast<std::uint32_t>(m.degree));
  w.put_f64(m.offset);
  for (Eigen::Index i = 0; i < m.training.rows(); ++i)
    for (Eigen::Index j = 0; j < m.training.cols(); ++j) w.put_f64(m.training(i, j));
  for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i) w.put_f64(m.eigenvalues[i]);
  for (Eigen::Index c = 0; c < m.alphas.cols(); ++c)
    for (Eigen::Index r = 0; r < m.alphas.rows(); ++r) w.put_f64(m.alphas(r, c));
  for (Eigen::Index i = 0; i < m.kernel_row_means.size(); ++i)
    w.put_f64(m.kernel_row_means[i]);
  w.put_f64(m.kernel_grand_mean);
  w.put_f64(m.spectrum_mass);
  return w.bytes();
}

KpcaModel decode(std::string_view bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic("KPCA");
  const std::uint32_t version = r.get_u32();
  if (version != kFormatVersion)
    throw IngestError(source + ": unsupported KPCA version " + std::to_string(version));
  const auto n = static_cast<Eigen::Index>(r.get_u64());
  const auto d = static_cast<Eigen::Index>(r.get_u64());
  const auto k = static_cast<Eigen::Index>(r.get_u64());
  KpcaModel m;
  m.degree = static_cast<int>(r.get_u32());
  m.offset = r.get_f64();
  const std::size_t expected =
      static_cast<std::size_t>(n * d + k + k * n + n + 2) * 8;
  if (r.remaining() != expected)
    throw IngestError(source + ": payload size does not match header");
  m.training.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m.training(i, j) = r.get_f64();
  m.eigenvalues.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) m.eigenvalues[i] = r.get_f64();
  m.alphas.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index i = 0; i < n; ++i) m.alphas(i, c) = r.get_f64();
  m.kernel_row_means.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) m.kernel_row_means[i] = r.get_f64();
  m.kernel_grand_mean = r.get_f64();
  m.spectrum_mass = r.get_f64();
  return m;
}

void write_file(const std::filesystem::path& path, const KpcaModel& model) {
  io::write_file_atomic(path, encode(model));
}

KpcaModel read_file(const std::filesystem::path& path) {
  return decode(io::read_file(path), path.string());
}

}  // namespace e2t::kpca
