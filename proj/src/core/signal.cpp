// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "signal.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace e2t {

void validate(const EegRecording& rec) {
  if (rec.channels.empty())
    throw ParameterError("recording '" + rec.id + "' has no channels");
  if (static_cast<std::size_t>(rec.data.rows()) != rec.channels.size())
    throw ParameterError("recording '" + rec.id + "': " +
                         std::to_string(rec.data.rows()) + " data rows for " +
                         std::to_string(rec.channels.size()) + " channels");
  if (rec.data.cols() < 1)
    throw ParameterError("recording '" + rec.id + "' has no samples");
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz))
    throw ParameterError("recording '" + rec.id + "': sample rate must be > 0");
  if (!rec.data.allFinite())
    throw ParameterError("recording '" + rec.id + "' contains non-finite samples");
}

}  // namespace e2t

namespace e2t::signal {

namespace {

using cplx = std::complex<double>;

// Expands prod(z - r_i) into real coefficients, highest power first.
std::vector<double> real_poly(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * r;
    }
    c = std::move(next);
  }
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

}  // namespace

IirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0))
    throw ParameterError("bandpass: sample rate must be positive");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < sample_rate_hz / 2.0))
    throw ParameterError("bandpass: need 0 < low < high < fs/2, got low=" +
                         std::to_string(low_hz) + " high=" +
                         std::to_string(high_hz) + " fs=" +
                         std::to_string(sample_rate_hz));

  constexpr int kProtoOrder = 2;
  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sample_rate_hz;
  const double wl = fs2 * std::tan(pi * low_hz / sample_rate_hz);
  const double wh = fs2 * std::tan(pi * high_hz / sample_rate_hz);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  std::vector<cplx> analog_poles;
  for (int k = 0; k < kProtoOrder; ++k) {
    const cplx p = std::polar(
        1.0, pi * (2.0 * k + 1.0 + kProtoOrder) / (2.0 * kProtoOrder));
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0sq);
    analog_poles.push_back((pb + disc) / 2.0);
    analog_poles.push_back((pb - disc) / 2.0);
  }

  // kProtoOrder analog zeros at s = 0 map to z = 1; the zeros at infinity map
  // to z = -1.
  std::vector<cplx> zeros(kProtoOrder, cplx(1.0));
  zeros.insert(zeros.end(), kProtoOrder, cplx(-1.0));
  std::vector<cplx> digital_poles;
  cplx den = 1.0;
  for (const cplx& p : analog_poles) {
    digital_poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  const double gain =
      (std::pow(bw, kProtoOrder) * std::pow(fs2, kProtoOrder) / den).real();

  IirFilter f;
  f.b = real_poly(zeros);
  for (double& c : f.b) c *= gain;
  f.a = real_poly(digital_poles);
  f.design = {"bandpass", low_hz, high_hz, 0.0, 2 * kProtoOrder, sample_rate_hz};
  return f;
}

IirFilter design_notch(double center_hz, double quality, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0))
    throw ParameterError("notch: sample rate must be positive");
  if (!(center_hz > 0.0 && center_hz < sample_rate_hz / 2.0))
    throw ParameterError("notch: need 0 < center < fs/2, got center=" +
                         std::to_string(center_hz) + " fs=" +
                         std::to_string(sample_rate_hz));
  if (!(quality > 0.0)) throw ParameterError("notch: quality must be positive");

  const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate_hz;
  const double bw = w0 / quality;
  const double gain = 1.0 / (1.0 + std::tan(bw / 2.0));
  const double c = std::cos(w0);

  IirFilter f;
  f.b = {gain, -2.0 * gain * c, gain};
  f.a = {1.0, -2.0 * gain * c, 2.0 * gain - 1.0};
  f.design = {"notch", center_hz, center_hz, quality, 2, sample_rate_hz};
  return f;
}

std::complex<double> frequency_response(const IirFilter& f, double freq_hz,
                                        double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  cplx num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < f.b.size(); ++k)
    num += f.b[k] * std::polar(1.0, -w * static_cast<double>(k));
  for (std::size_t k = 0; k < f.a.size(); ++k)
    den += f.a[k] * std::polar(1.0, -w * static_cast<double>(k));
  return num / den;
}

std::vector<std::complex<double>> poles(const IirFilter& f) {
  const std::size_t n = f.a.size() - 1;
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) companion(0, j) = -f.a[j + 1] / f.a[0];
  for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(es.eigenvalues()[i]);
  return out;
}

bool is_stable(const IirFilter& f) {
  for (const cplx& p : poles(f))
    if (!(std::abs(p) < 1.0)) return false;
  return true;
}

std::vector<double> filter_samples(const IirFilter& f,
                                   const std::vector<double>& x) {
  if (f.b.empty() || f.a.empty() || f.a[0] == 0.0)
    throw ParameterError("filter: empty coefficients or a[0] == 0");
  const double a0 = f.a[0];
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.b.size() && k <= n; ++k) acc += f.b[k] * x[n - k];
    for (std::size_t k = 1; k < f.a.size() && k <= n; ++k) acc -= f.a[k] * y[n - k];
    y[n] = acc / a0;
    if (!std::isfinite(y[n]))
      throw NumericError("filter output became non-finite at sample " +
                         std::to_string(n));
  }
  return y;
}

EegRecording apply_filter(const IirFilter& f, const EegRecording& rec) {
  validate(rec);
  if (!is_stable(f)) throw NumericError("filter has poles on or outside the unit circle");
  EegRecording out = rec;
  std::vector<double> row(rec.num_samples());
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    for (std::size_t n = 0; n < row.size(); ++n) row[n] = rec.data(c, n);
    std::vector<double> y;
    try {
      y = filter_samples(f, row);
    } catch (const NumericError& e) {
      throw NumericError("recording '" + rec.id + "' channel " +
                         rec.channels[c] + ": " + e.what());
    }
    for (std::size_t n = 0; n < row.size(); ++n) out.data(c, n) = y[n];
  }
  return out;
}

}  // namespace e2t::signal
