// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "binio.hpp"
#include "error.hpp"

namespace e2t {

std::size_t provenance_dim(Provenance p) {
  switch (p) {
    case Provenance::kRaw155: return 155;
    case Provenance::kKpca30: return 30;
    case Provenance::kGan32: return 32;
  }
  throw ParameterError("unknown provenance");
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kRaw155: return "raw155";
    case Provenance::kKpca30: return "kpca30";
    case Provenance::kGan32: return "gan32";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "raw155") return Provenance::kRaw155;
  if (name == "kpca30") return Provenance::kKpca30;
  if (name == "gan32") return Provenance::kGan32;
  throw ParameterError("unknown provenance '" + std::string(name) +
                       "' (expected raw155, kpca30 or gan32)");
}

void validate(const FeatureSequence& seq) {
  if (seq.dim() != provenance_dim(seq.provenance))
    throw ParameterError("feature sequence '" + seq.recording_id + "' has D=" +
                         std::to_string(seq.dim()) + " but provenance " +
                         provenance_name(seq.provenance) + " requires " +
                         std::to_string(provenance_dim(seq.provenance)));
  if (!seq.frames.allFinite())
    throw NumericError("feature sequence '" + seq.recording_id +
                       "' contains non-finite values");
}

}  // namespace e2t

namespace e2t::features {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

// Cached FFTW r2c plans keyed by length. Planning is not thread-safe in FFTW,
// execution with the new-array interface is.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  fftw_plan plan_for(std::size_t n) {
    std::lock_guard lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

  ~FftPlans() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::size_t, fftw_plan> plans_;
};

void require_len(std::span<const double> w, std::size_t min, const char* what) {
  if (w.size() < min)
    throw ParameterError(std::string(what) + ": window needs at least " +
                         std::to_string(min) + " samples, got " +
                         std::to_string(w.size()));
}

}  // namespace

WindowSpec WindowSpec::for_rate(double sample_rate_hz,
                                std::size_t window_len_samples) {
  WindowSpec spec;
  spec.sample_rate_hz = sample_rate_hz;
  spec.window_len_samples = window_len_samples;
  spec.hop_samples = static_cast<std::size_t>(std::llround(sample_rate_hz / kFrameRateHz));
  validate(spec);
  return spec;
}

void validate(const WindowSpec& spec) {
  if (spec.window_len_samples < 2)
    throw ParameterError("window length must be at least 2 samples");
  if (spec.hop_samples == 0) throw ParameterError("hop must be positive");
  if (std::abs(spec.frame_rate_hz() - kFrameRateHz) > 1e-9)
    throw ParameterError("hop " + std::to_string(spec.hop_samples) +
                         " at " + std::to_string(spec.sample_rate_hz) +
                         " Hz does not give a 100 Hz frame rate");
}

double rms(std::span<const double> w) {
  require_len(w, 1, "rms");
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return std::sqrt(acc / static_cast<double>(w.size()));
}

double zero_crossing_rate(std::span<const double> w) {
  require_len(w, 2, "zero_crossing_rate");
  std::size_t crossings = 0;
  for (std::size_t i = 1; i < w.size(); ++i)
    if ((w[i - 1] >= 0.0) != (w[i] >= 0.0)) ++crossings;
  return static_cast<double>(crossings) / static_cast<double>(w.size() - 1);
}

double moving_window_average(std::span<const double> w) {
  require_len(w, 1, "moving_window_average");
  double acc = 0.0;
  for (double v : w) acc += v;
  return acc / static_cast<double>(w.size());
}

double kurtosis(std::span<const double> w) {
  require_len(w, 4, "kurtosis");
  const double n = static_cast<double>(w.size());
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : w) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 < 1e-12) return 0.0;
  return m4 / (m2 * m2);
}

double power_spectral_entropy(std::span<const double> w) {
  require_len(w, 4, "power_spectral_entropy");
  const std::size_t n = w.size();
  std::vector<fftw_complex> spec(n / 2 + 1);
  std::vector<double> in(w.begin(), w.end());
  fftw_execute_dft_r2c(FftPlans::instance().plan_for(n), in.data(), spec.data());

  const std::size_t bins = n / 2;  // k = 1 .. n/2
  std::vector<double> power(bins);
  double total = 0.0;
  for (std::size_t k = 1; k <= bins; ++k) {
    power[k - 1] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    total += power[k - 1];
  }
  if (!(total > 0.0) || bins < 2) return 0.0;
  double h = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    const double q = p / total;
    h -= q * std::log(q);
  }
  return std::clamp(h / std::log(static_cast<double>(bins)), 0.0, 1.0);
}

std::size_t frame_count(std::size_t num_samples, const WindowSpec& spec) {
  if (num_samples < spec.window_len_samples) return 0;
  return (num_samples - spec.window_len_samples) / spec.hop_samples + 1;
}

FeatureSequence extract_features(const EegRecording& rec, const WindowSpec& spec) {
  validate(rec);
  validate(spec);
  if (rec.num_channels() != kExpectedChannels)
    throw ParameterError("extract_features: recording '" + rec.id + "' has " +
                         std::to_string(rec.num_channels()) + " channels, expected " +
                         std::to_string(kExpectedChannels));
  if (std::abs(rec.sample_rate_hz - spec.sample_rate_hz) > 1e-9)
    throw ParameterError("extract_features: window spec is for " +
                         std::to_string(spec.sample_rate_hz) + " Hz, recording '" +
                         rec.id + "' is " + std::to_string(rec.sample_rate_hz) + " Hz");
  const std::size_t frames = frame_count(rec.num_samples(), spec);
  if (frames == 0)
    throw ParameterError("extract_features: recording '" + rec.id + "' has " +
                         std::to_string(rec.num_samples()) +
                         " samples, shorter than one window of " +
                         std::to_string(spec.window_len_samples));

  FeatureSequence out;
  out.frame_rate_hz = spec.frame_rate_hz();
  out.provenance = Provenance::kRaw155;
  out.recording_id = rec.id;
  out.transcript = rec.transcript;
  out.frames.resize(static_cast<Eigen::Index>(frames),
                    static_cast<Eigen::Index>(rec.num_channels() * kFeaturesPerChannel));
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    const double* row = rec.data.row(static_cast<Eigen::Index>(c)).data();
    for (std::size_t t = 0; t < frames; ++t) {
      std::span<const double> w(row + t * spec.hop_samples, spec.window_len_samples);
      const auto r = static_cast<Eigen::Index>(t);
      const auto col = static_cast<Eigen::Index>(c * kFeaturesPerChannel);
      out.frames(r, col + 0) = rms(w);
      out.frames(r, col + 1) = zero_crossing_rate(w);
      out.frames(r, col + 2) = moving_window_average(w);
      out.frames(r, col + 3) = kurtosis(w);
      out.frames(r, col + 4) = power_spectral_entropy(w);
    }
  }
  return out;
}

std::string encode(const FeatureSequence& seq) {
  validate(seq);
  io::ByteWriter w;
  w.put_bytes("EEGF");
  w.put_u32(kFormatVersion);
  w.put_u64(seq.num_frames());
  w.put_u64(seq.dim());
  w.put_f64(seq.frame_rate_hz);
  w.put_u8(static_cast<std::uint8_t>(seq.provenance));
  for (Eigen::Index t = 0; t < seq.frames.rows(); ++t)
    for (Eigen::Index d = 0; d < seq.frames.cols(); ++d) w.put_f64(seq.frames(t, d));
  return w.bytes();
}

FeatureSequence decode(std::string_view bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic("EEGF");
  const std::uint32_t version = r.get_u32();
  if (version != kFormatVersion)
    throw IngestError(source + ": unsupported EEGF version " + std::to_string(version));
  const std::uint64_t t = r.get_u64();
  const std::uint64_t d = r.get_u64();
  FeatureSequence seq;
  seq.frame_rate_hz = r.get_f64();
  const std::uint8_t prov = r.get_u8();
  if (prov > static_cast<std::uint8_t>(Provenance::kGan32))
    throw IngestError(source + ": unknown provenance byte " + std::to_string(prov));
  seq.provenance = static_cast<Provenance>(prov);
  if (r.remaining() != t * d * 8)
    throw IngestError(source + ": payload size does not match T x D");
  seq.frames.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < seq.frames.rows(); ++i)
    for (Eigen::Index j = 0; j < seq.frames.cols(); ++j) seq.frames(i, j) = r.get_f64();
  validate(seq);
  return seq;
}

void write_file(const std::filesystem::path& path, const FeatureSequence& seq) {
  io::write_file_atomic(path, encode(seq));
}

FeatureSequence read_file(const std::filesystem::path& path) {
  return decode(io::read_file(path), path.string());
}

std::string to_csv(const FeatureSequence& seq) {
  std::string out = "frame,t_ms";
  for (std::size_t d = 0; d < seq.dim(); ++d) out += ",f" + std::to_string(d);
  out += '\n';
  for (Eigen::Index t = 0; t < seq.frames.rows(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += io::format_double(static_cast<double>(t) * 1000.0 / seq.frame_rate_hz);
    for (Eigen::Index d = 0; d < seq.frames.cols(); ++d) {
      out += ',';
      out += io::format_double(seq.frames(t, d));
    }
    out += '\n';
  }
  return out;
}

}  // namespace e2t::features
