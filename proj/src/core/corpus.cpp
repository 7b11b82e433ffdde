// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "binio.hpp"
#include "error.hpp"
#include "nn.hpp"

namespace e2t::corpus {

namespace fs = std::filesystem;

const std::vector<std::string>& default_channel_names() {
  static const std::vector<std::string> names{
      "Fp1", "Fp2", "F7",  "F3",  "Fz",  "F4",  "F8", "FC5", "FC1", "FC2", "FC6",
      "T7",  "C3",  "Cz",  "C4",  "T8",  "TP9", "CP5", "CP1", "CP2", "CP6", "TP10",
      "P7",  "P3",  "Pz",  "P4",  "P8",  "PO9", "O1",  "Oz",  "O2"};
  return names;
}

const std::vector<std::string>& builtin_sentences() {
  static const std::vector<std::string> s{
      "turn on the light", "open the door",   "play some music", "call my family",
      "close the window",  "stop the alarm",  "i am hungry",     "bring me water",
  };
  return s;
}

void validate(const SyntheticCorpusSpec& spec) {
  if (spec.sentences.empty()) throw ParameterError("synthetic corpus: empty sentence list");
  if (spec.examples_per_sentence < 1)
    throw ParameterError("synthetic corpus: examples per sentence must be >= 1");
  if (spec.channels < 1) throw ParameterError("synthetic corpus: channels must be >= 1");
  if (!(spec.sample_rate_hz > 120.0))
    throw ParameterError("synthetic corpus: sample rate must exceed 120 Hz");
  if (!(spec.duration_s >= 1.0)) throw ParameterError("synthetic corpus: duration must be >= 1 s");
  if (spec.latent_sources < 1)
    throw ParameterError("synthetic corpus: latent sources must be >= 1");
  if (!(spec.noise_level >= 0.0) || !(spec.line_noise_amplitude >= 0.0) ||
      !(spec.burst_rate_hz >= 0.0))
    throw ParameterError("synthetic corpus: noise, line and burst levels must be >= 0");
}

std::vector<std::vector<double>> sentence_frequencies(const SyntheticCorpusSpec& spec) {
  constexpr double kLow = 4.0, kHigh = 30.0, kMinGap = 1.0;
  std::vector<double> used;
  std::vector<std::vector<double>> out;
  for (const auto& sentence : spec.sentences) {
    std::mt19937_64 rng(nn::derive_seed(0, "sentence:" + sentence));
    // Whole-Hz grid: with the 1 Hz gap every slot blocks exactly one other.
    std::uniform_int_distribution<int> whole_hz(static_cast<int>(kLow), static_cast<int>(kHigh));
    std::vector<double> freqs;
    for (std::size_t k = 0; k < spec.latent_sources; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const double f = whole_hz(rng);
        const bool clash = std::any_of(used.begin(), used.end(),
                                       [&](double u) { return std::abs(u - f) < kMinGap; });
        if (!clash) {
          used.push_back(f);
          freqs.push_back(f);
          placed = true;
        }
      }
      // Random draws can miss the last free gaps; scan the grid before giving up.
      for (int h = static_cast<int>(kLow); h <= static_cast<int>(kHigh) && !placed; ++h) {
        const double f = h;
        if (std::none_of(used.begin(), used.end(),
                         [&](double u) { return std::abs(u - f) < kMinGap; })) {
          used.push_back(f);
          freqs.push_back(f);
          placed = true;
        }
      }
      if (!placed)
        throw ParameterError("synthetic corpus: cannot assign distinct 4-30 Hz frequencies to " +
                             std::to_string(spec.sentences.size()) + " sentences x " +
                             std::to_string(spec.latent_sources) + " sources");
    }
    out.push_back(std::move(freqs));
  }
  return out;
}

std::vector<EegRecording> generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  validate(spec);
  const auto freqs = sentence_frequencies(spec);
  const std::size_t n_ch = spec.channels;
  const std::size_t n_samp =
      static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<std::string> names = default_channel_names();
  if (n_ch != names.size()) {
    names.clear();
    for (std::size_t c = 0; c < n_ch; ++c) names.push_back("Ch" + std::to_string(c + 1));
  }

  // Fixed per-sentence mixing, and one burst topography for the corpus.
  std::vector<RowMatrix> mixing;
  for (const auto& sentence : spec.sentences) {
    std::mt19937_64 rng(nn::derive_seed(spec.seed, "mixing:" + sentence));
    std::normal_distribution<double> g(0.0, 1.0);
    RowMatrix m(n_ch, spec.latent_sources);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    mixing.push_back(std::move(m));
  }
  Eigen::VectorXd burst_topo(n_ch);
  {
    std::mt19937_64 rng(nn::derive_seed(spec.seed, "burst-topography"));
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t c = 0; c < n_ch; ++c) burst_topo[c] = g(rng);
  }

  const std::size_t width = std::to_string(spec.sentences.size() * spec.examples_per_sentence).size();
  std::vector<EegRecording> out;
  out.reserve(spec.sentences.size() * spec.examples_per_sentence);
  for (std::size_t e = 0; e < spec.examples_per_sentence; ++e) {
    for (std::size_t s = 0; s < spec.sentences.size(); ++s) {
      const std::size_t index = out.size();
      std::string num = std::to_string(index + 1);
      num.insert(0, std::max<std::size_t>(width, 4) - num.size(), '0');

      EegRecording rec;
      rec.id = spec.dataset_tag + "-" + num;
      rec.transcript = spec.sentences[s];
      rec.subject = "synthetic";
      rec.dataset_tag = spec.dataset_tag;
      rec.channels = names;
      rec.sample_rate_hz = spec.sample_rate_hz;

      std::mt19937_64 rng(nn::derive_seed(spec.seed, "recording:" + rec.id));
      std::normal_distribution<double> g(0.0, 1.0);
      std::uniform_real_distribution<double> u(0.0, 1.0);

      // Band-limited latents: three close partials around each center.
      RowMatrix latent = RowMatrix::Zero(spec.latent_sources, n_samp);
      for (std::size_t k = 0; k < spec.latent_sources; ++k) {
        const double f0 = freqs[s][k];
        const double offsets[3] = {-0.5, 0.0, 0.5};
        const double weights[3] = {0.5, 1.0, 0.5};
        for (int p = 0; p < 3; ++p) {
          const double phase = two_pi * u(rng);
          const double f = f0 + offsets[p];
          for (std::size_t i = 0; i < n_samp; ++i)
            latent(k, i) += weights[p] *
                            std::sin(two_pi * f * static_cast<double>(i) / spec.sample_rate_hz + phase);
        }
      }
      rec.data = mixing[s] * latent;

      const double line_phase = two_pi * u(rng);
      for (std::size_t i = 0; i < n_samp; ++i) {
        const double line = spec.line_noise_amplitude *
                            std::sin(two_pi * 60.0 * static_cast<double>(i) / spec.sample_rate_hz +
                                     line_phase);
        for (std::size_t c = 0; c < n_ch; ++c) rec.data(c, i) += line + spec.noise_level * g(rng);
      }

      std::poisson_distribution<int> n_bursts(spec.burst_rate_hz * spec.duration_s);
      const int bursts = spec.burst_rate_hz > 0.0 ? n_bursts(rng) : 0;
      const std::size_t burst_len =
          std::max<std::size_t>(1, static_cast<std::size_t>(0.04 * spec.sample_rate_hz));
      for (int b = 0; b < bursts; ++b) {
        const std::size_t start = static_cast<std::size_t>(u(rng) * static_cast<double>(n_samp));
        const double amp = 8.0 * (u(rng) < 0.5 ? -1.0 : 1.0);
        for (std::size_t i = start; i < std::min(n_samp, start + burst_len); ++i) {
          const double x = static_cast<double>(i - start) / static_cast<double>(burst_len);
          const double shape = amp * std::sin(std::numbers::pi * x);
          for (std::size_t c = 0; c < n_ch; ++c) rec.data(c, i) += shape * burst_topo[c];
        }
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

DatasetSplit split_train_test(const std::vector<std::string>& ids, double ratio,
                              std::uint64_t seed) {
  if (ids.size() < 2) throw ParameterError("split: need at least 2 items");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split: ratio must be in (0, 1)");
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
    throw ParameterError("split: duplicate ids");
  std::vector<std::string> order = ids;
  std::mt19937_64 rng(nn::derive_seed(seed, "split"));
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
  DatasetSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return split;
}

std::string recording_to_csv(const EegRecording& rec) {
  validate(rec);
  std::string out = "t_ms";
  for (const auto& c : rec.channels) out += "," + io::csv_quote(c);
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < rec.num_samples(); ++i) {
    const double t_ms = static_cast<double>(i) * 1000.0 / rec.sample_rate_hz;
    out.append(buf, std::to_chars(buf, buf + sizeof(buf), t_ms).ptr);
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      out += ',';
      out.append(buf, std::to_chars(buf, buf + sizeof(buf), rec.data(c, i)).ptr);
    }
    out += '\n';
  }
  return out;
}

EegRecording recording_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IngestError(source + ": empty recording file", 1);
  auto header = io::split_csv_line(line, 1, source);
  if (header.size() < 2 || header[0] != "t_ms")
    throw IngestError(source + ":1: header must be t_ms followed by channel names", 1);
  EegRecording rec;
  rec.channels.assign(header.begin() + 1, header.end());
  const std::size_t n_ch = rec.channels.size();

  std::vector<double> t;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    std::size_t fields = 0;
    while (true) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc() || (res.ptr != end && *res.ptr != ','))
        throw IngestError(source + ":" + std::to_string(line_no) + ": malformed number", line_no);
      if (fields == 0)
        t.push_back(v);
      else
        values.push_back(v);
      ++fields;
      if (res.ptr == end) break;
      p = res.ptr + 1;
    }
    if (fields != n_ch + 1)
      throw IngestError(source + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(n_ch + 1) + " fields, got " + std::to_string(fields),
                        line_no);
  }
  if (t.size() < 2) throw IngestError(source + ": need at least 2 samples", line_no);
  const double span_ms = t.back() - t.front();
  if (!(span_ms > 0.0)) throw IngestError(source + ": t_ms must increase", line_no);
  rec.sample_rate_hz = 1000.0 * static_cast<double>(t.size() - 1) / span_ms;
  const std::size_t n = t.size();
  rec.data.resize(static_cast<Eigen::Index>(n_ch), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n_ch; ++c) rec.data(c, i) = values[i * n_ch + c];
  return rec;
}

namespace {
const char* kManifestHeader = "id,subject,dataset_tag,transcript,path";
}

void save_corpus(const std::vector<EegRecording>& recordings, const fs::path& dir) {
  std::string manifest = std::string(kManifestHeader) + "\n";
  std::set<std::string> seen;
  for (const auto& rec : recordings) {
    if (rec.id.empty() || rec.id.find_first_of("/\\") != std::string::npos)
      throw ParameterError("save_corpus: invalid recording id '" + rec.id + "'");
    if (!seen.insert(rec.id).second)
      throw ParameterError("save_corpus: duplicate recording id '" + rec.id + "'");
    const std::string rel = "recordings/" + rec.id + ".csv";
    io::write_file_atomic(dir / rel, recording_to_csv(rec));
    manifest += io::csv_quote(rec.id) + "," + io::csv_quote(rec.subject) + "," +
                io::csv_quote(rec.dataset_tag) + "," + io::csv_quote(rec.transcript) + "," +
                io::csv_quote(rel) + "\n";
  }
  io::write_file_atomic(dir / "manifest.csv", manifest);
}

std::vector<EegRecording> load_manifest(const fs::path& manifest, std::size_t expected_channels) {
  const std::string source = manifest.string();
  std::istringstream in(io::read_file(manifest));
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IngestError(source + ": empty manifest", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader)
    throw IngestError(source + ":1: expected header '" + std::string(kManifestHeader) + "'", 1);

  std::vector<EegRecording> out;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto f = io::split_csv_line(line, line_no, source);
    if (f.size() != 5)
      throw IngestError(where + ": expected 5 fields, got " + std::to_string(f.size()), line_no);
    if (f[0].empty()) throw IngestError(where + ": empty id", line_no);
    if (!seen.insert(f[0]).second) throw IngestError(where + ": duplicate id '" + f[0] + "'", line_no);
    const fs::path csv = manifest.parent_path() / f[4];
    if (!fs::exists(csv))
      throw IngestError(where + ": recording file not found: " + csv.string(), line_no);
    EegRecording rec = recording_from_csv(io::read_file(csv), csv.string());
    rec.id = f[0];
    rec.subject = f[1];
    rec.dataset_tag = f[2];
    rec.transcript = f[3];
    if (rec.num_channels() != expected_channels)
      throw IngestError(where + ": recording '" + rec.id + "' has " +
                            std::to_string(rec.num_channels()) + " channels, pipeline expects " +
                            std::to_string(expected_channels),
                        line_no);
    try {
      validate(rec);
    } catch (const ParameterError& e) {
      throw IngestError(where + ": " + e.what(), line_no);
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw IngestError(source + ": manifest lists no recordings", line_no);
  return out;
}

}  // namespace e2t::corpus
