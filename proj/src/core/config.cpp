// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "config.hpp"

#include <set>

#include <json.hpp>

#include "binio.hpp"
#include "error.hpp"
#include "features.hpp"

namespace e2t {

using nlohmann::ordered_json;

void validate(const ExperimentConfig& c) {
  if (c.work_dir.empty()) throw ParameterError("config: work_dir must not be empty");
  if (c.manifest.empty()) corpus::validate(c.synth);
  const auto& p = c.preprocess;
  if (!(p.bandpass_low_hz > 0.0 && p.bandpass_low_hz < p.bandpass_high_hz))
    throw ParameterError("config: need 0 < bandpass_low_hz < bandpass_high_hz");
  if (!(p.notch_hz > 0.0) || !(p.notch_quality > 0.0))
    throw ParameterError("config: notch frequency and quality must be > 0");
  if (!(p.kurtosis_threshold > 0.0)) throw ParameterError("config: kurtosis_threshold must be > 0");
  if (p.ica_max_iterations < 1 || !(p.ica_tolerance > 0.0))
    throw ParameterError("config: ICA iterations and tolerance must be positive");
  if (c.window_samples < 2) throw ParameterError("config: window_samples must be >= 2");
  if (c.kpca.components < 1 || c.kpca.degree < 1 || c.kpca.max_fit_frames < c.kpca.components)
    throw ParameterError("config: invalid kpca settings");
  if (c.kpca.components != provenance_dim(Provenance::kKpca30))
    throw ParameterError("config: kpca.components must be 30 to produce kpca30 features");
  if (c.generator.tcn_channels != provenance_dim(Provenance::kGan32))
    throw ParameterError("config: gan.tcn_channels must be 32 to produce gan32 features");
  gan::validate(c.gan_train);
  if (c.ctc_train.epochs < 1 || c.ctc_train.batch_size < 1)
    throw ParameterError("config: asr epochs and batch_size must be >= 1");
  if (!(c.ctc_model.dropout >= 0.0 && c.ctc_model.dropout < 1.0))
    throw ParameterError("config: asr dropout must be in [0, 1)");
  if (c.decoder.lm_order < 1 || !(c.decoder.lm_add_k > 0.0))
    throw ParameterError("config: lm order must be >= 1 and add_k > 0");
  if (c.decoder.beam.beam_width < 1) throw ParameterError("config: beam_width must be >= 1");
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0))
    throw ParameterError("config: train_ratio must be in (0, 1)");
  if (c.buckets.empty()) throw ParameterError("config: buckets must not be empty");
  for (std::size_t b : c.buckets)
    if (b < 2) throw ParameterError("config: every bucket must hold at least 2 recordings");
}

std::string to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["manifest"] = c.manifest;
  j["work_dir"] = c.work_dir;
  j["seed"] = c.seed;
  j["synth"] = {{"sentences", c.synth.sentences},
                {"examples_per_sentence", c.synth.examples_per_sentence},
                {"channels", c.synth.channels},
                {"sample_rate_hz", c.synth.sample_rate_hz},
                {"duration_s", c.synth.duration_s},
                {"latent_sources", c.synth.latent_sources},
                {"noise_level", c.synth.noise_level},
                {"line_noise_amplitude", c.synth.line_noise_amplitude},
                {"burst_rate_hz", c.synth.burst_rate_hz},
                {"dataset_tag", c.synth.dataset_tag}};
  const auto& p = c.preprocess;
  j["preprocess"] = {{"bandpass_low_hz", p.bandpass_low_hz},
                     {"bandpass_high_hz", p.bandpass_high_hz},
                     {"notch_hz", p.notch_hz},
                     {"notch_quality", p.notch_quality},
                     {"ica_components", p.ica_components},
                     {"kurtosis_threshold", p.kurtosis_threshold},
                     {"ica_max_iterations", p.ica_max_iterations},
                     {"ica_tolerance", p.ica_tolerance}};
  j["features"] = {{"window_samples", c.window_samples}};
  j["kpca"] = {{"components", c.kpca.components},
               {"degree", c.kpca.degree},
               {"offset", c.kpca.offset},
               {"max_fit_frames", c.kpca.max_fit_frames}};
  j["gan"] = {{"epochs", c.gan_train.epochs},
              {"batch_size", c.gan_train.batch_size},
              {"learning_rate", c.gan_train.adam.learning_rate},
              {"clamp_eps", c.gan_train.clamp_eps},
              {"generator_gru1_units", c.generator.gru1_units},
              {"generator_gru2_units", c.generator.gru2_units},
              {"tcn_channels", c.generator.tcn_channels},
              {"tcn_kernel", c.generator.tcn_kernel},
              {"tcn_dilations", c.generator.tcn_dilations},
              {"discriminator_gru_units", c.discriminator.gru_units},
              {"discriminator_label_units", c.discriminator.label_units},
              {"discriminator_joint_units", c.discriminator.joint_units}};
  j["asr"] = {{"epochs", c.ctc_train.epochs},
              {"batch_size", c.ctc_train.batch_size},
              {"learning_rate", c.ctc_train.adam.learning_rate},
              {"gru1_units", c.ctc_model.gru1_units},
              {"gru2_units", c.ctc_model.gru2_units},
              {"dropout", c.ctc_model.dropout}};
  j["decoder"] = {{"lm_order", c.decoder.lm_order},
                  {"lm_add_k", c.decoder.lm_add_k},
                  {"lm_weight", c.decoder.beam.lm_weight},
                  {"word_bonus", c.decoder.beam.word_bonus},
                  {"beam_width", c.decoder.beam.beam_width}};
  j["split"] = {{"train_ratio", c.train_ratio}};
  j["report"] = {{"buckets", c.buckets}};
  return j.dump(2) + "\n";
}

namespace {

// Reads known keys out of one JSON object and rejects the rest.
class Section {
 public:
  Section(const ordered_json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j_.is_object()) fail(path_.empty() ? "top level must be an object" : "must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail_key(key, "has the wrong type");
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) fail_key(key, "must be a non-negative integer");
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const ordered_json kEmpty = ordered_json::object();
    return Section(it == j_.end() ? kEmpty : *it, qualified(key), source_);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail_key(k, "is not a recognized setting");
  }

 private:
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParameterError(source_ + ": " + (path_.empty() ? "" : "'" + path_ + "' ") + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    throw ParameterError(source_ + ": key '" + qualified(key) + "' " + msg);
  }

  const ordered_json& j_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(source + ": invalid JSON: " + e.what());
  }
  ExperimentConfig c;
  Section root(j, "", source);
  root.get("manifest", c.manifest);
  root.get("work_dir", c.work_dir);
  root.get("seed", c.seed);
  {
    Section s = root.sub("synth");
    s.get("sentences", c.synth.sentences);
    s.get("examples_per_sentence", c.synth.examples_per_sentence);
    s.get("channels", c.synth.channels);
    s.get("sample_rate_hz", c.synth.sample_rate_hz);
    s.get("duration_s", c.synth.duration_s);
    s.get("latent_sources", c.synth.latent_sources);
    s.get("noise_level", c.synth.noise_level);
    s.get("line_noise_amplitude", c.synth.line_noise_amplitude);
    s.get("burst_rate_hz", c.synth.burst_rate_hz);
    s.get("dataset_tag", c.synth.dataset_tag);
    s.finish();
  }
  {
    Section s = root.sub("preprocess");
    auto& p = c.preprocess;
    s.get("bandpass_low_hz", p.bandpass_low_hz);
    s.get("bandpass_high_hz", p.bandpass_high_hz);
    s.get("notch_hz", p.notch_hz);
    s.get("notch_quality", p.notch_quality);
    s.get("ica_components", p.ica_components);
    s.get("kurtosis_threshold", p.kurtosis_threshold);
    s.get("ica_max_iterations", p.ica_max_iterations);
    s.get("ica_tolerance", p.ica_tolerance);
    s.finish();
  }
  {
    Section s = root.sub("features");
    s.get("window_samples", c.window_samples);
    s.finish();
  }
  {
    Section s = root.sub("kpca");
    s.get("components", c.kpca.components);
    s.get("degree", c.kpca.degree);
    s.get("offset", c.kpca.offset);
    s.get("max_fit_frames", c.kpca.max_fit_frames);
    s.finish();
  }
  {
    Section s = root.sub("gan");
    s.get("epochs", c.gan_train.epochs);
    s.get("batch_size", c.gan_train.batch_size);
    s.get("learning_rate", c.gan_train.adam.learning_rate);
    s.get("clamp_eps", c.gan_train.clamp_eps);
    s.get("generator_gru1_units", c.generator.gru1_units);
    s.get("generator_gru2_units", c.generator.gru2_units);
    s.get("tcn_channels", c.generator.tcn_channels);
    s.get("tcn_kernel", c.generator.tcn_kernel);
    s.get("tcn_dilations", c.generator.tcn_dilations);
    s.get("discriminator_gru_units", c.discriminator.gru_units);
    s.get("discriminator_label_units", c.discriminator.label_units);
    s.get("discriminator_joint_units", c.discriminator.joint_units);
    s.finish();
  }
  {
    Section s = root.sub("asr");
    s.get("epochs", c.ctc_train.epochs);
    s.get("batch_size", c.ctc_train.batch_size);
    s.get("learning_rate", c.ctc_train.adam.learning_rate);
    s.get("gru1_units", c.ctc_model.gru1_units);
    s.get("gru2_units", c.ctc_model.gru2_units);
    s.get("dropout", c.ctc_model.dropout);
    s.finish();
  }
  {
    Section s = root.sub("decoder");
    s.get("lm_order", c.decoder.lm_order);
    s.get("lm_add_k", c.decoder.lm_add_k);
    s.get("lm_weight", c.decoder.beam.lm_weight);
    s.get("word_bonus", c.decoder.beam.word_bonus);
    s.get("beam_width", c.decoder.beam.beam_width);
    s.finish();
  }
  {
    Section s = root.sub("split");
    s.get("train_ratio", c.train_ratio);
    s.finish();
  }
  {
    Section s = root.sub("report");
    s.get("buckets", c.buckets);
    s.finish();
  }
  root.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_file(path), path.string());
}

}  // namespace e2t
