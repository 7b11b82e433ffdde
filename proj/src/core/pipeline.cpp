// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asr.hpp"
#include "binio.hpp"
#include "corpus.hpp"
#include "ctc.hpp"
#include "error.hpp"
#include "gan.hpp"
#include "ica.hpp"
#include "kpca.hpp"
#include "lm.hpp"
#include "nn.hpp"
#include "signal.hpp"
#include "wer.hpp"

namespace e2t::pipeline {

namespace fs = std::filesystem;

fs::path WorkDir::features_dir(Provenance p) const {
  return root / "features" / provenance_name(p);
}
fs::path WorkDir::asr_dir(Provenance p) const { return root / "asr" / provenance_name(p); }
fs::path WorkDir::eval_dir(Provenance p) const { return root / "eval" / provenance_name(p); }
fs::path WorkDir::marker(const std::string& stage) const {
  return root / "stages" / (stage + ".done");
}

WorkDirLock::WorkDirLock(const fs::path& root) : path_(root / ".lock") {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create work dir " + root.string() + ": " + ec.message());
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f) {
    if (fs::exists(path_))
      throw IoError("work dir is in use: " + path_.string() +
                    " exists (delete it if no other command is running)");
    throw IoError("cannot create lock file " + path_.string());
  }
  std::fclose(f);
}

WorkDirLock::~WorkDirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

namespace {

const char* command_for_stage(const std::string& stage) {
  static const std::map<std::string, const char*> hints{
      {"synth", "eeg2text synth"},
      {"preprocess", "eeg2text preprocess"},
      {"features", "eeg2text features"},
      {"kpca", "eeg2text kpca"},
      {"gan", "eeg2text gan"},
      {"asr-raw155", "eeg2text asr --provenance raw155"},
      {"asr-kpca30", "eeg2text asr --provenance kpca30"},
      {"asr-gan32", "eeg2text asr --provenance gan32"},
      {"eval-raw155", "eeg2text eval --provenance raw155"},
      {"eval-kpca30", "eeg2text eval --provenance kpca30"},
      {"eval-gan32", "eeg2text eval --provenance gan32"},
  };
  auto it = hints.find(stage);
  return it == hints.end() ? "eeg2text all" : it->second;
}

void require(const WorkDir& w, const std::string& stage) {
  if (!fs::exists(w.marker(stage)))
    throw PrerequisiteError("stage '" + stage + "' has not completed in " + w.root.string() +
                            "; run `" + command_for_stage(stage) + "` first");
}

void begin_stage(const WorkDir& w, const ExperimentConfig& config, const std::string& stage) {
  std::error_code ec;
  fs::remove(w.marker(stage), ec);
  io::write_file_atomic(w.root / "config.json", to_json(config));
}

void finish_stage(const WorkDir& w, const std::string& stage) {
  io::write_file_atomic(w.marker(stage), "done\n");
}

std::string provenance_stage(const char* prefix, Provenance p) {
  return std::string(prefix) + "-" + provenance_name(p);
}

const char* producer_stage(Provenance p) {
  switch (p) {
    case Provenance::kRaw155: return "features";
    case Provenance::kKpca30: return "kpca";
    case Provenance::kGan32: return "gan";
  }
  return "features";
}

void read_csv_rows(const fs::path& path, const std::string& header,
                   std::vector<std::vector<std::string>>& rows) {
  std::istringstream in(io::read_file(path));
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw IngestError(path.string() + ": empty file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw IngestError(path.string() + ":1: expected header '" + header + "'", 1);
  const auto n_fields = io::split_csv_line(header, 1, path.string()).size();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = io::split_csv_line(line, line_no, path.string());
    if (f.size() != n_fields)
      throw IngestError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(n_fields) + " fields",
                        line_no);
    rows.push_back(std::move(f));
  }
}

// --- split ---------------------------------------------------------------

const char* kSplitHeader = "id,set";

void write_split(const WorkDir& w, const corpus::DatasetSplit& split,
                 const std::vector<std::string>& order) {
  const std::set<std::string> train(split.train.begin(), split.train.end());
  std::string out = std::string(kSplitHeader) + "\n";
  for (const auto& id : order) out += io::csv_quote(id) + "," + (train.count(id) ? "train" : "test") + "\n";
  io::write_file_atomic(w.split_file(), out);
}

// id -> is_train
std::map<std::string, bool> read_split(const WorkDir& w) {
  std::vector<std::vector<std::string>> rows;
  read_csv_rows(w.split_file(), kSplitHeader, rows);
  std::map<std::string, bool> out;
  for (const auto& r : rows) {
    if (r[1] != "train" && r[1] != "test")
      throw IngestError(w.split_file().string() + ": set must be train or test for '" + r[0] + "'");
    out[r[0]] = r[1] == "train";
  }
  return out;
}

// --- feature index -------------------------------------------------------

const char* kIndexHeader = "id,transcript,dataset_tag,frames,file";

struct IndexEntry {
  std::string id;
  std::string transcript;
  std::string file;
};

void write_features(const WorkDir& w, Provenance p, const std::vector<FeatureSequence>& seqs) {
  const fs::path dir = w.features_dir(p);
  std::string index = std::string(kIndexHeader) + "\n";
  for (const auto& s : seqs) {
    const std::string file = s.recording_id + ".eegf";
    features::write_file(dir / file, s);
    index += io::csv_quote(s.recording_id) + "," + io::csv_quote(s.transcript) + "," +
             io::csv_quote(s.dataset_tag) + "," + std::to_string(s.num_frames()) + "," +
             io::csv_quote(file) + "\n";
  }
  io::write_file_atomic(dir / "index.csv", index);
}

std::vector<FeatureSequence> read_features(const WorkDir& w, Provenance p) {
  const fs::path dir = w.features_dir(p);
  std::vector<std::vector<std::string>> rows;
  read_csv_rows(dir / "index.csv", kIndexHeader, rows);
  std::vector<FeatureSequence> out;
  for (const auto& r : rows) {
    FeatureSequence s = features::read_file(dir / r[4]);
    if (s.provenance != p)
      throw IngestError((dir / r[4]).string() + ": provenance " + provenance_name(s.provenance) +
                        ", expected " + provenance_name(p));
    s.recording_id = r[0];
    s.transcript = r[1];
    s.dataset_tag = r[2];
    out.push_back(std::move(s));
  }
  if (out.empty()) throw DatasetError((dir / "index.csv").string() + " lists no recordings");
  return out;
}

bool is_train(const std::map<std::string, bool>& split, const std::string& id) {
  auto it = split.find(id);
  if (it == split.end()) throw DatasetError("recording '" + id + "' is missing from the split");
  return it->second;
}

// Buckets larger than the corpus are dropped with a warning.
std::vector<std::size_t> effective_buckets(const ExperimentConfig& config, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t b : config.buckets) {
    if (b > n)
      log_warning("bucket " + std::to_string(b) + " exceeds the corpus size " +
                  std::to_string(n) + "; skipped");
    else
      out.push_back(b);
  }
  if (out.empty()) throw ParameterError("no configured bucket fits a corpus of " + std::to_string(n));
  return out;
}

std::string bucket_name(std::size_t b) { return "bucket" + std::to_string(b); }

// --- stages --------------------------------------------------------------

void run_synth(const ExperimentConfig& config, const WorkDir& w, const fs::path& out_dir) {
  corpus::SyntheticCorpusSpec spec = config.synth;
  spec.seed = nn::derive_seed(config.seed, "synth");
  const auto recs = corpus::generate_synthetic_corpus(spec);
  corpus::save_corpus(recs, out_dir.empty() ? w.corpus_dir() : out_dir);
  log_info("synth: wrote " + std::to_string(recs.size()) + " recordings");
}

void run_preprocess(const ExperimentConfig& config, const WorkDir& w) {
  std::vector<EegRecording> recs;
  if (config.manifest.empty()) {
    require(w, "synth");
    recs = corpus::load_manifest(w.corpus_dir() / "manifest.csv", features::kExpectedChannels);
  } else {
    recs = corpus::load_manifest(config.manifest, features::kExpectedChannels);
  }
  const auto& p = config.preprocess;
  const ica::IcaOptions ica_opts{p.ica_max_iterations, p.ica_tolerance};

  std::map<double, std::pair<signal::IirFilter, signal::IirFilter>> filters;
  std::string ica_log = "id,components,rejected,iterations,status\n";
  std::size_t fallbacks = 0;
  std::vector<EegRecording> out;
  out.reserve(recs.size());
  for (const auto& rec : recs) {
    auto it = filters.find(rec.sample_rate_hz);
    if (it == filters.end()) {
      auto bp = signal::design_bandpass(p.bandpass_low_hz, p.bandpass_high_hz, rec.sample_rate_hz);
      auto notch = signal::design_notch(p.notch_hz, p.notch_quality, rec.sample_rate_hz);
      it = filters.emplace(rec.sample_rate_hz, std::make_pair(std::move(bp), std::move(notch))).first;
    }
    EegRecording x = signal::apply_filter(it->second.second, signal::apply_filter(it->second.first, rec));

    const std::size_t n_comp = std::min(p.ica_components, x.num_channels());
    std::string status = "ok";
    std::size_t n_rejected = 0, iterations = 0;
    try {
      const auto model = ica::fit_ica(x, n_comp, nn::derive_seed(config.seed, "ica:" + rec.id), ica_opts);
      iterations = model.iterations;
      n_rejected = ica::artifact_components(model, p.kurtosis_threshold).size();
      x = ica::reject_artifacts(model, x, p.kurtosis_threshold);
    } catch (const ConvergenceError& e) {
      status = "not_converged";
      iterations = e.iterations;
      ++fallbacks;
      log_info("preprocess: " + std::string(e.what()) + "; ICA skipped");
    } catch (const DegenerateOutputError& e) {
      status = "all_rejected";
      n_rejected = n_comp;
      ++fallbacks;
      log_info("preprocess: " + std::string(e.what()) + "; ICA skipped");
    }
    ica_log += io::csv_quote(rec.id) + "," + std::to_string(n_comp) + "," +
               std::to_string(n_rejected) + "," + std::to_string(iterations) + "," + status + "\n";
    out.push_back(std::move(x));
  }
  if (fallbacks > 0)
    log_warning("preprocess: ICA cleanup skipped on " + std::to_string(fallbacks) + " of " +
                std::to_string(recs.size()) + " recordings (see preprocessed/ica.csv)");

  corpus::save_corpus(out, w.preprocessed_dir());
  io::write_file_atomic(w.preprocessed_dir() / "ica.csv", ica_log);

  std::vector<std::string> ids;
  for (const auto& r : out) ids.push_back(r.id);
  write_split(w, corpus::split_train_test(ids, config.train_ratio, config.seed), ids);
  log_info("preprocess: " + std::to_string(out.size()) + " recordings");
}

void run_features(const ExperimentConfig& config, const WorkDir& w) {
  require(w, "preprocess");
  const auto recs =
      corpus::load_manifest(w.preprocessed_dir() / "manifest.csv", features::kExpectedChannels);
  std::vector<FeatureSequence> seqs;
  for (const auto& rec : recs) {
    FeatureSequence s = features::extract_features(
        rec, features::WindowSpec::for_rate(rec.sample_rate_hz, config.window_samples));
    s.recording_id = rec.id;
    s.transcript = rec.transcript;
    s.dataset_tag = rec.dataset_tag;
    seqs.push_back(std::move(s));
  }
  write_features(w, Provenance::kRaw155, seqs);
  log_info("features: " + std::to_string(seqs.size()) + " raw155 sequences");
}

// Per-column z-score scaled by 1/sqrt(D) on the way in; per-component
// whitening on the way out.
struct KpcaScaling {
  Eigen::RowVectorXd input_mean, input_scale;
  Eigen::RowVectorXd output_scale;

  RowMatrix prepare(const RowMatrix& x) const {
    return ((x.rowwise() - input_mean).array().rowwise() / input_scale.array()).matrix();
  }
  RowMatrix finish(const RowMatrix& y) const {
    return (y.array().rowwise() / output_scale.array()).matrix();
  }
};

std::vector<double> to_vector(const Eigen::RowVectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Model directory name for a dataset tag.
std::string tag_dir_name(const std::string& tag) {
  if (tag.empty()) return "untagged";
  for (char c : tag)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
      throw DatasetError("kpca: dataset tag '" + tag +
                         "' may only use letters, digits, '-', '_' and '.'");
  if (tag == "." || tag == "..") throw DatasetError("kpca: dataset tag '" + tag + "' is reserved");
  return tag;
}

struct TagFit {
  kpca::KpcaModel model;
  KpcaScaling scaling;
};

TagFit fit_tag(const ExperimentConfig& config, const std::vector<const FeatureSequence*>& train) {
  std::size_t rows = 0;
  for (const auto* s : train) rows += s->num_frames();
  const Eigen::Index dim = static_cast<Eigen::Index>(train.front()->dim());
  RowMatrix x(static_cast<Eigen::Index>(rows), dim);
  Eigen::Index at = 0;
  for (const auto* s : train) {
    x.middleRows(at, s->frames.rows()) = s->frames;
    at += s->frames.rows();
  }

  TagFit fit;
  KpcaScaling& sc = fit.scaling;
  sc.input_mean = x.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((x.rowwise() - sc.input_mean).array().square().colwise().mean()).sqrt();
  sc.input_scale = sd.unaryExpr([](double v) { return v > 1e-12 ? v : 1.0; }) *
                   std::sqrt(static_cast<double>(dim));
  const RowMatrix fit_rows = kpca::subsample_rows(sc.prepare(x), config.kpca.max_fit_frames);
  fit.model = kpca::fit_kpca(fit_rows, config.kpca.components, config.kpca.degree,
                             config.kpca.offset);
  sc.output_scale =
      (fit.model.eigenvalues / static_cast<double>(fit.model.num_training())).cwiseSqrt().transpose();
  return fit;
}

// One model per dataset tag, each fitted on that tag's training recordings.
void run_kpca(const ExperimentConfig& config, const WorkDir& w) {
  require(w, "features");
  const auto seqs = read_features(w, Provenance::kRaw155);
  const auto split = read_split(w);

  std::map<std::string, std::vector<const FeatureSequence*>> train_by_tag;
  std::set<std::string> tags;
  for (const auto& s : seqs) {
    tags.insert(s.dataset_tag);
    if (is_train(split, s.recording_id)) train_by_tag[s.dataset_tag].push_back(&s);
  }

  std::map<std::string, TagFit> fits;
  std::string csv = "dataset_tag,components,cumulative_explained_variance\n";
  std::vector<Series> curves;
  for (const auto& tag : tags) {
    const std::string dir_name = tag_dir_name(tag);
    auto it = train_by_tag.find(tag);
    if (it == train_by_tag.end())
      throw DatasetError("kpca: dataset tag '" + tag + "' has no recordings in the training split");
    TagFit fit = fit_tag(config, it->second);

    const fs::path dir = w.kpca_dir() / dir_name;
    kpca::write_file(dir / "model.kpca", fit.model);
    nlohmann::ordered_json j;
    j["dataset_tag"] = tag;
    j["input_mean"] = to_vector(fit.scaling.input_mean);
    j["input_scale"] = to_vector(fit.scaling.input_scale);
    j["output_scale"] = to_vector(fit.scaling.output_scale);
    io::write_file_atomic(dir / "scaling.json", j.dump(1) + "\n");

    const auto curve = kpca::explained_variance_curve(fit.model);
    Series s{dir_name, {}, {}};
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv += io::csv_quote(tag) + "," + std::to_string(i + 1) + "," + io::format_double(curve[i]) +
             "\n";
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(curve[i]);
    }
    curves.push_back(std::move(s));
    log_info("kpca: '" + dir_name + "' fitted on " + std::to_string(fit.model.num_training()) +
             " frames, explained " + io::format_double(curve.back()));
    fits.emplace(tag, std::move(fit));
  }
  io::write_file_atomic(w.kpca_dir() / "explained_variance.csv", csv);
  io::write_file_atomic(w.kpca_dir() / "explained_variance.svg",
                        line_chart_svg("KPCA cumulative explained variance", "components",
                                       "explained variance", curves));

  std::vector<FeatureSequence> out;
  for (const auto& seq : seqs) {
    const TagFit& fit = fits.at(seq.dataset_tag);
    FeatureSequence r;
    r.frames = fit.scaling.finish(kpca::transform_rows(fit.model, fit.scaling.prepare(seq.frames)));
    r.frame_rate_hz = seq.frame_rate_hz;
    r.provenance = Provenance::kKpca30;
    r.recording_id = seq.recording_id;
    r.transcript = seq.transcript;
    r.dataset_tag = seq.dataset_tag;
    validate(r);
    out.push_back(std::move(r));
  }
  write_features(w, Provenance::kKpca30, out);
}

void run_gan(const ExperimentConfig& config, const WorkDir& w) {
  require(w, "kpca");
  const auto seqs = read_features(w, Provenance::kKpca30);
  const auto split = read_split(w);

  std::set<std::string> class_set;
  for (const auto& s : seqs)
    if (is_train(split, s.recording_id)) class_set.insert(asr::normalize_transcript(s.transcript));
  const std::vector<std::string> classes(class_set.begin(), class_set.end());
  if (classes.size() < 2)
    throw DatasetError("gan: the training split holds fewer than two distinct sentences");

  std::vector<gan::LabeledSequence> data;
  for (const auto& s : seqs) {
    if (!is_train(split, s.recording_id)) continue;
    const auto label = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), asr::normalize_transcript(s.transcript)) -
        classes.begin());
    data.push_back({s.frames, label});
  }

  gan::GeneratorConfig gcfg = config.generator;
  gcfg.input_dim = provenance_dim(Provenance::kKpca30);
  gcfg.n_classes = classes.size();
  gan::DiscriminatorConfig dcfg = config.discriminator;
  dcfg.input_dim = gcfg.input_dim;
  dcfg.n_classes = classes.size();
  gan::GanTrainConfig tcfg = config.gan_train;
  tcfg.seed = nn::derive_seed(config.seed, "gan");
  gan::Generator gen(gcfg, nn::derive_seed(tcfg.seed, "gan.generator"));
  gan::Discriminator disc(dcfg, nn::derive_seed(tcfg.seed, "gan.discriminator"));
  const auto [g_loss, d_loss] = gan::train_gan(gen, disc, data, tcfg);

  const auto pred = gan::classify(gen, data);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) correct += pred[i] == data[i].label;
  const double accuracy = static_cast<double>(correct) / static_cast<double>(data.size());

  gan::save_generator(w.gan_dir() / "generator.nnck", gen);
  gan::save_discriminator(w.gan_dir() / "discriminator.nnck", disc);
  std::string csv = "epoch,gen_loss,disc_loss\n";
  Series gs{"generator", {}, {}}, ds{"discriminator", {}, {}};
  for (std::size_t e = 0; e < g_loss.size(); ++e) {
    csv += std::to_string(e + 1) + "," + io::format_double(g_loss[e]) + "," +
           io::format_double(d_loss[e]) + "\n";
    gs.x.push_back(static_cast<double>(e + 1));
    gs.y.push_back(g_loss[e]);
    ds.x.push_back(static_cast<double>(e + 1));
    ds.y.push_back(d_loss[e]);
  }
  io::write_file_atomic(w.gan_dir() / "loss.csv", csv);
  io::write_file_atomic(w.gan_dir() / "loss.svg",
                        line_chart_svg("GAN training loss", "epoch", "loss", {gs, ds}));
  nlohmann::ordered_json summary;
  summary["classes"] = classes;
  summary["train_examples"] = data.size();
  summary["train_accuracy"] = accuracy;
  io::write_file_atomic(w.gan_dir() / "summary.json", summary.dump(2) + "\n");

  std::vector<FeatureSequence> out;
  for (const auto& s : seqs) {
    FeatureSequence f = gan::extract_gan_features(gen, s);
    f.recording_id = s.recording_id;
    f.transcript = s.transcript;
    f.dataset_tag = s.dataset_tag;
    out.push_back(std::move(f));
  }
  write_features(w, Provenance::kGan32, out);
  log_info("gan: training accuracy " + io::format_double(accuracy));
}

std::vector<asr::CtcExample> bucket_examples(const std::vector<FeatureSequence>& seqs,
                                             const std::map<std::string, bool>& split,
                                             std::size_t bucket, bool train) {
  std::vector<asr::CtcExample> out;
  for (std::size_t i = 0; i < bucket; ++i) {
    if (is_train(split, seqs[i].recording_id) != train) continue;
    out.push_back({seqs[i].recording_id, seqs[i].frames, seqs[i].transcript});
  }
  return out;
}

asr::NgramLm lm_from(const ExperimentConfig& config, const std::vector<std::string>& transcripts) {
  return asr::train_lm(transcripts, config.decoder.lm_order, config.decoder.lm_add_k);
}

void run_asr(const ExperimentConfig& config, const WorkDir& w, Provenance p) {
  require(w, producer_stage(p));
  const auto seqs = read_features(w, p);
  const auto split = read_split(w);
  for (std::size_t bucket : effective_buckets(config, seqs.size())) {
    const auto train = bucket_examples(seqs, split, bucket, true);
    if (train.empty())
      throw DatasetError("asr: bucket " + std::to_string(bucket) + " has no training recordings");
    const std::string tag = std::string("asr:") + provenance_name(p) + ":" + std::to_string(bucket);

    asr::CtcModelConfig mcfg = config.ctc_model;
    mcfg.input_dim = provenance_dim(p);
    mcfg.num_classes = asr::CharVocab().size();
    asr::CtcModel model(mcfg, nn::derive_seed(config.seed, tag + ":init"));
    asr::CtcTrainConfig tcfg = config.ctc_train;
    tcfg.seed = nn::derive_seed(config.seed, tag + ":train");
    const auto curve = asr::train_ctc(model, train, tcfg);

    std::vector<std::string> transcripts;
    for (const auto& ex : train) transcripts.push_back(ex.transcript);
    const auto lm = lm_from(config, transcripts);

    const fs::path dir = w.asr_dir(p) / bucket_name(bucket);
    asr::save_ctc(dir / "model.nnck", model);
    asr::save_lm(dir / "lm.txt", lm);
    std::string csv = "epoch,ctc_loss\n";
    for (std::size_t e = 0; e < curve.size(); ++e)
      csv += std::to_string(e + 1) + "," + io::format_double(curve[e]) + "\n";
    io::write_file_atomic(dir / "loss.csv", csv);
    log_info("asr " + std::string(provenance_name(p)) + " bucket " + std::to_string(bucket) +
             ": final loss " + io::format_double(curve.back()));
  }
}

const char* kSummaryHeader = "bucket,utterances,reference_words,errors,wer";

void run_eval(const ExperimentConfig& config, const WorkDir& w, Provenance p) {
  require(w, provenance_stage("asr", p));
  const auto seqs = read_features(w, p);
  const auto split = read_split(w);
  const asr::CharVocab vocab;
  std::string summary = std::string(kSummaryHeader) + "\n";
  for (std::size_t bucket : effective_buckets(config, seqs.size())) {
    const auto test = bucket_examples(seqs, split, bucket, false);
    if (test.empty())
      throw DatasetError("eval: bucket " + std::to_string(bucket) + " has no test recordings");
    const fs::path dir = w.asr_dir(p) / bucket_name(bucket);
    const auto model = asr::load_ctc(dir / "model.nnck");
    const auto lm = asr::load_lm(dir / "lm.txt");

    asr::WerReport report;
    report.provenance = provenance_name(p);
    report.bucket = bucket;
    for (const auto& ex : test) {
      const std::string reference = asr::normalize_transcript(ex.transcript);
      const std::string hyp =
          asr::beam_search_decode(model.logits(ex.frames), vocab, &lm, config.decoder.beam);
      report.utterances.push_back({ex.id, reference, hyp, asr::wer(reference, hyp)});
    }
    io::write_file_atomic(w.eval_dir(p) / (bucket_name(bucket) + ".csv"), report.to_csv());
    const auto t = report.totals();
    summary += std::to_string(bucket) + "," + std::to_string(report.utterances.size()) + "," +
               std::to_string(t.reference_words) + "," + std::to_string(t.errors()) + "," +
               io::format_double(t.percent()) + "\n";
    log_info("eval " + std::string(provenance_name(p)) + " bucket " + std::to_string(bucket) +
             ": WER " + io::format_double(t.percent()));
  }
  io::write_file_atomic(w.eval_dir(p) / "summary.csv", summary);
}

std::map<std::size_t, double> read_summary(const WorkDir& w, Provenance p) {
  std::vector<std::vector<std::string>> rows;
  const fs::path path = w.eval_dir(p) / "summary.csv";
  read_csv_rows(path, kSummaryHeader, rows);
  std::map<std::size_t, double> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<std::size_t>(io::parse_double(rows[i][0], path.string(), i + 2))] =
        io::parse_double(rows[i][4], path.string(), i + 2);
  return out;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void run_report(const ExperimentConfig&, const WorkDir& w) {
  require(w, "eval-kpca30");
  require(w, "eval-gan32");
  const auto base = read_summary(w, Provenance::kKpca30);
  const auto proposed = read_summary(w, Provenance::kGan32);

  std::string csv = "total_sentences,wer_kpca30_baseline,wer_gan32_proposed\n";
  std::string table =
      "| Total sentences | WER (%) kpca30 baseline | WER (%) gan32 proposed |\n"
      "|---:|---:|---:|\n";
  Series bs{"kpca30 baseline", {}, {}}, ps{"gan32 proposed", {}, {}};
  for (const auto& [bucket, b] : base) {
    auto it = proposed.find(bucket);
    if (it == proposed.end())
      throw DatasetError("report: bucket " + std::to_string(bucket) + " missing for gan32");
    csv += std::to_string(bucket) + "," + io::format_double(b) + "," +
           io::format_double(it->second) + "\n";
    table += "| " + std::to_string(bucket) + " | " + fixed2(b) + " | " + fixed2(it->second) + " |\n";
    bs.x.push_back(static_cast<double>(bucket));
    bs.y.push_back(b);
    ps.x.push_back(static_cast<double>(bucket));
    ps.y.push_back(it->second);
  }
  const fs::path dir = w.report_dir();
  io::write_file_atomic(dir / "wer_table.csv", csv);
  io::write_file_atomic(dir / "wer_table.md", table);
  io::write_file_atomic(dir / "wer.svg",
                        line_chart_svg("Test WER by corpus size", "total sentences", "WER (%)",
                                       {bs, ps}));
  for (const auto& [src, name] :
       {std::pair{w.kpca_dir() / "explained_variance.svg", "explained_variance.svg"},
        std::pair{w.gan_dir() / "loss.svg", "gan_loss.svg"}})
    if (fs::exists(src)) io::write_file_atomic(dir / name, io::read_file(src));
  std::fputs(table.c_str(), stdout);
}

}  // namespace

// --- public commands -----------------------------------------------------

namespace {

template <typename Fn>
void with_stage(const ExperimentConfig& config, const std::string& stage, Fn&& fn) {
  validate(config);
  const WorkDir w{config.work_dir};
  WorkDirLock lock(w.root);
  begin_stage(w, config, stage);
  fn(w);
  finish_stage(w, stage);
}

}  // namespace

void cmd_synth(const ExperimentConfig& config, const fs::path& synth_out) {
  with_stage(config, "synth", [&](const WorkDir& w) { run_synth(config, w, synth_out); });
}
void cmd_preprocess(const ExperimentConfig& config) {
  with_stage(config, "preprocess", [&](const WorkDir& w) { run_preprocess(config, w); });
}
void cmd_features(const ExperimentConfig& config) {
  with_stage(config, "features", [&](const WorkDir& w) { run_features(config, w); });
}
void cmd_kpca(const ExperimentConfig& config) {
  with_stage(config, "kpca", [&](const WorkDir& w) { run_kpca(config, w); });
}
void cmd_gan(const ExperimentConfig& config) {
  with_stage(config, "gan", [&](const WorkDir& w) { run_gan(config, w); });
}
void cmd_asr(const ExperimentConfig& config, Provenance p) {
  with_stage(config, provenance_stage("asr", p), [&](const WorkDir& w) { run_asr(config, w, p); });
}
void cmd_eval(const ExperimentConfig& config, Provenance p) {
  with_stage(config, provenance_stage("eval", p), [&](const WorkDir& w) { run_eval(config, w, p); });
}
void cmd_report(const ExperimentConfig& config) {
  with_stage(config, "report", [&](const WorkDir& w) { run_report(config, w); });
}

void cmd_all(const ExperimentConfig& config) {
  validate(config);
  const WorkDir w{config.work_dir};
  WorkDirLock lock(w.root);
  auto stage = [&](const std::string& name, auto&& fn) {
    begin_stage(w, config, name);
    fn();
    finish_stage(w, name);
  };
  if (config.manifest.empty()) stage("synth", [&] { run_synth(config, w, {}); });
  stage("preprocess", [&] { run_preprocess(config, w); });
  stage("features", [&] { run_features(config, w); });
  stage("kpca", [&] { run_kpca(config, w); });
  stage("gan", [&] { run_gan(config, w); });
  for (Provenance p : {Provenance::kKpca30, Provenance::kGan32}) {
    stage(provenance_stage("asr", p), [&] { run_asr(config, w, p); });
    stage(provenance_stage("eval", p), [&] { run_eval(config, w, p); });
  }
  stage("report", [&] { run_report(config, w); });
}

// --- charts --------------------------------------------------------------

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        first = false;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  auto tick = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return std::string(buf);
  };

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + esc(title) + "</text>\n";
  o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kH - kBottom) + "\" x2=\"" + num(kW - kRight) +
       "\" y2=\"" + num(kH - kBottom) + "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kH - kBottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kH - kBottom + 16) +
         "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
    o += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
         tick(yv) + "</text>\n";
  }
  o += "<text x=\"" + num((kLeft + kW - kRight) / 2) + "\" y=\"" + num(kH - 20) +
       "\" text-anchor=\"middle\">" + esc(x_label) + "</text>\n";
  o += "<text transform=\"translate(18," + num((kTop + kH - kBottom) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + esc(y_label) + "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % 5];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
         pts + "\"/>\n";
    const double ly = kTop + 8 + 16.0 * static_cast<double>(si);
    o += "<line x1=\"" + num(kW - 190) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kW - 170) +
         "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(kW - 165) + "\" y=\"" + num(ly + 4) + "\">" + esc(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace e2t::pipeline
