// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "gan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "binio.hpp"
#include "error.hpp"

namespace e2t::gan {

using nn::Mat;
using nn::SeqBatch;

Generator::Generator(const GeneratorConfig& config, std::uint64_t seed)
    : config_(config), params_(seed) {
  if (config.n_classes < 2) throw ParameterError("generator: need at least 2 classes");
  if (config.tcn_dilations.empty()) throw ParameterError("generator: no TCN blocks");
  gru1_ = nn::Gru(params_, "gen.gru1", config.input_dim, config.gru1_units);
  gru2_ = nn::Gru(params_, "gen.gru2", config.gru1_units, config.gru2_units);
  std::size_t in = config.gru2_units;
  for (std::size_t i = 0; i < config.tcn_dilations.size(); ++i) {
    tcn_.emplace_back(params_, "gen.tcn" + std::to_string(i + 1), in, config.tcn_channels,
                      config.tcn_kernel, config.tcn_dilations[i]);
    in = config.tcn_channels;
  }
  out_ = nn::Dense(params_, "gen.out", config.tcn_channels, config.n_classes);
}

Generator::Output Generator::forward(const SeqBatch& x, Cache* cache) const {
  if (x.channels() != config_.input_dim)
    throw ParameterError("generator: expected " + std::to_string(config_.input_dim) +
                         "-dim frames, got " + std::to_string(x.channels()));
  if (x.steps == 0) throw ParameterError("generator: empty sequence");
  SeqBatch h = gru1_.forward(x, cache ? &cache->gru1 : nullptr);
  h = gru2_.forward(h, cache ? &cache->gru2 : nullptr);
  if (cache) cache->tcn.resize(tcn_.size());
  for (std::size_t i = 0; i < tcn_.size(); ++i)
    h = tcn_[i].forward(h, cache ? &cache->tcn[i] : nullptr);
  Output out;
  const Mat pooled = nn::avg_pool_time(h);
  out.probs = nn::softmax_rows(out_.forward(pooled));
  if (cache) {
    cache->features = h;
    cache->pooled = pooled;
    cache->probs = out.probs;
  }
  out.features = std::move(h);
  return out;
}

void Generator::backward(const Cache& cache, const Mat& dprobs) {
  const Mat& p = cache.probs;
  const Eigen::VectorXd inner = (dprobs.cwiseProduct(p)).rowwise().sum();
  const Mat dlogits = p.cwiseProduct(dprobs.colwise() - inner);
  const Mat dpooled = out_.backward(cache.pooled, dlogits);
  SeqBatch dh = nn::avg_pool_time_backward(dpooled, cache.features.steps);
  for (std::size_t i = tcn_.size(); i-- > 0;) dh = tcn_[i].backward(cache.tcn[i], dh);
  dh = gru2_.backward(cache.gru2, dh);
  gru1_.backward(cache.gru1, dh);
}

Discriminator::Discriminator(const DiscriminatorConfig& config, std::uint64_t seed)
    : config_(config), params_(seed) {
  if (config.n_classes < 2) throw ParameterError("discriminator: need at least 2 classes");
  gru_ = nn::Gru(params_, "disc.gru", config.input_dim, config.gru_units);
  label_dense_ = nn::Dense(params_, "disc.label", config.n_classes, config.label_units);
  const std::size_t concat = config.gru_units + config.label_units;
  if (config.joint_units > 0) {
    joint_ = nn::Dense(params_, "disc.joint", concat, config.joint_units);
    out_ = nn::Dense(params_, "disc.out", config.joint_units, 1);
  } else {
    out_ = nn::Dense(params_, "disc.out", concat, 1);
  }
}

Mat Discriminator::encode(const SeqBatch& eeg, nn::GruCache* cache) const {
  if (eeg.channels() != config_.input_dim)
    throw ParameterError("discriminator: expected " + std::to_string(config_.input_dim) +
                         "-dim frames, got " + std::to_string(eeg.channels()));
  if (eeg.steps == 0) throw ParameterError("discriminator: empty sequence");
  SeqBatch h = gru_.forward(eeg, cache);
  return h.step(h.steps - 1);
}

Mat Discriminator::head(const Mat& h_last, const Mat& labels, HeadCache* cache) const {
  if (static_cast<std::size_t>(labels.cols()) != config_.n_classes)
    throw ParameterError("discriminator: label vector must have " +
                         std::to_string(config_.n_classes) + " entries, got " +
                         std::to_string(labels.cols()));
  if (labels.rows() != h_last.rows()) throw ParameterError("discriminator: batch mismatch");
  Mat pre = label_dense_.forward(labels);
  Mat concat(h_last.rows(), h_last.cols() + pre.cols());
  concat << h_last, pre.cwiseMax(0.0);
  Mat joint_pre, joint;
  if (config_.joint_units > 0) {
    joint_pre = joint_.forward(concat);
    joint = joint_pre.cwiseMax(0.0);
  }
  Mat logits = out_.forward(config_.joint_units > 0 ? joint : concat);
  if (cache) {
    cache->h_last = h_last;
    cache->labels = labels;
    cache->label_pre = std::move(pre);
    cache->concat = std::move(concat);
    cache->joint_pre = std::move(joint_pre);
    cache->joint = std::move(joint);
    cache->logits = logits;
  }
  return logits;
}

std::pair<Mat, Mat> Discriminator::head_backward(const HeadCache& cache, const Mat& dlogits,
                                                 bool accumulate) {
  Mat dconcat;
  if (config_.joint_units > 0) {
    const Mat djoint = accumulate ? out_.backward(cache.joint, dlogits) : out_.backward_input(dlogits);
    const Mat djoint_pre =
        djoint.cwiseProduct((cache.joint_pre.array() > 0.0).cast<double>().matrix());
    dconcat = accumulate ? joint_.backward(cache.concat, djoint_pre)
                         : joint_.backward_input(djoint_pre);
  } else {
    dconcat = accumulate ? out_.backward(cache.concat, dlogits) : out_.backward_input(dlogits);
  }
  const auto H = cache.h_last.cols();
  Mat dh = dconcat.leftCols(H);
  const Mat dpre = dconcat.rightCols(dconcat.cols() - H).cwiseProduct(
      (cache.label_pre.array() > 0.0).cast<double>().matrix());
  Mat dlabels = accumulate ? label_dense_.backward(cache.labels, dpre)
                           : label_dense_.backward_input(dpre);
  return {std::move(dh), std::move(dlabels)};
}

void Discriminator::encode_backward(const nn::GruCache& cache, const Mat& dh_last) {
  SeqBatch dh(cache.x.steps, cache.x.batch, config_.gru_units);
  dh.step(cache.x.steps - 1) = dh_last;
  gru_.backward(cache, dh);
}

void validate(const GanTrainConfig& c) {
  if (c.epochs < 1) throw ParameterError("gan: epochs must be >= 1");
  if (c.batch_size < 1) throw ParameterError("gan: batch size must be >= 1");
  if (!(c.clamp_eps > 0.0 && c.clamp_eps < 1e-3))
    throw ParameterError("gan: clamp epsilon must be in (0, 1e-3)");
  if (!(c.adam.learning_rate > 0.0)) throw ParameterError("gan: learning rate must be > 0");
}

double clamp_probability(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

double generator_loss(double p_sf, double eps) {
  return -std::log(clamp_probability(p_sf, eps));
}

double discriminator_loss(double p_se, double p_sf, double eps) {
  return -std::log(clamp_probability(p_se, eps)) -
         std::log(1.0 - clamp_probability(p_sf, eps));
}

namespace {

SeqBatch single(const FeatureSequence& eeg) { return SeqBatch::pack({&eeg.frames}); }

void require_kpca30(const FeatureSequence& eeg, std::size_t input_dim) {
  if (eeg.dim() != input_dim)
    throw ParameterError("gan: sequence '" + eeg.recording_id + "' has dimension " +
                         std::to_string(eeg.dim()) + ", expected " +
                         std::to_string(input_dim));
  if (eeg.num_frames() == 0)
    throw ParameterError("gan: sequence '" + eeg.recording_id + "' is empty");
}

Mat one_hot(const std::vector<std::size_t>& labels, std::size_t n_classes) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(labels.size()),
                      static_cast<Eigen::Index>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i)
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 1.0;
  return out;
}

Mat sigmoid_mat(const Mat& logits) {
  return logits.unaryExpr([](double v) { return nn::sigmoid(v); });
}

struct Group {
  SeqBatch eeg;
  std::vector<std::size_t> labels;
};

// Splits a batch into sub-batches of equal sequence length, ordered by length.
std::vector<Group> group_by_length(std::span<const LabeledSequence> data,
                                   std::span<const std::size_t> idx) {
  std::map<Eigen::Index, std::vector<std::size_t>> by_len;
  for (std::size_t i : idx) by_len[data[i].frames.rows()].push_back(i);
  std::vector<Group> groups;
  for (const auto& [len, members] : by_len) {
    std::vector<const RowMatrix*> seqs;
    Group g;
    for (std::size_t i : members) {
      seqs.push_back(&data[i].frames);
      g.labels.push_back(data[i].label);
    }
    g.eeg = SeqBatch::pack(seqs);
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

Generator::Output generator_forward(const Generator& gen, const FeatureSequence& eeg) {
  require_kpca30(eeg, gen.config().input_dim);
  return gen.forward(single(eeg), nullptr);
}

double discriminator_forward(const Discriminator& disc, const FeatureSequence& eeg,
                             std::span<const double> label, double eps) {
  require_kpca30(eeg, disc.config().input_dim);
  if (label.size() != disc.config().n_classes)
    throw ParameterError("discriminator: label vector must have " +
                         std::to_string(disc.config().n_classes) + " entries");
  Mat lab(1, static_cast<Eigen::Index>(label.size()));
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (!(label[i] >= 0.0 && label[i] <= 1.0))
      throw ParameterError("discriminator: label entries must lie in [0, 1]");
    lab(0, static_cast<Eigen::Index>(i)) = label[i];
  }
  const Mat logits = disc.head(disc.encode(single(eeg), nullptr), lab, nullptr);
  return clamp_probability(nn::sigmoid(logits(0, 0)), eps);
}

std::pair<std::vector<double>, std::vector<double>> train_gan(
    Generator& gen, Discriminator& disc, std::span<const LabeledSequence> data,
    const GanTrainConfig& config) {
  validate(config);
  const std::size_t n_classes = gen.config().n_classes;
  if (disc.config().n_classes != n_classes)
    throw ParameterError("gan: generator and discriminator disagree on class count");
  std::vector<bool> seen(n_classes, false);
  for (const auto& ex : data) {
    if (ex.label >= n_classes)
      throw ParameterError("gan: label " + std::to_string(ex.label) + " out of range");
    if (static_cast<std::size_t>(ex.frames.cols()) != gen.config().input_dim)
      throw ParameterError("gan: example has dimension " + std::to_string(ex.frames.cols()) +
                           ", expected " + std::to_string(gen.config().input_dim));
    if (ex.frames.rows() == 0) throw ParameterError("gan: empty example");
    seen[ex.label] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2)
    throw ParameterError("gan: training data must contain at least two classes");

  std::mt19937_64 rng(nn::derive_seed(config.seed, "gan.shuffle"));
  nn::AdamState gen_opt{config.adam, 0, {}, {}};
  nn::AdamState disc_opt{config.adam, 0, {}, {}};
  const double eps = config.clamp_eps;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> gen_curve, disc_curve;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double gen_sum = 0.0, disc_sum = 0.0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      const auto groups =
          group_by_length(data, std::span<const std::size_t>(order).subspan(start, stop - start));

      // The generator is unchanged until its own step, so one forward pass
      // serves both steps.
      std::vector<Generator::Cache> gen_caches(groups.size());
      std::vector<Mat> fakes(groups.size());
      for (std::size_t gi = 0; gi < groups.size(); ++gi)
        fakes[gi] = gen.forward(groups[gi].eeg, &gen_caches[gi]).probs;

      // Discriminator step; the generator output is a constant here.
      disc.params().zero_grad();
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        const Mat& fake = fakes[gi];
        const Mat real = one_hot(g.labels, n_classes);
        nn::GruCache gru_cache;
        const Mat h = disc.encode(g.eeg, &gru_cache);
        Discriminator::HeadCache real_cache, fake_cache;
        const Mat p_real = sigmoid_mat(disc.head(h, real, &real_cache));
        const Mat p_fake = sigmoid_mat(disc.head(h, fake, &fake_cache));
        for (Eigen::Index i = 0; i < p_real.rows(); ++i)
          disc_sum += discriminator_loss(p_real(i, 0), p_fake(i, 0), eps);
        // d/ds of -log sig(s) and -log(1 - sig(s)).
        const Mat d_real = (p_real.array() - 1.0) * inv_b;
        const Mat d_fake = p_fake * inv_b;
        Mat dh = disc.head_backward(real_cache, d_real, true).first;
        dh += disc.head_backward(fake_cache, d_fake, true).first;
        disc.encode_backward(gru_cache, dh);
      }
      nn::adam_update(disc.params(), disc_opt);

      // Generator step against the updated discriminator.
      gen.params().zero_grad();
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Mat h = disc.encode(groups[gi].eeg, nullptr);
        Discriminator::HeadCache head_cache;
        const Mat p_fake = sigmoid_mat(disc.head(h, fakes[gi], &head_cache));
        for (Eigen::Index i = 0; i < p_fake.rows(); ++i)
          gen_sum += generator_loss(p_fake(i, 0), eps);
        const Mat d_fake = (p_fake.array() - 1.0) * inv_b;
        const Mat dlabels = disc.head_backward(head_cache, d_fake, false).second;
        gen.backward(gen_caches[gi], dlabels);
      }
      nn::adam_update(gen.params(), gen_opt);
    }

    const double n = static_cast<double>(data.size());
    gen_curve.push_back(gen_sum / n);
    disc_curve.push_back(disc_sum / n);
    if (!std::isfinite(gen_curve.back()) || !std::isfinite(disc_curve.back()))
      throw NumericError("gan: non-finite loss at epoch " + std::to_string(epoch));
  }
  return {std::move(gen_curve), std::move(disc_curve)};
}

GanModels train_gan(std::span<const LabeledSequence> data, std::size_t n_classes,
                    const GanTrainConfig& config, std::size_t input_dim) {
  validate(config);
  GeneratorConfig gcfg;
  gcfg.input_dim = input_dim;
  gcfg.n_classes = n_classes;
  DiscriminatorConfig dcfg;
  dcfg.input_dim = input_dim;
  dcfg.n_classes = n_classes;
  GanModels models{Generator(gcfg, nn::derive_seed(config.seed, "gan.generator")),
                   Discriminator(dcfg, nn::derive_seed(config.seed, "gan.discriminator")),
                   {},
                   {}};
  auto [g, d] = train_gan(models.generator, models.discriminator, data, config);
  models.generator_loss = std::move(g);
  models.discriminator_loss = std::move(d);
  return models;
}

std::vector<std::size_t> classify(const Generator& gen, std::span<const LabeledSequence> data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    const Mat probs = gen.forward(SeqBatch::pack({&ex.frames}), nullptr).probs;
    Eigen::Index arg = 0;
    probs.row(0).maxCoeff(&arg);
    out.push_back(static_cast<std::size_t>(arg));
  }
  return out;
}

FeatureSequence extract_gan_features(const Generator& gen, const FeatureSequence& eeg) {
  if (eeg.provenance != Provenance::kKpca30)
    throw ParameterError("extract_gan_features: '" + eeg.recording_id +
                         "' must have provenance kpca30");
  require_kpca30(eeg, gen.config().input_dim);
  FeatureSequence out;
  out.frames = gen.forward(single(eeg), nullptr).features.unpack(0);
  out.frame_rate_hz = eeg.frame_rate_hz;
  out.provenance = Provenance::kGan32;
  out.recording_id = eeg.recording_id;
  out.transcript = eeg.transcript;
  validate(out);
  return out;
}

namespace {
constexpr const char* kGeneratorKind = "gan_generator";
constexpr const char* kDiscriminatorKind = "gan_discriminator";
}  // namespace

void save_generator(const std::filesystem::path& path, const Generator& gen) {
  const auto& c = gen.config();
  std::vector<double> meta{static_cast<double>(c.input_dim), static_cast<double>(c.gru1_units),
                           static_cast<double>(c.gru2_units), static_cast<double>(c.tcn_channels),
                           static_cast<double>(c.tcn_kernel), static_cast<double>(c.n_classes)};
  for (std::size_t d : c.tcn_dilations) meta.push_back(static_cast<double>(d));
  io::write_file_atomic(path, nn::encode_checkpoint(kGeneratorKind, meta, gen.params()));
}

Generator load_generator(const std::filesystem::path& path) {
  const auto ckpt = nn::decode_checkpoint(io::read_file(path), path.string());
  if (ckpt.kind != kGeneratorKind || ckpt.meta.size() < 7)
    throw IngestError(path.string() + ": not a GAN generator checkpoint");
  GeneratorConfig c;
  c.input_dim = static_cast<std::size_t>(ckpt.meta[0]);
  c.gru1_units = static_cast<std::size_t>(ckpt.meta[1]);
  c.gru2_units = static_cast<std::size_t>(ckpt.meta[2]);
  c.tcn_channels = static_cast<std::size_t>(ckpt.meta[3]);
  c.tcn_kernel = static_cast<std::size_t>(ckpt.meta[4]);
  c.n_classes = static_cast<std::size_t>(ckpt.meta[5]);
  c.tcn_dilations.clear();
  for (std::size_t i = 6; i < ckpt.meta.size(); ++i)
    c.tcn_dilations.push_back(static_cast<std::size_t>(ckpt.meta[i]));
  Generator gen(c, 0);
  nn::load_parameters(gen.params(), ckpt, path.string());
  return gen;
}

void save_discriminator(const std::filesystem::path& path, const Discriminator& disc) {
  const auto& c = disc.config();
  std::vector<double> meta{static_cast<double>(c.input_dim), static_cast<double>(c.gru_units),
                           static_cast<double>(c.label_units), static_cast<double>(c.n_classes),
                           static_cast<double>(c.joint_units)};
  io::write_file_atomic(path, nn::encode_checkpoint(kDiscriminatorKind, meta, disc.params()));
}

Discriminator load_discriminator(const std::filesystem::path& path) {
  const auto ckpt = nn::decode_checkpoint(io::read_file(path), path.string());
  if (ckpt.kind != kDiscriminatorKind || ckpt.meta.size() != 5)
    throw IngestError(path.string() + ": not a GAN discriminator checkpoint");
  DiscriminatorConfig c;
  c.input_dim = static_cast<std::size_t>(ckpt.meta[0]);
  c.gru_units = static_cast<std::size_t>(ckpt.meta[1]);
  c.label_units = static_cast<std::size_t>(ckpt.meta[2]);
  c.n_classes = static_cast<std::size_t>(ckpt.meta[3]);
  c.joint_units = static_cast<std::size_t>(ckpt.meta[4]);
  Discriminator disc(c, 0);
  nn::load_parameters(disc.params(), ckpt, path.string());
  return disc;
}

}  // namespace e2t::gan
