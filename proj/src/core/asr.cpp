// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "asr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "binio.hpp"
#include "error.hpp"

namespace e2t::asr {

using nn::Mat;
using nn::SeqBatch;

CtcModel::CtcModel(const CtcModelConfig& config, std::uint64_t seed)
    : config_(config), params_(seed) {
  if (!(config.dropout >= 0.0 && config.dropout < 1.0))
    throw ParameterError("ctc model: dropout must be in [0, 1)");
  if (config.num_classes < 2) throw ParameterError("ctc model: need at least 2 classes");
  gru1_ = nn::Gru(params_, "ctc.gru1", config.input_dim, config.gru1_units);
  gru2_ = nn::Gru(params_, "ctc.gru2", config.gru1_units, config.gru2_units);
  out_ = nn::Dense(params_, "ctc.out", config.gru2_units, config.num_classes);
}

SeqBatch CtcModel::forward(const SeqBatch& x, std::mt19937_64* dropout_rng, Cache* cache) const {
  if (x.channels() != config_.input_dim)
    throw ParameterError("ctc model: expected " + std::to_string(config_.input_dim) +
                         "-dim frames, got " + std::to_string(x.channels()));
  SeqBatch h1 = gru1_.forward(x, cache ? &cache->gru1 : nullptr);
  if (dropout_rng && config_.dropout > 0.0) {
    Mat mask = nn::dropout_mask(h1.data.rows(), h1.data.cols(), config_.dropout, *dropout_rng);
    h1.data = h1.data.cwiseProduct(mask);
    if (cache) cache->mask = std::move(mask);
  } else if (cache) {
    cache->mask.resize(0, 0);
  }
  SeqBatch h2 = gru2_.forward(h1, cache ? &cache->gru2 : nullptr);
  SeqBatch logits;
  logits.steps = h2.steps;
  logits.batch = h2.batch;
  logits.data = out_.forward(h2.data);
  if (cache) cache->hidden = std::move(h2);
  return logits;
}

void CtcModel::backward(const Cache& cache, const SeqBatch& dlogits) {
  SeqBatch dh2;
  dh2.steps = dlogits.steps;
  dh2.batch = dlogits.batch;
  dh2.data = out_.backward(cache.hidden.data, dlogits.data);
  SeqBatch dh1 = gru2_.backward(cache.gru2, dh2);
  if (cache.mask.size() > 0) dh1.data = dh1.data.cwiseProduct(cache.mask);
  gru1_.backward(cache.gru1, dh1);
}

RowMatrix CtcModel::logits(const RowMatrix& frames) const {
  return forward(SeqBatch::pack({&frames}), nullptr, nullptr).unpack(0);
}

namespace {

struct Prepared {
  const CtcExample* example;
  std::vector<int> labels;
};

std::vector<Prepared> prepare(std::span<const CtcExample> data, std::size_t input_dim) {
  const CharVocab vocab;
  std::vector<Prepared> out;
  for (const auto& ex : data) {
    if (static_cast<std::size_t>(ex.frames.cols()) != input_dim)
      throw ParameterError("train_ctc: example '" + ex.id + "' has dimension " +
                           std::to_string(ex.frames.cols()) + ", expected " +
                           std::to_string(input_dim));
    std::vector<int> labels = vocab.encode(normalize_transcript(ex.transcript));
    if (ex.frames.rows() == 0 || static_cast<std::size_t>(ex.frames.rows()) < min_frames(labels)) {
      log_warning("skipping '" + ex.id + "': transcript needs " +
                  std::to_string(min_frames(labels)) + " frames, has " +
                  std::to_string(ex.frames.rows()));
      continue;
    }
    out.push_back({&ex, std::move(labels)});
  }
  return out;
}

}  // namespace

std::vector<double> train_ctc(CtcModel& model, std::span<const CtcExample> data,
                              const CtcTrainConfig& config) {
  if (config.epochs < 1) throw ParameterError("train_ctc: epochs must be >= 1");
  if (config.batch_size < 1) throw ParameterError("train_ctc: batch size must be >= 1");
  const auto prepared = prepare(data, model.config().input_dim);
  if (prepared.empty()) throw DatasetError("train_ctc: no alignable training examples");

  std::mt19937_64 shuffle_rng(nn::derive_seed(config.seed, "ctc.shuffle"));
  std::mt19937_64 dropout_rng(nn::derive_seed(config.seed, "ctc.dropout"));
  nn::AdamState opt{config.adam, 0, {}, {}};
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      std::map<Eigen::Index, std::vector<std::size_t>> by_len;
      for (std::size_t i = start; i < stop; ++i)
        by_len[prepared[order[i]].example->frames.rows()].push_back(order[i]);

      model.params().zero_grad();
      for (const auto& [len, members] : by_len) {
        std::vector<const RowMatrix*> seqs;
        for (std::size_t i : members) seqs.push_back(&prepared[i].example->frames);
        const SeqBatch x = SeqBatch::pack(seqs);
        CtcModel::Cache cache;
        const SeqBatch logits = model.forward(x, &dropout_rng, &cache);
        SeqBatch dlogits(logits.steps, logits.batch, static_cast<std::size_t>(logits.data.cols()));
        for (std::size_t b = 0; b < members.size(); ++b) {
          const CtcResult r = ctc_loss(logits.unpack(b), prepared[members[b]].labels);
          epoch_loss += r.loss;
          for (std::size_t t = 0; t < logits.steps; ++t)
            dlogits.data.row(static_cast<Eigen::Index>(t * logits.batch + b)) =
                r.grad.row(static_cast<Eigen::Index>(t)) * inv_b;
        }
        model.backward(cache, dlogits);
      }
      nn::adam_update(model.params(), opt);
    }
    curve.push_back(epoch_loss / static_cast<double>(prepared.size()));
    if (!std::isfinite(curve.back()))
      throw NumericError("train_ctc: non-finite loss at epoch " + std::to_string(epoch));
  }
  return curve;
}

double evaluate_loss(const CtcModel& model, std::span<const CtcExample> data) {
  const auto prepared = prepare(data, model.config().input_dim);
  if (prepared.empty()) throw DatasetError("evaluate_loss: no alignable examples");
  double total = 0.0;
  for (const auto& p : prepared)
    total += ctc_loss(model.logits(p.example->frames), p.labels, false).loss;
  return total / static_cast<double>(prepared.size());
}

namespace {
constexpr const char* kCtcKind = "ctc_recognizer";
}

void save_ctc(const std::filesystem::path& path, const CtcModel& model) {
  const auto& c = model.config();
  const std::vector<double> meta{static_cast<double>(c.input_dim), static_cast<double>(c.gru1_units),
                                 static_cast<double>(c.gru2_units), c.dropout,
                                 static_cast<double>(c.num_classes)};
  io::write_file_atomic(path, nn::encode_checkpoint(kCtcKind, meta, model.params()));
}

CtcModel load_ctc(const std::filesystem::path& path) {
  const auto ckpt = nn::decode_checkpoint(io::read_file(path), path.string());
  if (ckpt.kind != kCtcKind || ckpt.meta.size() != 5)
    throw IngestError(path.string() + ": not a CTC recognizer checkpoint");
  CtcModelConfig c;
  c.input_dim = static_cast<std::size_t>(ckpt.meta[0]);
  c.gru1_units = static_cast<std::size_t>(ckpt.meta[1]);
  c.gru2_units = static_cast<std::size_t>(ckpt.meta[2]);
  c.dropout = ckpt.meta[3];
  c.num_classes = static_cast<std::size_t>(ckpt.meta[4]);
  CtcModel model(c, 0);
  nn::load_parameters(model.params(), ckpt, path.string());
  return model;
}

}  // namespace e2t::asr
