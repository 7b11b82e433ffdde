// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "features.hpp"
#include "layers.hpp"

namespace e2t::gan {

struct GeneratorConfig {
  std::size_t input_dim = 30;
  std::size_t gru1_units = 128;
  std::size_t gru2_units = 64;
  std::size_t tcn_channels = 32;
  std::size_t tcn_kernel = 3;
  std::vector<std::size_t> tcn_dilations{1, 2};
  std::size_t n_classes = 2;
};

struct DiscriminatorConfig {
  std::size_t input_dim = 30;
  std::size_t gru_units = 128;
  std::size_t label_units = 64;
  // Hidden ReLU width between the concatenation and the sigmoid unit; 0 feeds
  // the concatenation straight into the sigmoid unit.
  std::size_t joint_units = 64;
  std::size_t n_classes = 2;
};

// GRU(128) -> GRU(64) -> TCN blocks -> temporal mean -> dense softmax.
class Generator {
 public:
  struct Cache {
    nn::GruCache gru1, gru2;
    std::vector<nn::TcnCache> tcn;
    nn::SeqBatch features;
    nn::Mat pooled, probs;
  };
  struct Output {
    nn::Mat probs;          // batch x n_classes
    nn::SeqBatch features;  // per-step TCN activations, width tcn_channels
  };

  Generator(const GeneratorConfig& config, std::uint64_t seed);

  Output forward(const nn::SeqBatch& x, Cache* cache) const;
  // Accumulates parameter gradients given dLoss/dprobs.
  void backward(const Cache& cache, const nn::Mat& dprobs);

  const GeneratorConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

 private:
  GeneratorConfig config_;
  nn::ParamStore params_;
  nn::Gru gru1_, gru2_;
  std::vector<nn::TcnBlock> tcn_;
  nn::Dense out_;
};

// Label branch dense(64, ReLU) in parallel with a GRU(128) over the EEG; last
// GRU state and label branch are concatenated, optionally passed through a
// hidden ReLU layer, and scored by one sigmoid unit. Without the hidden layer
// the score is additive in the two branches and cannot relate EEG to label.
class Discriminator {
 public:
  struct HeadCache {
    nn::Mat h_last, labels, label_pre, concat, joint_pre, joint, logits;
  };

  Discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

  // Last GRU state for each sequence in the batch.
  nn::Mat encode(const nn::SeqBatch& eeg, nn::GruCache* cache) const;
  // Pre-sigmoid scores, batch x 1.
  nn::Mat head(const nn::Mat& h_last, const nn::Mat& labels, HeadCache* cache) const;
  // Returns {dh_last, dlabels}. With accumulate == false parameter gradients
  // are left untouched.
  std::pair<nn::Mat, nn::Mat> head_backward(const HeadCache& cache, const nn::Mat& dlogits,
                                            bool accumulate);
  void encode_backward(const nn::GruCache& cache, const nn::Mat& dh_last);

  const DiscriminatorConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

 private:
  DiscriminatorConfig config_;
  nn::ParamStore params_;
  nn::Gru gru_;
  nn::Dense label_dense_, joint_, out_;
};

struct GanTrainConfig {
  std::size_t epochs = 201;
  std::size_t batch_size = 50;
  nn::AdamConfig adam;
  double clamp_eps = 1e-7;
  std::uint64_t seed = 0;
};

void validate(const GanTrainConfig& config);

struct LabeledSequence {
  RowMatrix frames;  // T x input_dim
  std::size_t label = 0;
};

struct GanModels {
  Generator generator;
  Discriminator discriminator;
  std::vector<double> generator_loss;      // per-epoch mean
  std::vector<double> discriminator_loss;  // per-epoch mean
};

double clamp_probability(double p, double eps);
// -log(P_sf)
double generator_loss(double p_sf, double eps = 1e-7);
// -log(P_se) - log(1 - P_sf)
double discriminator_loss(double p_se, double p_sf, double eps = 1e-7);

// Class distribution and TCN activations for one sequence.
Generator::Output generator_forward(const Generator& gen, const FeatureSequence& eeg);
// Clamped sigmoid score for one (sequence, label vector) pair.
double discriminator_forward(const Discriminator& disc, const FeatureSequence& eeg,
                             std::span<const double> label, double eps = 1e-7);

// Alternating updates per batch: a discriminator step on (EEG, one-hot) and
// (EEG, generator distribution held constant), then a generator step on
// -log(P_sf). Deterministic for a given config.seed.
GanModels train_gan(std::span<const LabeledSequence> data, std::size_t n_classes,
                    const GanTrainConfig& config, std::size_t input_dim = 30);

// Continues training existing models; returns per-epoch losses.
std::pair<std::vector<double>, std::vector<double>> train_gan(
    Generator& gen, Discriminator& disc, std::span<const LabeledSequence> data,
    const GanTrainConfig& config);

// argmax of the class distribution per sequence.
std::vector<std::size_t> classify(const Generator& gen, std::span<const LabeledSequence> data);

FeatureSequence extract_gan_features(const Generator& gen, const FeatureSequence& eeg);

void save_generator(const std::filesystem::path& path, const Generator& gen);
Generator load_generator(const std::filesystem::path& path);
void save_discriminator(const std::filesystem::path& path, const Discriminator& disc);
Discriminator load_discriminator(const std::filesystem::path& path);

}  // namespace e2t::gan
