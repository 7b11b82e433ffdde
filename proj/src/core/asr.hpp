// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctc.hpp"
#include "layers.hpp"

namespace e2t::asr {

struct CtcModelConfig {
  std::size_t input_dim = 30;
  std::size_t gru1_units = 128;
  std::size_t gru2_units = 64;
  double dropout = 0.2;
  std::size_t num_classes = 28;  // vocabulary plus blank
};

// GRU(128) -> dropout -> GRU(64) -> per-frame dense logits.
class CtcModel {
 public:
  struct Cache {
    nn::GruCache gru1, gru2;
    nn::Mat mask;
    nn::SeqBatch hidden;
  };

  CtcModel(const CtcModelConfig& config, std::uint64_t seed);

  // Logits for every frame, (steps * batch) x num_classes. Dropout is applied
  // only when `dropout_rng` is given.
  nn::SeqBatch forward(const nn::SeqBatch& x, std::mt19937_64* dropout_rng, Cache* cache) const;
  void backward(const Cache& cache, const nn::SeqBatch& dlogits);

  RowMatrix logits(const RowMatrix& frames) const;

  const CtcModelConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

 private:
  CtcModelConfig config_;
  nn::ParamStore params_;
  nn::Gru gru1_, gru2_;
  nn::Dense out_;
};

struct CtcExample {
  std::string id;
  RowMatrix frames;
  std::string transcript;
};

struct CtcTrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 16;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
};

// Adam on the batch-mean CTC loss. Examples whose transcript cannot be aligned
// to their frame count are skipped with a warning. Returns per-epoch mean loss.
std::vector<double> train_ctc(CtcModel& model, std::span<const CtcExample> data,
                              const CtcTrainConfig& config);

// Mean CTC loss without dropout over alignable examples.
double evaluate_loss(const CtcModel& model, std::span<const CtcExample> data);

void save_ctc(const std::filesystem::path& path, const CtcModel& model);
CtcModel load_ctc(const std::filesystem::path& path);

}  // namespace e2t::asr
