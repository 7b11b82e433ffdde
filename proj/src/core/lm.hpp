// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace e2t::asr {

// Character n-gram model with add-k smoothing. Contexts shorter than order-1
// at sentence start are padded with kBos.
class NgramLm {
 public:
  static constexpr char kBos = '^';

  NgramLm() = default;
  NgramLm(std::size_t order, double add_k, std::string vocabulary);

  std::size_t order() const { return order_; }
  double add_k() const { return add_k_; }
  const std::string& vocabulary() const { return vocab_; }

  void add_count(const std::string& context, char next, double count);
  // P(next | last order-1 characters of `history`).
  double prob(std::string_view history, char next) const;
  double log_prob(std::string_view history, char next) const;

  // Padded context for the given history.
  std::string context_of(std::string_view history) const;

  const std::map<std::string, std::map<char, double>>& counts() const { return counts_; }

  // Text dump: header lines then "context<TAB>char<TAB>count".
  std::string to_text() const;
  static NgramLm from_text(std::string_view text, const std::string& source);

 private:
  std::size_t order_ = 3;
  double add_k_ = 0.1;
  std::string vocab_;
  std::map<std::string, std::map<char, double>> counts_;
  std::map<std::string, double> totals_;
};

// Sentences are normalized with normalize_transcript before counting.
NgramLm train_lm(const std::vector<std::string>& corpus, std::size_t order = 3,
                 double add_k = 0.1);

void save_lm(const std::filesystem::path& path, const NgramLm& lm);
NgramLm load_lm(const std::filesystem::path& path);

}  // namespace e2t::asr
