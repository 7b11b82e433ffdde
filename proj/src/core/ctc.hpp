// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lm.hpp"
#include "signal.hpp"

namespace e2t::asr {

// Blank at index 0, then space, then 'a'..'z'.
class CharVocab {
 public:
  static constexpr int kBlank = 0;

  CharVocab();

  // Including the blank.
  std::size_t size() const { return chars_.size() + 1; }
  const std::string& characters() const { return chars_; }
  int index_of(char c) const;
  char char_at(int index) const;
  // Throws ParameterError on characters outside the vocabulary.
  std::vector<int> encode(std::string_view text) const;
  std::string decode(const std::vector<int>& labels) const;

 private:
  std::string chars_;
};

// Lowercases, maps whitespace runs to one space, drops other characters and
// trims.
std::string normalize_transcript(std::string_view text);

struct CtcResult {
  double loss = 0.0;
  RowMatrix grad;  // d loss / d logits, T x C
};

// Minimum frames needed to emit `labels`: one per label plus one blank between
// each pair of equal neighbours.
std::size_t min_frames(const std::vector<int>& labels);

// Negative log-likelihood over all alignments (log-space forward-backward) and
// its exact gradient w.r.t. the unnormalized logits.
CtcResult ctc_loss(const RowMatrix& logits, const std::vector<int>& labels,
                   bool with_grad = true);

std::string greedy_decode(const RowMatrix& logits, const CharVocab& vocab);

struct BeamOptions {
  std::size_t beam_width = 25;
  double lm_weight = 0.5;
  double word_bonus = 1.0;
};

// CTC prefix beam search with shallow LM fusion. With beam_width == 1 the
// search degenerates to best-path decoding.
std::string beam_search_decode(const RowMatrix& logits, const CharVocab& vocab,
                               const NgramLm* lm, const BeamOptions& options);

}  // namespace e2t::asr
