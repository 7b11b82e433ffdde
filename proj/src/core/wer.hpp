// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace e2t::asr {

struct WerResult {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_words = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  // 100 * errors / reference words; may exceed 100.
  double percent() const;
};

std::vector<std::string> split_words(std::string_view text);

// Word-level Levenshtein alignment with unit costs. Throws ParameterError for
// an empty reference.
WerResult wer(std::string_view reference, std::string_view hypothesis);

struct UtteranceResult {
  std::string id;
  std::string reference;
  std::string hypothesis;
  WerResult counts;
};

struct WerReport {
  std::vector<UtteranceResult> utterances;
  std::string provenance;
  std::size_t bucket = 0;

  WerResult totals() const;
  double aggregate_percent() const { return totals().percent(); }
  // "id,reference,hypothesis,wer"
  std::string to_csv() const;
};

}  // namespace e2t::asr
