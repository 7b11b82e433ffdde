// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "wer.hpp"

#include <cctype>

#include "binio.hpp"
#include "error.hpp"

namespace e2t::asr {

double WerResult::percent() const {
  if (reference_words == 0) return 0.0;
  return 100.0 * static_cast<double>(errors()) / static_cast<double>(reference_words);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

WerResult wer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = split_words(reference);
  const auto hyp = split_words(hypothesis);
  if (ref.empty()) throw ParameterError("wer: reference has no words");

  // Cell holds (cost, S, I, D) of the best alignment of the prefixes; ties
  // prefer substitution, then deletion, then insertion.
  struct Cell {
    std::size_t cost, s, i, d;
  };
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, 0, j, 0};
  for (std::size_t r = 1; r <= n; ++r) {
    cur[0] = {r, 0, 0, r};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = ref[r - 1] == hyp[j - 1];
      Cell diag = prev[j - 1];
      if (!same) {
        ++diag.cost;
        ++diag.s;
      }
      Cell del = prev[j];
      ++del.cost;
      ++del.d;
      Cell ins = cur[j - 1];
      ++ins.cost;
      ++ins.i;
      Cell best = diag;
      if (del.cost < best.cost) best = del;
      if (ins.cost < best.cost) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const Cell& end = prev[m];
  return {end.s, end.i, end.d, n};
}

WerResult WerReport::totals() const {
  WerResult t;
  for (const auto& u : utterances) {
    t.substitutions += u.counts.substitutions;
    t.insertions += u.counts.insertions;
    t.deletions += u.counts.deletions;
    t.reference_words += u.counts.reference_words;
  }
  return t;
}

std::string WerReport::to_csv() const {
  std::string out = "id,reference,hypothesis,wer\n";
  for (const auto& u : utterances) {
    out += io::csv_quote(u.id) + "," + io::csv_quote(u.reference) + "," +
           io::csv_quote(u.hypothesis) + "," + io::format_double(u.counts.percent()) + "\n";
  }
  return out;
}

}  // namespace e2t::asr
