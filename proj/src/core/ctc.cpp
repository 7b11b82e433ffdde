// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "ctc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "error.hpp"
#include "nn.hpp"

namespace e2t::asr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

CharVocab::CharVocab() : chars_(" abcdefghijklmnopqrstuvwxyz") {}

int CharVocab::index_of(char c) const {
  const auto pos = chars_.find(c);
  return pos == std::string::npos ? -1 : static_cast<int>(pos) + 1;
}

char CharVocab::char_at(int index) const {
  if (index < 1 || index > static_cast<int>(chars_.size()))
    throw ParameterError("vocab: index " + std::to_string(index) + " is not a character");
  return chars_[static_cast<std::size_t>(index - 1)];
}

std::vector<int> CharVocab::encode(std::string_view text) const {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) {
    const int idx = index_of(c);
    if (idx < 0)
      throw ParameterError(std::string("vocab: character '") + c + "' is not in the vocabulary");
    out.push_back(idx);
  }
  return out;
}

std::string CharVocab::decode(const std::vector<int>& labels) const {
  std::string out;
  for (int l : labels) out += char_at(l);
  return out;
}

std::string normalize_transcript(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else if (std::isalpha(c)) {
      if (pending_space) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    }
  }
  return out;
}

std::size_t min_frames(const std::vector<int>& labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

CtcResult ctc_loss(const RowMatrix& logits, const std::vector<int>& labels, bool with_grad) {
  const auto T = static_cast<std::size_t>(logits.rows());
  const auto C = static_cast<int>(logits.cols());
  if (T == 0) throw ParameterError("ctc_loss: no frames");
  if (!logits.allFinite()) throw NumericError("ctc_loss: non-finite logits");
  for (int l : labels)
    if (l <= CharVocab::kBlank || l >= C)
      throw ParameterError("ctc_loss: label index " + std::to_string(l) + " invalid for " +
                           std::to_string(C) + " classes");
  if (T < min_frames(labels))
    throw InfeasibleLabelError("ctc_loss: label needs " + std::to_string(min_frames(labels)) +
                               " frames, only " + std::to_string(T) + " available");

  const nn::Mat logp = nn::log_softmax_rows(logits);
  const std::size_t S = 2 * labels.size() + 1;
  std::vector<int> ext(S, CharVocab::kBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && ext[s] != CharVocab::kBlank && ext[s] != ext[s - 2];
  };
  auto lp = [&](std::size_t t, std::size_t s) {
    return logp(static_cast<Eigen::Index>(t), ext[s]);
  };

  std::vector<double> alpha(T * S, kNegInf);
  auto A = [&](std::size_t t, std::size_t s) -> double& { return alpha[t * S + s]; };
  A(0, 0) = lp(0, 0);
  if (S > 1) A(0, 1) = lp(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = A(t - 1, s);
      if (s >= 1) a = log_add(a, A(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, A(t - 1, s - 2));
      A(t, s) = a == kNegInf ? kNegInf : a + lp(t, s);
    }
  }
  double log_total = A(T - 1, S - 1);
  if (S > 1) log_total = log_add(log_total, A(T - 1, S - 2));
  if (!std::isfinite(log_total)) throw NumericError("ctc_loss: alignment probability underflow");

  CtcResult result;
  result.loss = -log_total;
  if (!with_grad) return result;

  // beta(t, s): log-probability of finishing from state s at t, emissions after t.
  std::vector<double> beta(T * S, kNegInf);
  auto Bt = [&](std::size_t t, std::size_t s) -> double& { return beta[t * S + s]; };
  Bt(T - 1, S - 1) = 0.0;
  if (S > 1) Bt(T - 1, S - 2) = 0.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = Bt(t + 1, s) + lp(t + 1, s);
      if (s + 1 < S) b = log_add(b, Bt(t + 1, s + 1) + lp(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, Bt(t + 1, s + 2) + lp(t + 1, s + 2));
      Bt(t, s) = b;
    }
  }

  result.grad = logp.array().exp();
  std::vector<double> occ(static_cast<std::size_t>(C));
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(occ.begin(), occ.end(), kNegInf);
    for (std::size_t s = 0; s < S; ++s)
      occ[static_cast<std::size_t>(ext[s])] =
          log_add(occ[static_cast<std::size_t>(ext[s])], A(t, s) + Bt(t, s));
    for (int k = 0; k < C; ++k)
      if (occ[static_cast<std::size_t>(k)] != kNegInf)
        result.grad(static_cast<Eigen::Index>(t), k) -=
            std::exp(occ[static_cast<std::size_t>(k)] - log_total);
  }
  return result;
}

std::string greedy_decode(const RowMatrix& logits, const CharVocab& vocab) {
  if (static_cast<std::size_t>(logits.cols()) != vocab.size())
    throw ParameterError("greedy decode: logits have " + std::to_string(logits.cols()) +
                         " classes, vocabulary has " + std::to_string(vocab.size()));
  std::string out;
  int prev = -1;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    Eigen::Index arg = 0;
    logits.row(t).maxCoeff(&arg);
    const int k = static_cast<int>(arg);
    if (k != prev && k != CharVocab::kBlank) out += vocab.char_at(k);
    prev = k;
  }
  return out;
}

std::string beam_search_decode(const RowMatrix& logits, const CharVocab& vocab,
                               const NgramLm* lm, const BeamOptions& options) {
  if (options.beam_width == 0) throw ParameterError("beam search: beam width must be >= 1");
  if (static_cast<std::size_t>(logits.cols()) != vocab.size())
    throw ParameterError("beam search: logits have " + std::to_string(logits.cols()) +
                         " classes, vocabulary has " + std::to_string(vocab.size()));
  if (options.beam_width == 1) return greedy_decode(logits, vocab);

  struct Scores {
    double blank = kNegInf;
    double nonblank = kNegInf;
    double total() const { return log_add(blank, nonblank); }
  };
  const nn::Mat logp = nn::log_softmax_rows(logits);
  const int C = static_cast<int>(logits.cols());

  auto fusion = [&](const std::string& prefix, char c) {
    double s = 0.0;
    if (lm && options.lm_weight != 0.0) s += options.lm_weight * lm->log_prob(prefix, c);
    if (c == ' ') s += options.word_bonus;
    return s;
  };

  std::vector<std::pair<std::string, Scores>> beam{{"", Scores{0.0, kNegInf}}};
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    std::map<std::string, Scores> next;
    for (const auto& [prefix, sc] : beam) {
      const double total = sc.total();
      auto& same = next[prefix];
      same.blank = log_add(same.blank, total + logp(t, CharVocab::kBlank));
      const char last = prefix.empty() ? '\0' : prefix.back();
      for (int k = 1; k < C; ++k) {
        const char c = vocab.char_at(k);
        const double p = logp(t, k);
        std::string extended = prefix + c;
        if (c == last) {
          auto& keep = next[prefix];
          keep.nonblank = log_add(keep.nonblank, sc.nonblank + p);
          if (sc.blank != kNegInf) {
            auto& ext = next[extended];
            ext.nonblank = log_add(ext.nonblank, sc.blank + p + fusion(prefix, c));
          }
        } else {
          auto& ext = next[extended];
          ext.nonblank = log_add(ext.nonblank, total + p + fusion(prefix, c));
        }
      }
    }
    beam.assign(next.begin(), next.end());
    // Stable w.r.t. the map's lexicographic order, so ties resolve
    // deterministically.
    std::stable_sort(beam.begin(), beam.end(), [](const auto& a, const auto& b) {
      return a.second.total() > b.second.total();
    });
    if (beam.size() > options.beam_width) beam.resize(options.beam_width);
  }
  return beam.front().first;
}

}  // namespace e2t::asr
