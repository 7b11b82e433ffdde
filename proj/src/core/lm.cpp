// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "lm.hpp"

#include <cmath>
#include <sstream>

#include "binio.hpp"
#include "ctc.hpp"
#include "error.hpp"

namespace e2t::asr {

NgramLm::NgramLm(std::size_t order, double add_k, std::string vocabulary)
    : order_(order), add_k_(add_k), vocab_(std::move(vocabulary)) {
  if (order_ < 1) throw ParameterError("lm: order must be >= 1");
  if (!(add_k_ >= 0.0)) throw ParameterError("lm: add-k must be >= 0");
  if (vocab_.empty()) throw ParameterError("lm: empty vocabulary");
}

std::string NgramLm::context_of(std::string_view history) const {
  const std::size_t n = order_ - 1;
  std::string ctx;
  if (history.size() < n) ctx.assign(n - history.size(), kBos);
  ctx += history.substr(history.size() - std::min(n, history.size()));
  return ctx;
}

void NgramLm::add_count(const std::string& context, char next, double count) {
  if (context.size() != order_ - 1)
    throw ParameterError("lm: context length " + std::to_string(context.size()) +
                         " does not match order " + std::to_string(order_));
  if (vocab_.find(next) == std::string::npos)
    throw ParameterError(std::string("lm: character '") + next + "' not in vocabulary");
  counts_[context][next] += count;
  totals_[context] += count;
}

double NgramLm::prob(std::string_view history, char next) const {
  if (vocab_.find(next) == std::string::npos)
    throw ParameterError(std::string("lm: character '") + next + "' not in vocabulary");
  const double v = static_cast<double>(vocab_.size());
  const std::string ctx = context_of(history);
  auto it = totals_.find(ctx);
  if (it == totals_.end() || it->second <= 0.0) return 1.0 / v;
  double c = 0.0;
  const auto& row = counts_.at(ctx);
  if (auto jt = row.find(next); jt != row.end()) c = jt->second;
  return (c + add_k_) / (it->second + add_k_ * v);
}

double NgramLm::log_prob(std::string_view history, char next) const {
  return std::log(prob(history, next));
}

std::string NgramLm::to_text() const {
  std::string out = "# character n-gram counts\n";
  out += "order\t" + std::to_string(order_) + "\n";
  out += "add_k\t" + io::format_double(add_k_) + "\n";
  out += "vocab\t" + io::csv_quote(vocab_) + "\n";
  out += "counts\n";
  for (const auto& [ctx, row] : counts_)
    for (const auto& [c, n] : row) {
      out += ctx;
      out += '\t';
      out += c;
      out += '\t';
      out += io::format_double(n);
      out += '\n';
    }
  return out;
}

NgramLm NgramLm::from_text(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t order = 0;
  double add_k = -1.0;
  std::string vocab;
  bool in_counts = false;
  NgramLm lm;
  bool built = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!in_counts) {
      if (line.empty() || line[0] == '#') continue;
      if (line == "counts") {
        if (order == 0 || add_k < 0.0 || vocab.empty())
          throw IngestError(source + ":" + std::to_string(line_no) +
                                ": header incomplete before counts",
                            line_no);
        lm = NgramLm(order, add_k, vocab);
        built = true;
        in_counts = true;
        continue;
      }
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw IngestError(source + ":" + std::to_string(line_no) + ": malformed header line",
                          line_no);
      const std::string key = line.substr(0, tab);
      const std::string val = line.substr(tab + 1);
      if (key == "order") {
        order = static_cast<std::size_t>(io::parse_double(val, source, line_no));
      } else if (key == "add_k") {
        add_k = io::parse_double(val, source, line_no);
      } else if (key == "vocab") {
        const auto fields = io::split_csv_line(val, line_no, source);
        if (fields.size() != 1)
          throw IngestError(source + ":" + std::to_string(line_no) + ": bad vocab", line_no);
        vocab = fields[0];
      } else {
        throw IngestError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'",
                          line_no);
      }
      continue;
    }
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || t2 != t1 + 2)
      throw IngestError(source + ":" + std::to_string(line_no) + ": malformed count row",
                        line_no);
    try {
      lm.add_count(line.substr(0, t1), line[t1 + 1],
                   io::parse_double(line.substr(t2 + 1), source, line_no));
    } catch (const ParameterError& e) {
      throw IngestError(source + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  if (!built) throw IngestError(source + ": missing counts section");
  return lm;
}

NgramLm train_lm(const std::vector<std::string>& corpus, std::size_t order, double add_k) {
  if (corpus.empty()) throw ParameterError("train_lm: empty corpus");
  NgramLm lm(order, add_k, CharVocab().characters());
  for (const std::string& raw : corpus) {
    const std::string sentence = normalize_transcript(raw);
    for (std::size_t i = 0; i < sentence.size(); ++i)
      lm.add_count(lm.context_of(std::string_view(sentence).substr(0, i)), sentence[i], 1.0);
  }
  return lm;
}

void save_lm(const std::filesystem::path& path, const NgramLm& lm) {
  io::write_file_atomic(path, lm.to_text());
}

NgramLm load_lm(const std::filesystem::path& path) {
  return NgramLm::from_text(io::read_file(path), path.string());
}

}  // namespace e2t::asr
