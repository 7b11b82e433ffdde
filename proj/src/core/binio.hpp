// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace e2t::io {

// Little-endian serialization used by every binary artifact (EEGF, KPCA, NNCK).
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_bytes(std::string_view bytes) { buf_.append(bytes); }

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string source)
      : data_(data), source_(std::move(source)) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  double get_f64();
  std::string get_bytes(std::size_t n);
  void expect_magic(std::string_view magic);
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::string_view data_;
  std::string source_;
  std::size_t pos_ = 0;
};

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double v);
double parse_double(std::string_view s, const std::string& context,
                    std::size_t line);

std::string csv_quote(std::string_view field);
// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line,
                                        std::size_t line_no,
                                        const std::string& source);

}  // namespace e2t::io
