// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "binio.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "error.hpp"

namespace e2t::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void ByteWriter::put_u32(std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf_.append(b, 4);
}

void ByteWriter::put_u64(std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buf_.append(b, 8);
}

void ByteWriter::put_f64(double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buf_.append(b, 8);
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n)
    throw IngestError(source_ + ": truncated file (needed " +
                      std::to_string(n) + " bytes at offset " +
                      std::to_string(pos_) + ")");
}

std::uint8_t ByteReader::get_u8() {
  need(1);
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t ByteReader::get_u32() {
  need(4);
  std::uint32_t v;
  std::memcpy(&v, data_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8);
  std::uint64_t v;
  std::memcpy(&v, data_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() {
  need(8);
  double v;
  std::memcpy(&v, data_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

std::string ByteReader::get_bytes(std::size_t n) {
  need(n);
  std::string out(data_.substr(pos_, n));
  pos_ += n;
  return out;
}

void ByteReader::expect_magic(std::string_view magic) {
  if (remaining() < magic.size() || data_.substr(pos_, magic.size()) != magic)
    throw IngestError(source_ + ": bad magic, expected \"" +
                      std::string(magic) + "\"");
  pos_ += magic.size();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() +
                        ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& context,
                    std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IngestError(context + ":" + std::to_string(line) +
                          ": not a number: \"" + std::string(s) + "\"",
                      line);
  return v;
}

std::string csv_quote(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line,
                                        std::size_t line_no,
                                        const std::string& source) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty())
        throw IngestError(source + ":" + std::to_string(line_no) +
                              ": stray quote inside unquoted field",
                          line_no);
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      if (was_quoted)
        throw IngestError(source + ":" + std::to_string(line_no) +
                              ": text after closing quote",
                          line_no);
      cur += c;
    }
  }
  if (quoted)
    throw IngestError(source + ":" + std::to_string(line_no) +
                          ": unterminated quoted field",
                      line_no);
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace e2t::io
