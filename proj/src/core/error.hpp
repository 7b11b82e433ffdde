// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace e2t {

enum class ErrorKind {
  kParameter,
  kNumeric,
  kConvergence,
  kRank,
  kInfeasibleLabel,
  kDataset,
  kDegenerateOutput,
  kIngest,
  kIo,
  kPrerequisite,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::kParameter, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::size_t iterations)
      : Error(ErrorKind::kConvergence, what), iterations(iterations) {}
  std::size_t iterations;
};

// Fewer usable components than requested; `achievable` is the largest k that
// would have succeeded.
struct RankError : Error {
  RankError(const std::string& what, std::size_t achievable)
      : Error(ErrorKind::kRank, what), achievable(achievable) {}
  std::size_t achievable;
};

struct InfeasibleLabelError : Error {
  explicit InfeasibleLabelError(const std::string& what)
      : Error(ErrorKind::kInfeasibleLabel, what) {}
};

struct DatasetError : Error {
  explicit DatasetError(const std::string& what)
      : Error(ErrorKind::kDataset, what) {}
};

struct DegenerateOutputError : Error {
  explicit DegenerateOutputError(const std::string& what)
      : Error(ErrorKind::kDegenerateOutput, what) {}
};

// Malformed input file. `line` is 1-based, 0 when not line-oriented.
struct IngestError : Error {
  IngestError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::kIngest, what), line(line) {}
  std::size_t line;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

struct PrerequisiteError : Error {
  explicit PrerequisiteError(const std::string& what)
      : Error(ErrorKind::kPrerequisite, what) {}
};

const char* error_kind_name(ErrorKind kind) noexcept;

// Diagnostics go through a single sink so the C API can silence or redirect
// them.
enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };
void set_log_level(LogLevel level) noexcept;
void log_warning(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace e2t
