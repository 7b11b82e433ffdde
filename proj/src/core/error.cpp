// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "error.hpp"

#include <atomic>
#include <iostream>

namespace e2t {

namespace {
std::atomic<int> g_log_level{static_cast<int>(LogLevel::kWarning)};
}

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kConvergence: return "convergence error";
    case ErrorKind::kRank: return "rank error";
    case ErrorKind::kInfeasibleLabel: return "infeasible label";
    case ErrorKind::kDataset: return "dataset error";
    case ErrorKind::kDegenerateOutput: return "degenerate output";
    case ErrorKind::kIngest: return "ingest error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kPrerequisite: return "missing prerequisite";
  }
  return "error";
}

void set_log_level(LogLevel level) noexcept {
  g_log_level.store(static_cast<int>(level));
}

void log_warning(const std::string& msg) {
  if (g_log_level.load() >= static_cast<int>(LogLevel::kWarning))
    std::cerr << "warning: " << msg << '\n';
}

void log_info(const std::string& msg) {
  if (g_log_level.load() >= static_cast<int>(LogLevel::kInfo))
    std::cerr << msg << '\n';
}

}  // namespace e2t
