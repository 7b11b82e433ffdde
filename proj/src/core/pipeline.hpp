// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "features.hpp"

namespace e2t::pipeline {

// Work-dir layout. Every stage writes its outputs atomically and finishes by
// touching stages/<name>.done.
struct WorkDir {
  std::filesystem::path root;

  std::filesystem::path corpus_dir() const { return root / "corpus"; }
  std::filesystem::path preprocessed_dir() const { return root / "preprocessed"; }
  std::filesystem::path split_file() const { return root / "split.csv"; }
  std::filesystem::path features_dir(Provenance p) const;
  std::filesystem::path kpca_dir() const { return root / "kpca"; }
  std::filesystem::path gan_dir() const { return root / "gan"; }
  std::filesystem::path asr_dir(Provenance p) const;
  std::filesystem::path eval_dir(Provenance p) const;
  std::filesystem::path report_dir() const { return root / "report"; }
  std::filesystem::path marker(const std::string& stage) const;
};

// Holds <work>/.lock for the lifetime of one command.
class WorkDirLock {
 public:
  explicit WorkDirLock(const std::filesystem::path& root);
  ~WorkDirLock();
  WorkDirLock(const WorkDirLock&) = delete;
  WorkDirLock& operator=(const WorkDirLock&) = delete;

 private:
  std::filesystem::path path_;
};

// Each command takes the lock, checks its prerequisites, echoes the config and
// writes its stage marker on success. `synth_out` overrides the corpus dir.
void cmd_synth(const ExperimentConfig& config, const std::filesystem::path& synth_out = {});
void cmd_preprocess(const ExperimentConfig& config);
void cmd_features(const ExperimentConfig& config);
void cmd_kpca(const ExperimentConfig& config);
void cmd_gan(const ExperimentConfig& config);
void cmd_asr(const ExperimentConfig& config, Provenance provenance);
void cmd_eval(const ExperimentConfig& config, Provenance provenance);
void cmd_report(const ExperimentConfig& config);
// synth (unless a manifest is configured) through report, with asr and eval
// for kpca30 and gan32.
void cmd_all(const ExperimentConfig& config);

// Minimal standalone SVG line chart.
struct Series {
  std::string name;
  std::vector<double> x, y;
};
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

}  // namespace e2t::pipeline
