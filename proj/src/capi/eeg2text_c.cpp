// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "eeg2text/eeg2text.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "config.hpp"
#include "ctc.hpp"
#include "error.hpp"
#include "features.hpp"
#include "pipeline.hpp"
#include "wer.hpp"

struct e2t_pipeline {
  e2t::ExperimentConfig config;
};

struct e2t_features {
  e2t::FeatureSequence seq;
};

namespace {

thread_local std::string g_last_error;

e2t_status status_of(e2t::ErrorKind kind) {
  switch (kind) {
    case e2t::ErrorKind::kParameter: return E2T_ERR_PARAMETER;
    case e2t::ErrorKind::kNumeric: return E2T_ERR_NUMERIC;
    case e2t::ErrorKind::kConvergence: return E2T_ERR_CONVERGENCE;
    case e2t::ErrorKind::kRank: return E2T_ERR_RANK;
    case e2t::ErrorKind::kInfeasibleLabel: return E2T_ERR_INFEASIBLE_LABEL;
    case e2t::ErrorKind::kDataset: return E2T_ERR_DATASET;
    case e2t::ErrorKind::kDegenerateOutput: return E2T_ERR_DEGENERATE_OUTPUT;
    case e2t::ErrorKind::kIngest: return E2T_ERR_INGEST;
    case e2t::ErrorKind::kIo: return E2T_ERR_IO;
    case e2t::ErrorKind::kPrerequisite: return E2T_ERR_PREREQUISITE;
  }
  return E2T_ERR_INTERNAL;
}

template <typename Fn>
e2t_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return E2T_OK;
  } catch (const e2t::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return E2T_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return E2T_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return E2T_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw e2t::ParameterError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

e2t::RowMatrix logits_from(const double* logits, size_t frames, size_t classes) {
  require(logits != nullptr || frames * classes == 0, "logits must not be NULL");
  e2t::RowMatrix m(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(classes));
  if (frames * classes > 0) std::memcpy(m.data(), logits, frames * classes * sizeof(double));
  return m;
}

}  // namespace

extern "C" {

const char* e2t_version(void) { return "0.1.0"; }

const char* e2t_status_name(e2t_status status) {
  switch (status) {
    case E2T_OK: return "ok";
    case E2T_ERR_PARAMETER: return "parameter";
    case E2T_ERR_NUMERIC: return "numeric";
    case E2T_ERR_CONVERGENCE: return "convergence";
    case E2T_ERR_RANK: return "rank";
    case E2T_ERR_INFEASIBLE_LABEL: return "infeasible_label";
    case E2T_ERR_DATASET: return "dataset";
    case E2T_ERR_DEGENERATE_OUTPUT: return "degenerate_output";
    case E2T_ERR_INGEST: return "ingest";
    case E2T_ERR_IO: return "io";
    case E2T_ERR_PREREQUISITE: return "prerequisite";
    case E2T_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* e2t_last_error(void) { return g_last_error.c_str(); }

void e2t_set_log_level(e2t_log_level level) {
  e2t::set_log_level(static_cast<e2t::LogLevel>(level));
}

void e2t_free(void* p) { std::free(p); }

e2t_status e2t_pipeline_create(const char* config_path, e2t_pipeline** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = nullptr;
    auto p = std::make_unique<e2t_pipeline>();
    if (config_path && *config_path) p->config = e2t::load_config(config_path);
    *out = p.release();
  });
}

e2t_status e2t_pipeline_create_from_json(const char* json, e2t_pipeline** out) {
  return guarded([&] {
    require(out != nullptr && json != nullptr, "json and out must not be NULL");
    *out = nullptr;
    auto p = std::make_unique<e2t_pipeline>();
    p->config = e2t::config_from_json(json, "<json>");
    *out = p.release();
  });
}

void e2t_pipeline_destroy(e2t_pipeline* p) { delete p; }

e2t_status e2t_pipeline_set_seed(e2t_pipeline* p, uint64_t seed) {
  return guarded([&] {
    require(p != nullptr, "pipeline must not be NULL");
    p->config.seed = seed;
  });
}

e2t_status e2t_pipeline_set_work_dir(e2t_pipeline* p, const char* work_dir) {
  return guarded([&] {
    require(p != nullptr && work_dir != nullptr && *work_dir, "pipeline and work_dir required");
    p->config.work_dir = work_dir;
  });
}

e2t_status e2t_pipeline_config_json(const e2t_pipeline* p, char** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "pipeline and out must not be NULL");
    *out = dup_string(e2t::to_json(p->config));
  });
}

e2t_status e2t_pipeline_run(e2t_pipeline* p, const char* command, const char* provenance,
                            const char* out_dir) {
  return guarded([&] {
    require(p != nullptr && command != nullptr, "pipeline and command must not be NULL");
    namespace pl = e2t::pipeline;
    const std::string cmd = command;
    auto prov = [&] {
      require(provenance != nullptr && *provenance, "this command needs a provenance");
      return e2t::parse_provenance(provenance);
    };
    const auto& c = p->config;
    if (cmd == "synth") pl::cmd_synth(c, out_dir ? out_dir : "");
    else if (cmd == "preprocess") pl::cmd_preprocess(c);
    else if (cmd == "features") pl::cmd_features(c);
    else if (cmd == "kpca") pl::cmd_kpca(c);
    else if (cmd == "gan") pl::cmd_gan(c);
    else if (cmd == "asr") pl::cmd_asr(c, prov());
    else if (cmd == "eval") pl::cmd_eval(c, prov());
    else if (cmd == "report") pl::cmd_report(c);
    else if (cmd == "all") pl::cmd_all(c);
    else throw e2t::ParameterError("unknown command '" + cmd + "'");
  });
}

e2t_status e2t_wer(const char* reference, const char* hypothesis, double* percent,
                   size_t* substitutions, size_t* insertions, size_t* deletions) {
  return guarded([&] {
    require(reference != nullptr && hypothesis != nullptr, "strings must not be NULL");
    const auto r = e2t::asr::wer(reference, hypothesis);
    if (percent) *percent = r.percent();
    if (substitutions) *substitutions = r.substitutions;
    if (insertions) *insertions = r.insertions;
    if (deletions) *deletions = r.deletions;
  });
}

e2t_status e2t_ctc_loss(const double* logits, size_t frames, size_t classes, const int* labels,
                        size_t label_len, double* loss, double* grad) {
  return guarded([&] {
    require(loss != nullptr, "loss must not be NULL");
    require(labels != nullptr || label_len == 0, "labels must not be NULL");
    const auto m = logits_from(logits, frames, classes);
    const std::vector<int> lab(labels, labels + label_len);
    const auto r = e2t::asr::ctc_loss(m, lab, grad != nullptr);
    *loss = r.loss;
    if (grad) std::memcpy(grad, r.grad.data(), frames * classes * sizeof(double));
  });
}

e2t_status e2t_greedy_decode(const double* logits, size_t frames, size_t classes, char** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const e2t::asr::CharVocab vocab;
    require(classes == vocab.size(), "logits must have 28 classes");
    *out = dup_string(e2t::asr::greedy_decode(logits_from(logits, frames, classes), vocab));
  });
}

e2t_status e2t_features_read(const char* path, e2t_features** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = nullptr;
    auto f = std::make_unique<e2t_features>();
    f->seq = e2t::features::read_file(path);
    *out = f.release();
  });
}

void e2t_features_destroy(e2t_features* f) { delete f; }
size_t e2t_features_frames(const e2t_features* f) { return f ? f->seq.num_frames() : 0; }
size_t e2t_features_dim(const e2t_features* f) { return f ? f->seq.dim() : 0; }
const double* e2t_features_data(const e2t_features* f) { return f ? f->seq.frames.data() : nullptr; }
const char* e2t_features_provenance(const e2t_features* f) {
  return f ? e2t::provenance_name(f->seq.provenance) : "";
}

}  // extern "C"
