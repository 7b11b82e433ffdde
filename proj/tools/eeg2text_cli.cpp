// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

// Batch front end over the C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eeg2text/eeg2text.h"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kValidation = 2, kNumeric = 3 };

int exit_code(e2t_status s) {
  switch (s) {
    case E2T_OK:
      return kOk;
    case E2T_ERR_NUMERIC:
    case E2T_ERR_CONVERGENCE:
    case E2T_ERR_RANK:
    case E2T_ERR_DEGENERATE_OUTPUT:
      return kNumeric;
    case E2T_ERR_INTERNAL:
      return kInternal;
    default:
      return kValidation;
  }
}

int report(e2t_status s) {
  if (s != E2T_OK)
    std::fprintf(stderr, "eeg2text: %s error: %s\n", e2t_status_name(s), e2t_last_error());
  return exit_code(s);
}

using PipelinePtr = std::unique_ptr<e2t_pipeline, decltype(&e2t_pipeline_destroy)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG-to-text experiment pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, work_dir, provenance, out_dir, ref, hyp;
  std::optional<std::uint64_t> seed;
  bool verbose = false, quiet = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "global seed (overrides the config)");
  app.add_option("--work-dir", work_dir, "work directory (overrides the config)");
  app.add_flag("-v,--verbose", verbose, "log progress");
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  auto add_provenance = [&](CLI::App* sub) {
    sub->add_option("--provenance", provenance, "feature provenance")
        ->required()
        ->check(CLI::IsMember({"raw155", "kpca30", "gan32"}));
  };
  CLI::App* synth = app.add_subcommand("synth", "generate the synthetic corpus");
  synth->add_option("--out", out_dir, "corpus directory (default <work-dir>/corpus)");
  app.add_subcommand("preprocess", "band-pass, notch and ICA cleanup");
  app.add_subcommand("features", "extract raw155 feature sequences");
  app.add_subcommand("kpca", "fit KPCA and write kpca30 features");
  app.add_subcommand("gan", "train the GAN and write gan32 features");
  add_provenance(app.add_subcommand("asr", "train CTC recognizers per bucket"));
  add_provenance(app.add_subcommand("eval", "decode the test split and score WER"));
  app.add_subcommand("report", "WER comparison table and charts");
  app.add_subcommand("all", "run every stage from synth to report");
  app.add_subcommand("config", "print the effective configuration");
  CLI::App* wer = app.add_subcommand("wer", "word error rate of one hypothesis");
  wer->add_option("--ref", ref, "reference text")->required();
  wer->add_option("--hyp", hyp, "hypothesis text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error is a validation error.
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  e2t_set_log_level(quiet ? E2T_LOG_QUIET : verbose ? E2T_LOG_INFO : E2T_LOG_WARNING);
  const std::string command = app.get_subcommands().front()->get_name();

  if (command == "wer") {
    double percent = 0.0;
    std::size_t s = 0, i = 0, d = 0;
    const e2t_status st = e2t_wer(ref.c_str(), hyp.c_str(), &percent, &s, &i, &d);
    if (st == E2T_OK)
      std::printf("wer=%.3f substitutions=%zu insertions=%zu deletions=%zu\n", percent, s, i, d);
    return report(st);
  }

  e2t_pipeline* raw = nullptr;
  e2t_status st = e2t_pipeline_create(config_path.empty() ? nullptr : config_path.c_str(), &raw);
  if (st != E2T_OK) return report(st);
  PipelinePtr pipeline(raw, &e2t_pipeline_destroy);
  if (seed) st = e2t_pipeline_set_seed(pipeline.get(), *seed);
  if (st == E2T_OK && !work_dir.empty()) st = e2t_pipeline_set_work_dir(pipeline.get(), work_dir.c_str());
  if (st != E2T_OK) return report(st);

  if (command == "config") {
    char* json = nullptr;
    st = e2t_pipeline_config_json(pipeline.get(), &json);
    if (st == E2T_OK) std::fputs(json, stdout);
    e2t_free(json);
    return report(st);
  }
  return report(e2t_pipeline_run(pipeline.get(), command.c_str(),
                                 provenance.empty() ? nullptr : provenance.c_str(),
                                 out_dir.empty() ? nullptr : out_dir.c_str()));
}
