// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "eeg2text/eeg2text.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(E2T_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + E2T_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(e2t_version()).size() > 0);
  CHECK(std::string(e2t_status_name(E2T_OK)) == "ok");
  CHECK(std::string(e2t_status_name(E2T_ERR_PREREQUISITE)) != "ok");
}

TEST_CASE("wer through the C API") {
  double pct = -1;
  size_t s = 9, i = 9, d = 9;
  REQUIRE(e2t_wer("a", "x y", &pct, &s, &i, &d) == E2T_OK);
  CHECK(pct == 200.0);
  CHECK(s == 1);
  CHECK(i == 1);
  CHECK(d == 0);
  REQUIRE(e2t_wer("turn on", "turn on", &pct, nullptr, nullptr, nullptr) == E2T_OK);
  CHECK(pct == 0.0);
  CHECK(e2t_wer("", "x", &pct, nullptr, nullptr, nullptr) == E2T_ERR_PARAMETER);
  CHECK(std::string(e2t_last_error()).find("reference") != std::string::npos);
  CHECK(e2t_wer(nullptr, "x", &pct, nullptr, nullptr, nullptr) == E2T_ERR_PARAMETER);
}

TEST_CASE("ctc loss and decoding through the C API") {
  const std::vector<double> logits(4, 0.0);  // T=2, C=2
  const int label = 1;
  double loss = 0;
  std::vector<double> grad(4);
  REQUIRE(e2t_ctc_loss(logits.data(), 2, 2, &label, 1, &loss, grad.data()) == E2T_OK);
  CHECK(std::abs(loss + std::log(0.75)) < 1e-12);
  CHECK(std::abs(grad[0] + grad[1]) < 1e-12);
  const int twice[2] = {1, 1};
  CHECK(e2t_ctc_loss(logits.data(), 2, 2, twice, 2, &loss, nullptr) == E2T_ERR_INFEASIBLE_LABEL);

  std::vector<double> l(3 * 28, 0.0);
  l[0 * 28 + 9] = 5;  // h
  l[1 * 28 + 0] = 5;  // blank
  l[2 * 28 + 10] = 5;  // i
  char* out = nullptr;
  REQUIRE(e2t_greedy_decode(l.data(), 3, 28, &out) == E2T_OK);
  CHECK(std::string(out) == "hi");
  e2t_free(out);
  CHECK(e2t_greedy_decode(l.data(), 3, 27, &out) == E2T_ERR_PARAMETER);
}

TEST_CASE("pipeline handle") {
  e2t_set_log_level(E2T_LOG_QUIET);
  e2t_pipeline* p = nullptr;
  REQUIRE(e2t_pipeline_create(nullptr, &p) == E2T_OK);
  const auto dir = fresh_dir("capi_pipe");
  REQUIRE(e2t_pipeline_set_seed(p, 17) == E2T_OK);
  REQUIRE(e2t_pipeline_set_work_dir(p, (dir / "work").c_str()) == E2T_OK);
  char* json = nullptr;
  REQUIRE(e2t_pipeline_config_json(p, &json) == E2T_OK);
  CHECK(std::string(json).find("\"seed\": 17") != std::string::npos);
  e2t_free(json);

  CHECK(e2t_pipeline_run(p, "kpca", nullptr, nullptr) == E2T_ERR_PREREQUISITE);
  CHECK(std::string(e2t_last_error()).find("eeg2text features") != std::string::npos);
  CHECK(e2t_pipeline_run(p, "asr", nullptr, nullptr) == E2T_ERR_PARAMETER);
  CHECK(e2t_pipeline_run(p, "bogus", nullptr, nullptr) == E2T_ERR_PARAMETER);
  REQUIRE(e2t_pipeline_run(p, "synth", nullptr, nullptr) == E2T_OK);
  CHECK(fs::exists(dir / "work" / "corpus" / "manifest.csv"));
  e2t_pipeline_destroy(p);

  e2t_pipeline* q = nullptr;
  CHECK(e2t_pipeline_create_from_json("{\"nope\": 1}", &q) == E2T_ERR_PARAMETER);
  CHECK(q == nullptr);
  CHECK(e2t_pipeline_create((dir / "missing.json").c_str(), &q) == E2T_ERR_IO);
}

TEST_CASE("feature files through the C API") {
  e2t_features* f = nullptr;
  CHECK(e2t_features_read("/nonexistent/x.eegf", &f) == E2T_ERR_IO);
  const auto dir = fresh_dir("capi_feat");
  std::ofstream(dir / "bad.eegf") << "EEGFjunk";
  CHECK(e2t_features_read((dir / "bad.eegf").c_str(), &f) == E2T_ERR_INGEST);
}

TEST_CASE("command line exit codes") {
  const auto dir = fresh_dir("capi_cli");
  CHECK(run_cli("wer --ref \"a b\" --hyp \"a b\"") == 0);
  CHECK(run_cli("wer --ref \"\" --hyp \"a\"") == 2);
  CHECK(run_cli("wer --ref a") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("asr --provenance gan64") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--work-dir \"" + (dir / "w").string() + "\" kpca") == 2);
  std::ofstream(dir / "c.json") << "{\"kpca\": {\"components\": 12}}";
  CHECK(run_cli("--config \"" + (dir / "c.json").string() + "\" config") == 2);
  std::ofstream(dir / "ok.json") << "{\"seed\": 4}";
  CHECK(run_cli("--config \"" + (dir / "ok.json").string() + "\" config") == 0);
  CHECK(run_cli("--work-dir \"" + (dir / "w").string() + "\" synth --out \"" +
                (dir / "corpus").string() + "\"") == 0);
  CHECK(fs::exists(dir / "corpus" / "manifest.csv"));
}
