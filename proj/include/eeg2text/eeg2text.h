/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright 2026 The eeg2text Authors */

#ifndef EEG2TEXT_EEG2TEXT_H_
#define EEG2TEXT_EEG2TEXT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(E2T_BUILDING_LIBRARY)
#define E2T_API __attribute__((visibility("default")))
#else
#define E2T_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum e2t_status {
  E2T_OK = 0,
  E2T_ERR_PARAMETER = 1,
  E2T_ERR_NUMERIC = 2,
  E2T_ERR_CONVERGENCE = 3,
  E2T_ERR_RANK = 4,
  E2T_ERR_INFEASIBLE_LABEL = 5,
  E2T_ERR_DATASET = 6,
  E2T_ERR_DEGENERATE_OUTPUT = 7,
  E2T_ERR_INGEST = 8,
  E2T_ERR_IO = 9,
  E2T_ERR_PREREQUISITE = 10,
  E2T_ERR_INTERNAL = 99
} e2t_status;

typedef enum e2t_log_level {
  E2T_LOG_QUIET = 0,
  E2T_LOG_WARNING = 1,
  E2T_LOG_INFO = 2
} e2t_log_level;

E2T_API const char* e2t_version(void);
E2T_API const char* e2t_status_name(e2t_status status);
/* Message of the last failed call on this thread; "" if none. */
E2T_API const char* e2t_last_error(void);
E2T_API void e2t_set_log_level(e2t_log_level level);
/* Releases strings returned through char** out-parameters. */
E2T_API void e2t_free(void* p);

/* ---- experiment pipeline ---- */

typedef struct e2t_pipeline e2t_pipeline;

/* config_path may be NULL for the built-in defaults. */
E2T_API e2t_status e2t_pipeline_create(const char* config_path, e2t_pipeline** out);
E2T_API e2t_status e2t_pipeline_create_from_json(const char* json, e2t_pipeline** out);
E2T_API void e2t_pipeline_destroy(e2t_pipeline* p);

E2T_API e2t_status e2t_pipeline_set_seed(e2t_pipeline* p, uint64_t seed);
E2T_API e2t_status e2t_pipeline_set_work_dir(e2t_pipeline* p, const char* work_dir);
/* Effective configuration as JSON; free with e2t_free. */
E2T_API e2t_status e2t_pipeline_config_json(const e2t_pipeline* p, char** out);

/* command: synth, preprocess, features, kpca, gan, asr, eval, report, all.
   provenance (raw155, kpca30, gan32) is required by asr and eval and ignored
   otherwise. out_dir only applies to synth and may be NULL. */
E2T_API e2t_status e2t_pipeline_run(e2t_pipeline* p, const char* command,
                                    const char* provenance, const char* out_dir);

/* ---- standalone utilities ---- */

E2T_API e2t_status e2t_wer(const char* reference, const char* hypothesis,
                           double* percent, size_t* substitutions,
                           size_t* insertions, size_t* deletions);

/* logits: T x C row-major, class 0 is the blank. grad (T x C) may be NULL. */
E2T_API e2t_status e2t_ctc_loss(const double* logits, size_t frames,
                                size_t classes, const int* labels,
                                size_t label_len, double* loss, double* grad);

/* Best-path decode over the built-in character vocabulary (28 classes). */
E2T_API e2t_status e2t_greedy_decode(const double* logits, size_t frames,
                                     size_t classes, char** out);

typedef struct e2t_features e2t_features;

E2T_API e2t_status e2t_features_read(const char* path, e2t_features** out);
E2T_API void e2t_features_destroy(e2t_features* f);
E2T_API size_t e2t_features_frames(const e2t_features* f);
E2T_API size_t e2t_features_dim(const e2t_features* f);
/* Row-major frames x dim. */
E2T_API const double* e2t_features_data(const e2t_features* f);
E2T_API const char* e2t_features_provenance(const e2t_features* f);

#ifdef __cplusplus
}
#endif

#endif /* EEG2TEXT_EEG2TEXT_H_ */
