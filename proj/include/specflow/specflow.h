// Copyright 2026 The Specflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECFLOW_SPECFLOW_H_
#define SPECFLOW_SPECFLOW_H_

/* C interface to the specflow engine.
 *
 * Handles are opaque. Every call returns an sf_status; on failure
 * sf_last_error_message() holds the message for the calling thread.
 * Functions that produce data hand back a NUL-terminated UTF-8 JSON string
 * (DOT text for sf_graph with format "dot") through `*out`; release it with
 * sf_free(). JSON payloads carry "schema_version". */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SPECFLOW_BUILDING)
#define SF_API __attribute__((visibility("default")))
#else
#define SF_API
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_INVALID_ARGUMENT = 1,
  SF_NOT_A_PROJECT = 2,
  SF_NOT_FOUND = 3,
  SF_MISSING_FRONT_MATTER = 4,
  SF_UNKNOWN_CATEGORY = 5,
  SF_INVALID_REF = 6,
  SF_EMPTY_BODY = 7,
  SF_MISSING_FIELD = 8,
  SF_NO_WORKFLOW_SECTION = 9,
  SF_DUPLICATE_STAGE = 10,
  SF_DANGLING_METADATA = 11,
  SF_UNKNOWN_COMMAND = 12,
  SF_CYCLE_DETECTED = 13,
  SF_UNKNOWN_NODE = 14,
  SF_PATH_OUTSIDE_DOCS = 15,
  SF_IDENTICAL_CONTENT = 16,
  SF_NO_SUCH_VERSION = 17,
  SF_EMPTY_QUERY = 18,
  SF_WRONG_TIER_PATH = 19,
  SF_ALREADY_REGISTERED = 20,
  SF_UNKNOWN_SOURCE = 21,
  SF_RAW_TIER_WRITE = 22,
  SF_NOT_REGISTERED = 23,
  SF_TIER_VIOLATION = 24,
  SF_TOOL_NOT_FOUND = 25,
  SF_PARSE_FAILURE = 26,
  SF_RAW_TIER_VIOLATION = 27,
  SF_PATH_OUTSIDE_PROJECT = 28,
  SF_PROVENANCE_ERROR = 29,
  SF_BACKEND_ERROR = 30,
  SF_TRANSCRIPT_MISMATCH = 31,
  SF_REVIEW_PENDING = 32,
  SF_NO_PENDING_REVIEW = 33,
  SF_UNKNOWN_STAGE = 34,
  SF_EMPTY_FEEDBACK = 35,
  SF_DECISION_UNDERFLOW = 36,
  SF_GATE_BLOCKING = 37,
  SF_NON_EMPTY_TARGET = 38,
  SF_INVALID_CONFIG = 39,
  SF_INVALID_RESPONSE = 40,
  SF_IO_ERROR = 41,
  SF_DUPLICATE_COMMAND = 42,
  SF_UNKNOWN_LAYER = 43,
  SF_INTERNAL = 44,
} sf_status;

typedef struct sf_project sf_project;
typedef struct sf_server sf_server;

SF_API const char* sf_version(void);
SF_API const char* sf_error_name(int code);
SF_API const char* sf_last_error_message(void);
SF_API void sf_free(char* p);

/* Scaffolds a new project in `dir`; `*out` lists created paths. */
SF_API sf_status sf_init(const char* dir, char** out);
SF_API sf_status sf_open(const char* dir, sf_project** out);
SF_API void sf_close(sf_project* p);

SF_API sf_status sf_run(sf_project* p, const char* stage, char** out);
/* decision: "approve", "skip" or "revise"; feedback may be NULL. */
SF_API sf_status sf_review(sf_project* p, const char* decision, const char* feedback, char** out);
SF_API sf_status sf_status_json(sf_project* p, char** out);
/* format: "json" or "dot". */
SF_API sf_status sf_graph(sf_project* p, const char* format, char** out);
SF_API sf_status sf_lineage(sf_project* p, const char* path, char** out);
SF_API sf_status sf_verify(sf_project* p, char** out);
SF_API sf_status sf_search(sf_project* p, const char* query, char** out);
/* version <= 0 selects the head. */
SF_API sf_status sf_doc(sf_project* p, const char* path, int version, char** out);
SF_API sf_status sf_events(sf_project* p, int64_t since, char** out);
SF_API sf_status sf_mark_changed(sf_project* p, const char* node, char** out);
SF_API sf_status sf_sync(sf_project* p, char** out);
/* path NULL ingests every unregistered file under data/raw/. */
SF_API sf_status sf_ingest(sf_project* p, const char* path, char** out);
SF_API sf_status sf_gate(sf_project* p, char** out);
/* Contents, not paths. */
SF_API sf_status sf_replay(sf_project* p, const char* transcript, const char* decisions, char** out);
SF_API sf_status sf_cancel(sf_project* p);

/* port 0 picks a free port; static_dir may be NULL. The server borrows `p`. */
SF_API sf_status sf_serve_start(sf_project* p, const char* host, int port, const char* static_dir,
                                sf_server** out);
SF_API int sf_server_port(const sf_server* s);
/* Blocks until sf_server_stop() is called from another thread. */
SF_API void sf_server_wait(sf_server* s);
SF_API void sf_server_stop(sf_server* s);
SF_API void sf_server_free(sf_server* s);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* SPECFLOW_SPECFLOW_H_ */
