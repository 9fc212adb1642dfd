// Copyright 2026 The shaped-ucbvi Authors.
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

/* C interface to the shaped-UCBVI library.
 *
 * Every call returns a sucbvi_status. On failure sucbvi_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Objects are opaque and released with their *_free function; strings
 * returned through char** are released with sucbvi_string_free.
 *
 * Seeds follow the command-line tool: the shaping for seed k and the run
 * for seed k use the same streams, so results here match its files. */

#ifndef SHAPED_UCBVI_H_
#define SHAPED_UCBVI_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SUCBVI_API __declspec(dllexport)
#else
#define SUCBVI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sucbvi_status {
  SUCBVI_OK = 0,
  SUCBVI_INVALID_ARGUMENT = 1,
  SUCBVI_INVALID_MDP = 2,
  SUCBVI_UNREACHABLE_GOAL = 3,
  SUCBVI_INVALID_BETA = 4,
  SUCBVI_SHAPE_MISMATCH = 5,
  SUCBVI_MISSING_SHAPING = 6,
  SUCBVI_LAYER_MISMATCH = 7,
  SUCBVI_OUT_OF_RANGE_RETURN = 8,
  SUCBVI_CONFIG = 9,
  SUCBVI_IO = 10,
  SUCBVI_INTERNAL = 99
} sucbvi_status;

typedef struct sucbvi_mdp sucbvi_mdp;
typedef struct sucbvi_shaping sucbvi_shaping;
typedef struct sucbvi_trace sucbvi_trace;

typedef struct sucbvi_episode {
  uint64_t episode;
  double instant_regret;
  double cumulative_regret;
  double episodic_return;
  int optimism_holds;
} sucbvi_episode;

SUCBVI_API const char* sucbvi_last_error(void);
SUCBVI_API const char* sucbvi_status_name(sucbvi_status status);
SUCBVI_API void sucbvi_string_free(char* s);

/* MDPs: built-in presets (grid8, corridor10, dcorridor10x20, chain11) or
 * the JSON document form. */
SUCBVI_API sucbvi_status sucbvi_mdp_preset(const char* name, sucbvi_mdp** out);
SUCBVI_API sucbvi_status sucbvi_mdp_from_json(const char* text, sucbvi_mdp** out);
SUCBVI_API sucbvi_status sucbvi_mdp_to_json(const sucbvi_mdp* mdp, char** out);
SUCBVI_API sucbvi_status sucbvi_mdp_shape(const sucbvi_mdp* mdp, int* horizon, int* actions,
                                          size_t* states);
SUCBVI_API sucbvi_status sucbvi_mdp_optimal_value(const sucbvi_mdp* mdp, double* out);
SUCBVI_API void sucbvi_mdp_free(sucbvi_mdp* mdp);

/* Shaping: a random sandwich for beta >= 1, optionally corrupted with
 * Gaussian noise of standard deviation sigma (0 for none). */
SUCBVI_API sucbvi_status sucbvi_shaping_sandwiched(const sucbvi_mdp* mdp, double beta,
                                                   double sigma, uint64_t seed,
                                                   sucbvi_shaping** out);
SUCBVI_API sucbvi_status sucbvi_shaping_from_json(const sucbvi_mdp* mdp, const char* text,
                                                  sucbvi_shaping** out);
SUCBVI_API sucbvi_status sucbvi_shaping_to_json(const sucbvi_shaping* shaping,
                                                const sucbvi_mdp* mdp, char** out);
/* *holds is 1 when V~ <= V* <= beta V~ everywhere. */
SUCBVI_API sucbvi_status sucbvi_shaping_verify(const sucbvi_shaping* shaping,
                                               const sucbvi_mdp* mdp, int* holds);
SUCBVI_API void sucbvi_shaping_free(sucbvi_shaping* shaping);

/* One learning run. variant: UCBVI, Shaped, Shaped-BS, Shaped-P, Additive.
 * bonus_kind: theoretical, practical, or a full kind name. shaping may be
 * NULL for UCBVI. */
SUCBVI_API sucbvi_status sucbvi_run(const sucbvi_mdp* mdp, const char* variant,
                                    const char* bonus_kind, double c, double delta,
                                    double beta, const sucbvi_shaping* shaping,
                                    uint64_t episodes, uint64_t seed, sucbvi_trace** out);
SUCBVI_API sucbvi_status sucbvi_trace_length(const sucbvi_trace* trace, uint64_t* out);
SUCBVI_API sucbvi_status sucbvi_trace_episode(const sucbvi_trace* trace, uint64_t index,
                                              sucbvi_episode* out);
SUCBVI_API sucbvi_status sucbvi_trace_final_value(const sucbvi_trace* trace, double* out);
SUCBVI_API sucbvi_status sucbvi_trace_to_csv(const sucbvi_trace* trace, char** out);
SUCBVI_API void sucbvi_trace_free(sucbvi_trace* trace);

/* Pruning sets for one delta, as a JSON report. */
SUCBVI_API sucbvi_status sucbvi_prune(const sucbvi_mdp* mdp, const sucbvi_shaping* shaping,
                                      double beta, double delta, int with_members,
                                      char** out);

/* Runs a harness command (run, sweep, prune, modelsel, decay). overrides
 * may be NULL; otherwise it is a JSON object patched onto config_json. The
 * summary document is returned through summary (may be NULL). */
SUCBVI_API sucbvi_status sucbvi_command(const char* command, const char* config_json,
                                        const char* overrides_json, char** summary);

#ifdef __cplusplus
}
#endif

#endif  /* SHAPED_UCBVI_H_ */
