/* bspinn — binary-structured physics-informed neural network laboratory.
 *
 * C interface to the core library: opaque handles, integer status codes,
 * thread-local error messages. All functions return BSPINN_OK (0) on
 * success; on failure they return a negative code and bspinn_last_error()
 * describes the problem for the calling thread.
 */
#ifndef BSPINN_BSPINN_H
#define BSPINN_BSPINN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bspinn_rc {
  BSPINN_OK = 0,
  BSPINN_ERR_INVALID_ARGUMENT = -1,
  BSPINN_ERR_PARSE = -2,
  BSPINN_ERR_IO = -3,
  BSPINN_ERR_NUMERIC = -4,
  BSPINN_ERR_INTERNAL = -5
} bspinn_rc;

const char* bspinn_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* bspinn_last_error(void);

/* ------------------------------------------------------------------ *
 * Architectures                                                       *
 * ------------------------------------------------------------------ */

/* Exact trainable parameter count for an architecture string
 * ("fnn:<layers>*<width>" or "bsnn:<B>-<b>"); residual_blocks = 0 for a
 * plain network. */
bspinn_rc bspinn_param_count(const char* arch, int input_dim, int output_dim,
                             int residual_blocks, int64_t* count_out);

/* ------------------------------------------------------------------ *
 * Networks                                                            *
 * ------------------------------------------------------------------ */

typedef struct bspinn_network bspinn_network;

bspinn_rc bspinn_network_create(const char* arch, int input_dim,
                                int output_dim, const char* activation,
                                int residual_blocks, bspinn_network** out);
void bspinn_network_free(bspinn_network* net);

/* Draws fresh parameters (uniform +/- 1/sqrt(fan_in); deterministic). */
bspinn_rc bspinn_network_init(bspinn_network* net, uint64_t seed);

bspinn_rc bspinn_network_param_count(const bspinn_network* net,
                                     int64_t* count_out);
bspinn_rc bspinn_network_get_params(const bspinn_network* net, double* buffer,
                                    int64_t length);
bspinn_rc bspinn_network_set_params(bspinn_network* net, const double* buffer,
                                    int64_t length);

/* Forward pass over n_points rows of input_dim coordinates; writes
 * n_points * output_dim values. */
bspinn_rc bspinn_network_forward(bspinn_network* net, const double* points,
                                 int64_t n_points, int input_dim,
                                 double* values_out);

/* Checkpoint round-trip (text header + base64 parameters; bit exact). */
bspinn_rc bspinn_network_save(const bspinn_network* net, const char* path,
                              uint64_t seed, int64_t epoch);
bspinn_rc bspinn_network_load(const char* path, bspinn_network** out);

/* ------------------------------------------------------------------ *
 * Experiments                                                         *
 * ------------------------------------------------------------------ */

typedef struct bspinn_experiment bspinn_experiment;

bspinn_rc bspinn_experiment_create(bspinn_experiment** out);
void bspinn_experiment_free(bspinn_experiment* exp);

/* Merges a config file (key = value lines) into the experiment. */
bspinn_rc bspinn_experiment_load_file(bspinn_experiment* exp,
                                      const char* path);
/* Sets one config key ("problem", "arch", "epochs", ...). */
bspinn_rc bspinn_experiment_set(bspinn_experiment* exp, const char* key,
                                const char* value);

typedef void (*bspinn_progress_fn)(void* user, uint64_t seed, int64_t epoch,
                                   double loss);
bspinn_rc bspinn_experiment_on_progress(bspinn_experiment* exp,
                                        bspinn_progress_fn fn, void* user);

/* Trains all configured architectures/seeds and writes every artifact
 * under the output directory. */
bspinn_rc bspinn_experiment_run(bspinn_experiment* exp);

/* Relative error of a checkpoint under the problem's evaluation
 * convention. fields_path/channels_path may be NULL (no export). */
bspinn_rc bspinn_experiment_evaluate(bspinn_experiment* exp,
                                     const char* checkpoint_path,
                                     const char* fields_path,
                                     const char* channels_path,
                                     double* error_out);

/* Effective (defaults-merged) config text into the caller's buffer;
 * needed_out receives the full length including the terminator. */
bspinn_rc bspinn_experiment_effective(bspinn_experiment* exp, char* buffer,
                                      size_t length, size_t* needed_out);

/* ------------------------------------------------------------------ *
 * Reports                                                             *
 * ------------------------------------------------------------------ */

/* Aggregates every summary.csv under root into a text table. */
bspinn_rc bspinn_report(const char* root, char* buffer, size_t length,
                        size_t* needed_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BSPINN_BSPINN_H */
