/*
 * C interface to the vshape runtime.
 *
 * All functions return a vshape_status; on failure a description is available
 * from vshape_last_error() on the calling thread. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * vshape_string_free().
 *
 * A runtime handle is not thread-safe. Distinct runtimes share nothing and
 * may be used from different threads.
 */

#ifndef VSHAPE_VSHAPE_H
#define VSHAPE_VSHAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(VSHAPE_BUILDING_LIBRARY)
#define VSHAPE_API __attribute__((visibility("default")))
#else
#define VSHAPE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum vshape_status {
  VSHAPE_OK = 0,
  VSHAPE_ERR_RUNTIME = 1,
  VSHAPE_ERR_PARSE = 2,
  VSHAPE_ERR_USAGE = 3
} vshape_status;

typedef enum vshape_mode {
  VSHAPE_MODE_NONE = 0,
  VSHAPE_MODE_MANUAL = 1,
  VSHAPE_MODE_AUTO = 2
} vshape_mode;

typedef enum vshape_format {
  VSHAPE_FORMAT_TEXT = 0,
  VSHAPE_FORMAT_CSV = 1,
  VSHAPE_FORMAT_JSON = 2
} vshape_format;

#define VSHAPE_THRESHOLD_INFINITE UINT64_MAX

typedef struct vshape_config {
  uint64_t max_size;
  uint64_t max_depth;
  uint64_t threshold;
  vshape_mode mode;
} vshape_config;

typedef struct vshape_counters {
  uint64_t objects_allocated;
  uint64_t slots_allocated;
  uint64_t reifications;
  uint64_t shapes_created;
  uint64_t rules_created;
  uint64_t field_reads;
  uint64_t inline_restarts;
} vshape_counters;

typedef struct vshape_eval_stats {
  uint64_t steps;
  uint64_t peak_continuation_depth;
  uint64_t retained_objects;
  uint64_t retained_slots;
  uint64_t retained_cells;
  uint64_t checksum;
} vshape_eval_stats;

typedef struct vshape_runtime vshape_runtime;
typedef struct vshape_program vshape_program;

VSHAPE_API const char* vshape_version(void);
VSHAPE_API const char* vshape_last_error(void);
VSHAPE_API void vshape_string_free(char* s);

/* max size 7, max depth 7, threshold 17, mode auto */
VSHAPE_API void vshape_config_default(vshape_config* out);
VSHAPE_API const char* vshape_mode_name(vshape_mode mode);
VSHAPE_API vshape_status vshape_mode_parse(const char* name, vshape_mode* out);

VSHAPE_API vshape_status vshape_runtime_create(const vshape_config* config, vshape_runtime** out);
VSHAPE_API void vshape_runtime_destroy(vshape_runtime* rt);
VSHAPE_API vshape_status vshape_runtime_counters(const vshape_runtime* rt, vshape_counters* out);
VSHAPE_API vshape_status vshape_dump_stats(const vshape_runtime* rt, char** out_text);

/* Seeds the rules inlining class_name/arity into itself through `field`.
 * The class is registered if needed. */
VSHAPE_API vshape_status vshape_seed_linear_rules(vshape_runtime* rt, const char* class_name,
                                                  uint64_t arity, uint64_t field,
                                                  uint64_t levels, uint64_t* out_admitted);

/* Parses and validates a program. */
VSHAPE_API vshape_status vshape_program_parse(const char* source, size_t length,
                                              vshape_program** out);
VSHAPE_API vshape_status vshape_program_load_file(const char* path, vshape_program** out);
VSHAPE_API void vshape_program_destroy(vshape_program* program);
/* Canonical source form of a program. */
VSHAPE_API vshape_status vshape_program_source(const vshape_program* program, char** out_text);

/* Evaluates `program` on `rt`. `step_limit` 0 means unlimited. On success
 * `out_result` receives the printed result; `out_stats` may be NULL. */
VSHAPE_API vshape_status vshape_eval(vshape_runtime* rt, const vshape_program* program,
                                     uint64_t step_limit, char** out_result,
                                     vshape_eval_stats* out_stats);

VSHAPE_API size_t vshape_benchmark_count(void);
VSHAPE_API const char* vshape_benchmark_name(size_t index);
/* 1 for the listed benchmarks and the extra constructor-free `arith`. */
VSHAPE_API int vshape_is_benchmark(const char* name);
VSHAPE_API uint64_t vshape_benchmark_default_size(const char* name);

/* Runs each named benchmark `repeats` times on fresh runtimes and renders all
 * reports in one document. `size` 0 selects each benchmark's default. */
VSHAPE_API vshape_status vshape_bench_run(const char* const* names, size_t count, uint64_t size,
                                          const vshape_config* config, uint32_t repeats,
                                          uint64_t step_limit, vshape_format format,
                                          char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* VSHAPE_VSHAPE_H */
