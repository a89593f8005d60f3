/* oulab — weighted-space Ornstein-Uhlenbeck SPDE laboratory.
 *
 * C API for the shared library. All functionality is reachable through an
 * opaque config handle plus one entry point per batch command; commands
 * return the process exit status they want the caller to propagate:
 *
 *   0  pass
 *   1  a check failed
 *   2  configuration error
 *   3  runtime divergence
 */
#ifndef OULAB_H
#define OULAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  OULAB_OK = 0,
  OULAB_CHECK_FAILED = 1,
  OULAB_CONFIG_ERROR = 2,
  OULAB_DIVERGED = 3
};

typedef struct oulab_config oulab_config;

/* Parse a run config from a file or from an in-memory string. Returns NULL
 * on error and, when errbuf is non-NULL, writes a diagnostic (with line and
 * key information) into it. */
oulab_config* oulab_config_load(const char* path, char* errbuf, size_t errcap);
oulab_config* oulab_config_parse(const char* text, char* errbuf, size_t errcap);

/* Override a single key (same syntax as a config line value). Returns 0 on
 * success, nonzero on schema violation. */
int oulab_config_set(oulab_config* cfg, const char* key, const char* value,
                     char* errbuf, size_t errcap);

void oulab_config_free(oulab_config* cfg);

/* Batch commands. Output files are written under out_dir (created if
 * missing). When json_out is non-NULL it receives a malloc'd JSON summary;
 * release it with oulab_string_free. The return value is the exit status. */
int oulab_cmd_check(const oulab_config* cfg, const char* out_dir, char** json_out);
int oulab_cmd_verify(const oulab_config* cfg, const char* out_dir, char** json_out);
int oulab_cmd_solve(const oulab_config* cfg, const char* out_dir, char** json_out);
int oulab_cmd_ensemble(const oulab_config* cfg, const char* out_dir, char** json_out);
int oulab_cmd_oracle_compare(const oulab_config* cfg, const char* out_dir, char** json_out);

/* Aggregate every *.json report found in out_dir into summary.json. */
int oulab_cmd_report(const char* out_dir, char** json_out);

void oulab_string_free(char* s);

const char* oulab_version(void);

#ifdef __cplusplus
}
#endif

#endif /* OULAB_H */
