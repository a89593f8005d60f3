#include "oulab.h"

#include <cstdlib>
#include <cstring>
#include <new>

#include "commands.hpp"

using oulab::CommandResult;
using oulab::RunConfig;

struct oulab_config {
  RunConfig cfg;
};

namespace {

void fill_err(char* errbuf, size_t errcap, const char* msg) {
  if (!errbuf || errcap == 0) return;
  std::strncpy(errbuf, msg, errcap - 1);
  errbuf[errcap - 1] = '\0';
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int finish(const CommandResult& result, char** json_out) {
  if (json_out) *json_out = dup_string(result.summary.dump(2));
  return result.status;
}

template <typename Fn>
int run_command(Fn&& fn, char** json_out) {
  try {
    return finish(fn(), json_out);
  } catch (const std::exception& e) {
    if (json_out)
      *json_out = dup_string(nlohmann::json{{"error", e.what()}}.dump(2));
    return OULAB_CONFIG_ERROR;
  }
}

}  // namespace

extern "C" {

oulab_config* oulab_config_load(const char* path, char* errbuf, size_t errcap) {
  if (!path) {
    fill_err(errbuf, errcap, "null path");
    return nullptr;
  }
  try {
    return new oulab_config{RunConfig::from_file(path)};
  } catch (const std::exception& e) {
    fill_err(errbuf, errcap, e.what());
    return nullptr;
  }
}

oulab_config* oulab_config_parse(const char* text, char* errbuf, size_t errcap) {
  if (!text) {
    fill_err(errbuf, errcap, "null config text");
    return nullptr;
  }
  try {
    return new oulab_config{RunConfig::from_string(text)};
  } catch (const std::exception& e) {
    fill_err(errbuf, errcap, e.what());
    return nullptr;
  }
}

int oulab_config_set(oulab_config* cfg, const char* key, const char* value,
                     char* errbuf, size_t errcap) {
  if (!cfg || !key || !value) {
    fill_err(errbuf, errcap, "null argument");
    return OULAB_CONFIG_ERROR;
  }
  try {
    cfg->cfg.set(key, value);
    return OULAB_OK;
  } catch (const std::exception& e) {
    fill_err(errbuf, errcap, e.what());
    return OULAB_CONFIG_ERROR;
  }
}

void oulab_config_free(oulab_config* cfg) { delete cfg; }

int oulab_cmd_check(const oulab_config* cfg, const char* out_dir, char** json_out) {
  if (!cfg || !out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_check(cfg->cfg, out_dir); }, json_out);
}

int oulab_cmd_verify(const oulab_config* cfg, const char* out_dir, char** json_out) {
  if (!cfg || !out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_verify(cfg->cfg, out_dir); }, json_out);
}

int oulab_cmd_solve(const oulab_config* cfg, const char* out_dir, char** json_out) {
  if (!cfg || !out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_solve(cfg->cfg, out_dir); }, json_out);
}

int oulab_cmd_ensemble(const oulab_config* cfg, const char* out_dir, char** json_out) {
  if (!cfg || !out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_ensemble(cfg->cfg, out_dir); }, json_out);
}

int oulab_cmd_oracle_compare(const oulab_config* cfg, const char* out_dir,
                             char** json_out) {
  if (!cfg || !out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_oracle_compare(cfg->cfg, out_dir); },
                     json_out);
}

int oulab_cmd_report(const char* out_dir, char** json_out) {
  if (!out_dir) return OULAB_CONFIG_ERROR;
  return run_command([&] { return oulab::cmd_report(out_dir); }, json_out);
}

void oulab_string_free(char* s) { std::free(s); }

const char* oulab_version(void) { return "0.1.0"; }

}  // extern "C"
