// Batch front-end for the oulab shared library. Links the C API only.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "oulab.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string seed;
  std::string grid_n;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  if (needs_config)
    cmd->add_option("--config", opts.config_path, "run config file")->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override run.seed");
  cmd->add_option("--grid-n", opts.grid_n, "override grid.n");
  cmd->add_flag("--quiet", opts.quiet, "suppress JSON summary on stdout");
}

int run(const CommonOpts& opts, int (*fn)(const oulab_config*, const char*, char**)) {
  char errbuf[512];
  oulab_config* cfg = oulab_config_load(opts.config_path.c_str(), errbuf, sizeof errbuf);
  if (!cfg) {
    std::fprintf(stderr, "error: %s\n", errbuf);
    return OULAB_CONFIG_ERROR;
  }
  if (!opts.seed.empty() &&
      oulab_config_set(cfg, "run.seed", opts.seed.c_str(), errbuf, sizeof errbuf) != 0) {
    std::fprintf(stderr, "error: %s\n", errbuf);
    oulab_config_free(cfg);
    return OULAB_CONFIG_ERROR;
  }
  if (!opts.grid_n.empty() &&
      oulab_config_set(cfg, "grid.n", opts.grid_n.c_str(), errbuf, sizeof errbuf) != 0) {
    std::fprintf(stderr, "error: %s\n", errbuf);
    oulab_config_free(cfg);
    return OULAB_CONFIG_ERROR;
  }
  char* json = nullptr;
  int status = fn(cfg, opts.out_dir.c_str(), &json);
  if (json) {
    if (!opts.quiet) std::printf("%s\n", json);
    oulab_string_free(json);
  }
  oulab_config_free(cfg);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oulab: weighted-space OU SPDE laboratory"};
  app.require_subcommand(1);

  CommonOpts check_o, verify_o, solve_o, ensemble_o, oracle_o, report_o;
  auto* c_check = app.add_subcommand("check", "admissibility condition and constants");
  add_common(c_check, check_o, true);
  auto* c_verify = app.add_subcommand("verify", "lemma and inequality battery");
  add_common(c_verify, verify_o, true);
  auto* c_solve = app.add_subcommand("solve", "integrate one trajectory");
  add_common(c_solve, solve_o, true);
  auto* c_ensemble = app.add_subcommand("ensemble", "Monte-Carlo path ensemble");
  add_common(c_ensemble, ensemble_o, true);
  auto* c_oracle =
      app.add_subcommand("oracle-compare", "solver vs analytic oracle vs particles");
  add_common(c_oracle, oracle_o, true);
  auto* c_report = app.add_subcommand("report", "aggregate JSON reports");
  add_common(c_report, report_o, false);

  CLI11_PARSE(app, argc, argv);

  if (c_check->parsed()) return run(check_o, oulab_cmd_check);
  if (c_verify->parsed()) return run(verify_o, oulab_cmd_verify);
  if (c_solve->parsed()) return run(solve_o, oulab_cmd_solve);
  if (c_ensemble->parsed()) return run(ensemble_o, oulab_cmd_ensemble);
  if (c_oracle->parsed()) return run(oracle_o, oulab_cmd_oracle_compare);
  if (c_report->parsed()) {
    char* json = nullptr;
    int status = oulab_cmd_report(report_o.out_dir.c_str(), &json);
    if (json) {
      if (!report_o.quiet) std::printf("%s\n", json);
      oulab_string_free(json);
    }
    return status;
  }
  return 0;
}
