#pragma once

#include <string>

#include "config.hpp"
#include "json.hpp"
#include "noise.hpp"
#include "oracle.hpp"
#include "solver.hpp"
#include "verify.hpp"

namespace oulab {

struct CommandResult {
  int status = 0;
  nlohmann::json summary;
};

// Builders from a validated RunConfig; throw ConfigError on schema violations.
Schedule schedule_from_config(const RunConfig& cfg, const std::string& prefix,
                              double horizon);
CoefficientSchedule coefficients_from_config(const RunConfig& cfg);
WeightParam weight_from_config(const RunConfig& cfg);
GridPtr grid_from_config(const RunConfig& cfg);
GaussianState init_from_config(const RunConfig& cfg, int dim);
SolverConfig solver_from_config(const RunConfig& cfg, bool needs_seed);
BatterySettings battery_from_config(const RunConfig& cfg);

CommandResult cmd_check(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_verify(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_solve(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_ensemble(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_oracle_compare(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_report(const std::string& out_dir);

}  // namespace oulab
