#pragma once

#include <string>

#include "json.hpp"
#include "solver.hpp"

namespace oulab::io {

// Round-trip float formatting (17 significant digits) so that rerunning a
// command with the same config produces byte-identical files.
std::string fmt17(double v);

void ensure_dir(const std::string& dir);
void write_file(const std::string& path, const std::string& content);

// d=1: columns x,value; d=2: x,y,value; d=3: x,y,z,value.
std::string snapshot_csv(const GridFunction& u);
GridFunction read_snapshot_csv(const std::string& path, GridPtr grid);

std::string energy_csv(const std::vector<EnergyRow>& rows);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace oulab::io
