#include "io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oulab::io {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "'");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string snapshot_csv(const GridFunction& u) {
  const auto& g = *u.grid();
  std::ostringstream out;
  static const char* headers[] = {"x,value\n", "x,y,value\n", "x,y,z,value\n"};
  out << headers[g.dim() - 1];
  double x[3];
  for (size_t i = 0; i < u.size(); ++i) {
    g.coords(i, x);
    for (int a = 0; a < g.dim(); ++a) out << fmt17(x[a]) << ',';
    out << fmt17(u[i]) << '\n';
  }
  return out.str();
}

GridFunction read_snapshot_csv(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  GridFunction u = GridFunction::zeros(grid);
  for (size_t i = 0; i < u.size(); ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("snapshot '" + path + "' truncated");
    size_t pos = line.rfind(',');
    u[i] = std::stod(line.substr(pos + 1));
  }
  return u;
}

std::string energy_csv(const std::vector<EnergyRow>& rows) {
  std::ostringstream out;
  out << "t,pairing,mass_term,grad_term,slack,h_norm_sq,bound\n";
  for (const auto& r : rows)
    out << fmt17(r.t) << ',' << fmt17(r.pairing) << ',' << fmt17(r.mass_term) << ','
        << fmt17(r.grad_term) << ',' << fmt17(r.slack) << ',' << fmt17(r.h_norm_sq)
        << ',' << fmt17(r.bound) << '\n';
  return out.str();
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace oulab::io
