#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace oulab {

namespace {

const std::set<std::string>& schema() {
  static const std::set<std::string> keys = {
      "coeff.f.kind",   "coeff.f.params", "coeff.g.kind",  "coeff.g.params",
      "coeff.T",        "weight.c",       "weight.mode",   "grid.d",
      "grid.L",         "grid.n",         "noise.modes",   "noise.q0",
      "noise.decay",    "noise.b.kind",   "noise.b.params","noise.h.kind",
      "noise.h.params", "run.seed",       "run.n_paths",   "solver.dt",
      "solver.scheme",  "solver.T",       "solver.checkpoint_every",
      "init.kind",      "init.mean",      "init.variance", "particles.n",
      "particles.dt",   "verify.family_count", "verify.levels", "verify.t",
      "verify.adversarial_iters",
  };
  return keys;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::insert_line(const std::string& raw, int line_no) {
  std::string line = raw;
  size_t hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return;
  size_t eq = line.find('=');
  if (eq == std::string::npos)
    throw ConfigError("config error at line " + std::to_string(line_no) +
                      ": expected 'key = value'");
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (!schema().count(key))
    throw ConfigError("config error at line " + std::to_string(line_no) +
                      ": unknown key '" + key + "'");
  if (values_.count(key))
    throw ConfigError("config error at line " + std::to_string(line_no) +
                      ": duplicate key '" + key + "'");
  if (value.empty())
    throw ConfigError("config error at line " + std::to_string(line_no) +
                      ": empty value for key '" + key + "'");
  values_[key] = value;
  lines_[key] = line_no;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) cfg.insert_line(line, ++line_no);
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!schema().count(key)) throw ConfigError("unknown key '" + key + "'");
  std::string v = trim(value);
  if (v.empty()) throw ConfigError("empty value for key '" + key + "'");
  values_[key] = v;
  lines_[key] = 0;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  std::string v = get_string(key);
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long RunConfig::get_int(const std::string& key) const {
  std::string v = get_string(key);
  try {
    size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t RunConfig::get_uint64(const std::string& key) const {
  std::string v = get_string(key);
  try {
    size_t pos = 0;
    unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(d);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + v +
                      "' as an unsigned integer");
  }
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::string v = get_string(key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

}  // namespace oulab
