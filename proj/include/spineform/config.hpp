#pragma once

// Flat key-value run configuration. Every numeric default is materialized at
// parse time so reports can carry the fully resolved configuration.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace spineform {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string mesh;             // torus:N, octagon:R, decagon:R, or a file path
  std::string form = "";        // dx, dy, or empty (use periods)
  std::string form_file = "";   // one edge value per line
  std::vector<double> periods;  // harmonic target when form is empty
  std::string edge_lengths = "";  // optional metric override file

  double r0 = 0.01, r1 = 0.04, r2 = 0.09;
  // budget search box (log sweeps); pinned values override the sweep
  double eps_min = 1e-3, eps_max = 2e-2;
  int eps_steps = 3;
  double delta_min = 1e-3, delta_max = 0.3;
  int delta_steps = 3;
  double c_min = 30.0, c_max = 3000.0;
  int c_steps = 3;
  double eps_pin = -1.0, delta_pin = -1.0, c_pin = -1.0;

  int grid_s = 9, grid_t = 9, grid_polar = 5;
  int cover_budget = -1;
  int lines_per_strip = 5;
  uint64_t seed = 1;
  bool flip_beta2 = false;
  double level = -1.0;        // foliate: level-set value (negative = auto)
  double trace_len = -1.0;    // foliate: leaf budget
  int family_size = 5;
  std::string family_kind = "isoperiodic";  // or "scaling"
  std::string outdir = "";

  std::map<std::string, std::string> raw;  // as parsed, for provenance

  uint64_t hash() const {
    uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : raw)
      for (char c : k + "=" + v) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
      }
    return h;
  }
};

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r\n") != std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r\n");
      size_t b = s.find_last_not_of(" \t\r\n");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.raw[key] = val;

    auto as_double = [&] { return std::stod(val); };
    auto as_int = [&] { return std::stoi(val); };
    if (key == "mesh") cfg.mesh = val;
    else if (key == "form") cfg.form = val;
    else if (key == "form_file") cfg.form_file = val;
    else if (key == "edge_lengths") cfg.edge_lengths = val;
    else if (key == "periods") {
      std::istringstream ps(val);
      std::string tok;
      while (std::getline(ps, tok, ',')) cfg.periods.push_back(std::stod(tok));
    } else if (key == "r0") cfg.r0 = as_double();
    else if (key == "r1") cfg.r1 = as_double();
    else if (key == "r2") cfg.r2 = as_double();
    else if (key == "eps_min") cfg.eps_min = as_double();
    else if (key == "eps_max") cfg.eps_max = as_double();
    else if (key == "eps_steps") cfg.eps_steps = as_int();
    else if (key == "delta_min") cfg.delta_min = as_double();
    else if (key == "delta_max") cfg.delta_max = as_double();
    else if (key == "delta_steps") cfg.delta_steps = as_int();
    else if (key == "c_min") cfg.c_min = as_double();
    else if (key == "c_max") cfg.c_max = as_double();
    else if (key == "c_steps") cfg.c_steps = as_int();
    else if (key == "eps") cfg.eps_pin = as_double();
    else if (key == "delta") cfg.delta_pin = as_double();
    else if (key == "c") cfg.c_pin = as_double();
    else if (key == "grid_s") cfg.grid_s = as_int();
    else if (key == "grid_t") cfg.grid_t = as_int();
    else if (key == "grid_polar") cfg.grid_polar = as_int();
    else if (key == "cover_budget") cfg.cover_budget = as_int();
    else if (key == "lines_per_strip") cfg.lines_per_strip = as_int();
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "flip_beta2") cfg.flip_beta2 = (val == "1" || val == "true");
    else if (key == "level") cfg.level = as_double();
    else if (key == "trace_len") cfg.trace_len = as_double();
    else if (key == "family_size") cfg.family_size = as_int();
    else if (key == "family_kind") cfg.family_kind = val;
    else if (key == "outdir") cfg.outdir = val;
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!(cfg.r0 > 0 && cfg.r0 < cfg.r1 && cfg.r1 < cfg.r2))
    throw ConfigError("config: need 0 < r0 < r1 < r2");
  if (cfg.outdir.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "spineform-out-%08llx",
                  static_cast<unsigned long long>(cfg.hash() & 0xffffffffull));
    cfg.outdir = buf;
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace spineform
