#include "dk/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dk {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(raw); }

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)hash());
  return buf;
}

std::string RunConfig::run_dir() const {
  const std::string dir = out_dir + "/" + hash_hex();
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

double num(const std::string& v, int line) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
  return x;
}

std::vector<double> num_list(const std::string& v, int line) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(num(tok, line));
  if (out.empty()) fail(line, "expected at least one number");
  return out;
}

Vec3 vec(const std::string& v, int line) {
  const std::vector<double> a = num_list(v, line);
  if (a.size() != 3) fail(line, "expected three numbers");
  return {a[0], a[1], a[2]};
}

bool flag(const std::string& v, int line) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  cfg.raw = text;

  std::istringstream in(text);
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash_pos = line.find_first_of("#;");
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ln, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ln, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) fail(ln, "empty key or value");
    const std::string k = section + "." + key;

    if (k == "profile.amplitude") cfg.profile.amplitude = num(val, ln);
    else if (k == "profile.radius_x") cfg.profile.radius_x = num(val, ln);
    else if (k == "profile.radius_v") cfg.profile.radius_v = num(val, ln);
    else if (k == "profile.center_x") cfg.profile.center_x = vec(val, ln);
    else if (k == "profile.center_v") cfg.profile.center_v = vec(val, ln);
    else if (k == "numerics.n_per_axis") cfg.n_per_axis = (int)num(val, ln);
    else if (k == "numerics.delta") cfg.softening.delta = num(val, ln);
    else if (k == "numerics.dt") cfg.dt = num(val, ln);
    else if (k == "numerics.t_end") cfg.t_end = num(val, ln);
    else if (k == "numerics.preroll_ct") cfg.preroll_ct = num(val, ln);
    else if (k == "ladder.c_list") cfg.c_list = num_list(val, ln);
    else if (k == "probes.box_lo") cfg.box_lo = vec(val, ln);
    else if (k == "probes.box_hi") cfg.box_hi = vec(val, ln);
    else if (k == "probes.box_n") cfg.box_n = (int)num(val, ln);
    else if (k == "probes.n_phase") cfg.n_phase_probes = (int)num(val, ln);
    else if (k == "tolerances.fp_tol") cfg.fp_tol = num(val, ln);
    else if (k == "tolerances.retard_tol") cfg.retard_tol = num(val, ln);
    else if (k == "tolerances.ibp_tol") cfg.ibp_tol = num(val, ln);
    else if (k == "flags.dvm_c4_term") cfg.dvm_c4_term = flag(val, ln);
    else if (k == "flags.compare_dvm") cfg.compare_dvm = flag(val, ln);
    else if (k == "rescale.eps_list") cfg.eps_list = num_list(val, ln);
    else if (k == "output.dir") cfg.out_dir = val;
    else fail(ln, "unknown key '" + k + "'");
  }

  if (cfg.profile.amplitude <= 0.0) throw std::runtime_error("config: amplitude must be > 0");
  if (cfg.softening.delta <= 0.0) throw std::runtime_error("config: delta must be > 0");
  if (cfg.n_per_axis < 1) throw std::runtime_error("config: n_per_axis must be >= 1");
  if (cfg.dt <= 0.0 || cfg.t_end <= 0.0) throw std::runtime_error("config: dt, t_end must be > 0");
  if (cfg.preroll_ct < 0.0) throw std::runtime_error("config: preroll_ct must be >= 0");
  if (!std::is_sorted(cfg.c_list.begin(), cfg.c_list.end()))
    throw std::runtime_error("config: c_list must be ascending");
  for (double e : cfg.eps_list)
    if (e <= 0.0 || e > 1.0) throw std::runtime_error("config: eps values must lie in (0, 1]");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace dk
