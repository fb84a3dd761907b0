#include "spn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spn/constructions.hpp"

namespace spn {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(Err::ConfigError, "unterminated section header at line " +
                                                      std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(Err::ConfigError, "expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(Err::ConfigError, "empty key at line " + std::to_string(lineno));
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::ConfigError, "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    fail(Err::ConfigError, "not a number: " + key + " = " + it->second);
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_num(key, fallback);
  const int i = static_cast<int>(v);
  if (v != i) fail(Err::ConfigError, "not an integer: " + key);
  return i;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0') fail(Err::ConfigError, "bad integer list: " + key);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> Config::get_num_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') fail(Err::ConfigError, "bad number list: " + key);
    out.push_back(v);
  }
  return out;
}

MetricModel model_from_config(const Config& cfg) {
  const std::string kind = cfg.get("model.kind");
  if (kind.empty()) fail(Err::ConfigError, "missing model.kind");
  const int n = cfg.get_int("model.n", 2);
  const double delta = cfg.get_num("model.delta", 1.0);
  const double lambda = cfg.get_num("model.lambda", 1.0);

  if (kind == "torpedo") return build_torpedo(n, delta, lambda);
  if (kind == "torpedo-cylinder")
    return build_torpedo_cylinder(n, delta, lambda, cfg.get_num("model.length", 1.0));
  if (kind == "toe")
    return build_toe(n, delta, cfg.get_num("model.lambda1", lambda),
                     cfg.get_num("model.lambda2", 0.0), cfg.get_num("model.glue_extent", 1.0));
  if (kind == "bend") return build_bend(n, delta, cfg.get_num("model.Lambda", 10.0), lambda);
  if (kind == "boot")
    return assemble_boot(n, delta, cfg.get_num("model.Lambda", 10.0), cfg.get_num("model.l1", 1.0),
                         cfg.get_num("model.l4", 1.0));
  if (kind == "boot-sphere")
    return boot_cross_sphere(n, cfg.get_int("model.m", 2), delta,
                             cfg.get_num("model.Lambda", 10.0), cfg.get_num("model.l1", 1.0),
                             cfg.get_num("model.l4", 1.0));
  if (kind == "product-spheres") {
    const std::vector<int> dims = cfg.get_int_list("model.dims");
    if (dims.empty()) fail(Err::ConfigError, "product-spheres needs model.dims");
    std::vector<double> radii = cfg.get_num_list("model.radii");
    if (radii.empty()) radii.assign(dims.size(), 1.0);
    if (radii.size() != dims.size()) fail(Err::ConfigError, "radii must match dims");
    return make_product_of_spheres(dims, radii);
  }
  if (kind == "round-sphere") {
    MetricModel m = make_warped_line(n, sine_profile(delta, 0.0, kPi * delta));
    m.id = "round-sphere";
    return m;
  }
  if (kind == "flat-cylinder") {
    const double len = cfg.get_num("model.length", 1.0);
    MetricModel m = make_two_d_warp(n, constant_profile(delta, 0.0, len),
                                    constant_two_var(1.0, 0.0, len, 0.0, len));
    m.id = "flat-cylinder";
    return m;
  }
  fail(Err::ConfigError, "unknown model.kind: " + kind);
}

GridSpec grid_from_config(const Config& cfg) {
  GridSpec grid;
  const std::string spec = cfg.get("certify.grid");
  if (!spec.empty()) {
    const auto x = spec.find('x');
    if (x == std::string::npos) fail(Err::ConfigError, "grid must look like 64x32");
    grid.n1 = std::atoi(spec.substr(0, x).c_str());
    grid.n2 = std::atoi(spec.substr(x + 1).c_str());
    if (grid.n1 < 2 || grid.n2 < 2) fail(Err::ConfigError, "grid sides must be >= 2");
  }
  grid.restarts = cfg.get_int("certify.restarts", grid.restarts);
  return grid;
}

}  // namespace spn
