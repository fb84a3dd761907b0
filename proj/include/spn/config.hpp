#pragma once

// Flat key = value configuration with [section] headers. Keys are stored as
// "section.key"; values are plain strings parsed on demand. All physical
// parameters are in length units (curvatures 1/length^2).

#include <map>
#include <string>
#include <vector>

#include "spn/geometry.hpp"
#include "spn/positivity.hpp"

namespace spn {

class Config {
public:
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;  // comma separated
  std::vector<double> get_num_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

private:
  std::map<std::string, std::string> values_;
};

// Builds the model named by model.kind with its parameters. Throws ConfigError
// for unknown kinds or missing parameters.
MetricModel model_from_config(const Config& cfg);

GridSpec grid_from_config(const Config& cfg);

}  // namespace spn
