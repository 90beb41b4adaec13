#pragma once

#include <map>
#include <string>

#include "kdual/montecarlo.hpp"

namespace kdual {

// Line-oriented sectioned config: `[section]` headers and `key = value`
// pairs; values are numbers, quoted expression strings, bare tags, or
// comma-separated number lists. `#` starts a comment. Errors carry the
// source name and line number.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& name = "<config>");

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get_str(const std::string& section, const std::string& key) const;
  std::string get_str_or(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key) const;
  double get_num_or(const std::string& section, const std::string& key,
                    double fallback) const;
  Vector get_list(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::string name_;
};

// Model/grid/mc sections materialized into library types.
GeneratorSpec model_from_config(const Config& c);
Grid grid_from_config(const Config& c, std::size_t n_override = 0);
PathConfig mc_from_config(const Config& c);

// Full command-line entry point: subcommands dualize / verify / monotone /
// selfdual / propagator, global flags --config, --out, --grid-n, --seed and
// --tol-<name> overrides. Returns the process exit code: 0 success,
// 1 input error, 2 verified-condition failure.
int run_cli(int argc, const char* const* argv);

}  // namespace kdual
