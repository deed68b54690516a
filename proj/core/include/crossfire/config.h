#ifndef CROSSFIRE_CONFIG_H
#define CROSSFIRE_CONFIG_H

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/experiment.h"

namespace crossfire {

// `key = value` lines grouped under `[section]` headers; `#` starts a
// comment. Values keep the line they came from for diagnostics.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for values set by overrides
  };

  // Throws ConfigError "<source>:<line>: ..." on syntax errors.
  static ConfigFile Parse(std::istream& in, std::string source);
  static ConfigFile Load(const std::filesystem::path& path);

  // Applies "section.key=value" or "key=value". A bare key is set in every
  // section that defines it (e.g. seed in scenario and train).
  void ApplyOverride(std::string_view assignment);
  void Set(const std::string& section, const std::string& key, std::string value);

  const std::string& source() const { return source_; }
  const std::map<std::string, std::map<std::string, Entry>>& sections() const {
    return sections_;
  }

 private:
  std::string source_ = "<defaults>";
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Everything a CLI invocation can be configured with.
struct RunConfig {
  sim::ScenarioConfig scenario;
  eval::EvalSettings eval;
  eval::SweepSpec sweep;  // scenario/settings copied in by ResolveConfig
};

// Defaults overlaid with the file. Unknown sections/keys and bad values throw
// ConfigError naming the source, line and field.
RunConfig ResolveConfig(const ConfigFile& file);

// Full resolved configuration in ConfigFile syntax; parsing it back yields
// the same RunConfig.
std::string ToConfigText(const RunConfig& config);

}  // namespace crossfire

#endif  // CROSSFIRE_CONFIG_H
