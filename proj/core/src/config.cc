#include "crossfire/config.h"

#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "crossfire/dataset_io.h"
#include "crossfire/error.h"

namespace crossfire {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out;
  for (std::string_view part : SplitCsvLine(value)) {
    std::string item = Trim(part);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<double, double> ParsePair(std::string_view value, std::string_view ctx) {
  const auto parts = SplitList(value);
  if (parts.size() != 2) {
    throw ParseError(std::string(ctx) + ": expected two comma-separated numbers");
  }
  return {ParseDouble(parts[0], ctx), ParseDouble(parts[1], ctx)};
}

std::uint64_t ParseSeed(std::string_view v, std::string_view ctx) {
  const long long s = ParseInt(v, ctx);
  if (s < 0) throw ParseError(std::string(ctx) + ": seed must be >= 0");
  return static_cast<std::uint64_t>(s);
}

std::string Pair(double a, double b) { return FormatDouble(a) + "," + FormatDouble(b); }

template <typename T>
std::string Join(const std::vector<T>& items, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + f(items[i]);
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CF_INT(SECTION, KEY, EXPR)                                                      \
  Field {                                                                               \
    SECTION, KEY,                                                                       \
        [](RunConfig& c, std::string_view v, std::string_view ctx) {                    \
          EXPR = static_cast<std::remove_reference_t<decltype(EXPR)>>(ParseInt(v, ctx)); \
        },                                                                              \
        [](const RunConfig& c) { return std::to_string(EXPR); }                         \
  }
#define CF_DOUBLE(SECTION, KEY, EXPR)                                                  \
  Field {                                                                              \
    SECTION, KEY,                                                                      \
        [](RunConfig& c, std::string_view v, std::string_view ctx) {                   \
          EXPR = ParseDouble(v, ctx);                                                  \
        },                                                                             \
        [](const RunConfig& c) { return FormatDouble(EXPR); }                          \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      CF_INT("scenario", "n_vehicles", c.scenario.n_vehicles),
      CF_INT("scenario", "n_bots", c.scenario.n_bots),
      Field{"scenario", "speed_range",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              std::tie(c.scenario.speed_min, c.scenario.speed_max) = ParsePair(v, ctx);
            },
            [](const RunConfig& c) { return Pair(c.scenario.speed_min, c.scenario.speed_max); }},
      CF_DOUBLE("scenario", "duration", c.scenario.duration),
      CF_DOUBLE("scenario", "sample_interval", c.scenario.sample_interval),
      Field{"scenario", "attack_window",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              if (Trim(v) == "none") {
                c.scenario.attack_window.reset();
                return;
              }
              const auto [start, end] = ParsePair(v, ctx);
              c.scenario.attack_window = sim::TimeWindow{start, end};
            },
            [](const RunConfig& c) {
              const auto& w = c.scenario.attack_window;
              return w ? Pair(w->start, w->end) : std::string("none");
            }},
      CF_INT("scenario", "bot_groups", c.scenario.bot_groups),
      Field{"scenario", "seed",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              c.scenario.seed = ParseSeed(v, ctx);
            },
            [](const RunConfig& c) { return std::to_string(c.scenario.seed); }},
      CF_INT("scenario", "n_monitored_links", c.scenario.n_monitored_links),
      CF_DOUBLE("scenario", "impairment_coefficient", c.scenario.impairment_coefficient),
      CF_INT("scenario", "n_rsus", c.scenario.topology.n_rsus),
      CF_INT("scenario", "n_switches", c.scenario.topology.n_switches),
      CF_INT("scenario", "n_victim_servers", c.scenario.topology.n_victim_servers),
      CF_INT("scenario", "n_decoy_servers", c.scenario.topology.n_decoy_servers),
      CF_DOUBLE("scenario", "rsu_coverage_m", c.scenario.rsu_coverage_m),
      Field{"scenario", "background_rate",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              std::tie(c.scenario.background_rate_min, c.scenario.background_rate_max) =
                  ParsePair(v, ctx);
            },
            [](const RunConfig& c) {
              return Pair(c.scenario.background_rate_min, c.scenario.background_rate_max);
            }},
      Field{"scenario", "attack_rate",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              std::tie(c.scenario.attack_rate_start, c.scenario.attack_rate_end) =
                  ParsePair(v, ctx);
            },
            [](const RunConfig& c) {
              return Pair(c.scenario.attack_rate_start, c.scenario.attack_rate_end);
            }},

      CF_INT("train", "max_epochs", c.eval.train.max_epochs),
      CF_INT("train", "batch_size", c.eval.train.batch_size),
      CF_INT("train", "patience", c.eval.train.patience),
      CF_DOUBLE("train", "validation_fraction", c.eval.train.validation_fraction),
      CF_DOUBLE("train", "learning_rate", c.eval.train.learning_rate),
      Field{"train", "seed",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              c.eval.train.seed = ParseSeed(v, ctx);
            },
            [](const RunConfig& c) { return std::to_string(c.eval.train.seed); }},
      CF_INT("train", "threads", c.eval.train.threads),
      CF_DOUBLE("train", "train_fraction", c.eval.train_fraction),

      Field{"detector", "alpha",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              const long long a = ParseInt(v, ctx);
              if (a < 1) throw ParseError(std::string(ctx) + ": alpha must be >= 1");
              c.eval.alpha = static_cast<std::size_t>(a);
            },
            [](const RunConfig& c) { return std::to_string(c.eval.alpha); }},
      CF_DOUBLE("detector", "threshold", c.eval.detector.threshold),
      CF_INT("detector", "ann_hidden", c.eval.detector.ann.hidden),
      CF_INT("detector", "ann_zero_pad", c.eval.detector.ann.zero_pad),
      CF_INT("detector", "cnn_window", c.eval.detector.cnn.window),
      CF_INT("detector", "cnn_temporal_kernels", c.eval.detector.cnn.temporal_kernels),
      CF_INT("detector", "cnn_temporal_width", c.eval.detector.cnn.temporal_width),
      CF_INT("detector", "cnn_spatial_kernels", c.eval.detector.cnn.spatial_kernels),
      CF_INT("detector", "cnn_spatial_rows", c.eval.detector.cnn.spatial_rows),
      CF_INT("detector", "cnn_dense_units", c.eval.detector.cnn.dense_units),
      CF_INT("detector", "lstm_window", c.eval.detector.lstm.window),
      CF_INT("detector", "lstm_units", c.eval.detector.lstm.units),
      CF_INT("detector", "lstm_layers", c.eval.detector.lstm.layers),

      Field{"sweep", "variable",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              try {
                c.sweep.variable = eval::ParseSweepVariable(Trim(v));
              } catch (const ConfigError& e) {
                throw ParseError(std::string(ctx) + ": " + e.what());
              }
            },
            [](const RunConfig& c) {
              return std::string(eval::SweepVariableName(c.sweep.variable));
            }},
      Field{"sweep", "values",
            [](RunConfig& c, std::string_view v, std::string_view) {
              c.sweep.values = SplitList(v);
            },
            [](const RunConfig& c) {
              return Join<std::string>(c.sweep.values, [](const std::string& s) { return s; });
            }},
      Field{"sweep", "archs",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              c.sweep.archs.clear();
              for (const std::string& a : SplitList(v)) {
                try {
                  c.sweep.archs.push_back(detect::ParseArch(a));
                } catch (const ConfigError& e) {
                  throw ParseError(std::string(ctx) + ": " + e.what());
                }
              }
            },
            [](const RunConfig& c) {
              return Join<detect::Arch>(c.sweep.archs, [](const detect::Arch& a) {
                return std::string(detect::ArchName(a));
              });
            }},
      Field{"sweep", "seeds",
            [](RunConfig& c, std::string_view v, std::string_view ctx) {
              c.sweep.seeds.clear();
              for (const std::string& s : SplitList(v)) c.sweep.seeds.push_back(ParseSeed(s, ctx));
            },
            [](const RunConfig& c) {
              return Join<std::uint64_t>(c.sweep.seeds,
                                         [](const std::uint64_t& s) { return std::to_string(s); });
            }},
  };
  return fields;
}

#undef CF_INT
#undef CF_DOUBLE

const Field* FindField(std::string_view section, std::string_view key) {
  for (const Field& f : Fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

}  // namespace

ConfigFile ConfigFile::Parse(std::istream& in, std::string source) {
  ConfigFile file;
  file.source_ = std::move(source);
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = Trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = file.source_ + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(where + ": malformed section header '" + line + "'");
      }
      section = Trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    }
    if (section.empty()) {
      throw ConfigError(where + ": key outside of any [section]");
    }
    const std::string key = Trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    file.sections_[section][key] = {Trim(std::string_view(line).substr(eq + 1)), line_no};
  }
  return file;
}

ConfigFile ConfigFile::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return Parse(in, path.string());
}

void ConfigFile::Set(const std::string& section, const std::string& key, std::string value) {
  sections_[section][key] = {std::move(value), 0};
}

void ConfigFile::ApplyOverride(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string name = Trim(assignment.substr(0, eq));
  const std::string value = Trim(assignment.substr(eq + 1));
  const auto dot = name.find('.');
  if (dot != std::string::npos) {
    const std::string section = name.substr(0, dot), key = name.substr(dot + 1);
    if (!FindField(section, key)) throw ConfigError("override: unknown field '" + name + "'");
    Set(section, key, value);
    return;
  }
  bool matched = false;
  for (const Field& f : Fields()) {
    if (name == f.key) {
      Set(f.section, f.key, value);
      matched = true;
    }
  }
  if (!matched) throw ConfigError("override: unknown field '" + name + "'");
}

RunConfig ResolveConfig(const ConfigFile& file) {
  RunConfig config;
  for (const auto& [section, entries] : file.sections()) {
    for (const auto& [key, entry] : entries) {
      const std::string where =
          file.source() + (entry.line ? ":" + std::to_string(entry.line) : std::string(" (override)"));
      const Field* field = FindField(section, key);
      if (!field) {
        throw ConfigError(where + ": unknown field '" + section + "." + key + "'");
      }
      try {
        field->set(config, entry.value, where + ": field '" + section + "." + key + "'");
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  try {
    sim::ValidateScenario(config.scenario);
    nn::ValidateTrainConfig(config.eval.train);
    if (!(config.eval.train_fraction > 0.0 && config.eval.train_fraction < 1.0)) {
      throw ConfigError("train.train_fraction must lie in (0, 1)");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(file.source() + ": " + e.what());
  }
  config.sweep.base = config.scenario;
  config.sweep.settings = config.eval;
  return config;
}

std::string ToConfigText(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const Field& f : Fields()) {
    if (section != f.section) {
      section = f.section;
      out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
  return out.str();
}

}  // namespace crossfire
