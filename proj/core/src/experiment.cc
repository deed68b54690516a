#include "crossfire/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "crossfire/dataset_io.h"
#include "crossfire/error.h"
#include "crossfire/model_io.h"

namespace crossfire::eval {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

struct DetectionRun {
  detect::StreamResult stream;
  double seconds = 0.0;
};

DetectionRun TimedDetect(const detect::DetectorModel& model,
                         std::span<const sim::TrafficSample> samples, std::size_t alpha) {
  const auto start = Clock::now();
  DetectionRun run{detect::DetectStream(model, samples, alpha), 0.0};
  run.seconds = SecondsSince(start);
  return run;
}

std::vector<detect::NetworkState> States(const detect::StreamResult& stream) {
  std::vector<detect::NetworkState> states;
  states.reserve(stream.steps.size());
  for (const auto& s : stream.steps) states.push_back(s.state);
  return states;
}

}  // namespace

TrainedDetector TrainDetector(detect::Arch arch,
                              std::span<const sim::TrafficSample> samples,
                              const EvalSettings& settings, std::uint64_t seed) {
  if (samples.empty()) throw ConfigError("training needs a non-empty sample stream");
  TrainedDetector out{detect::BuildDetector(arch, samples.front().per_link.size(), seed,
                                            settings.detector),
                      {}, {}, {}, 0.0};
  const std::size_t w = out.model.window_length();
  out.windows = detect::MakeWindows(samples, w);
  std::vector<bool> labels;
  labels.reserve(out.windows.size());
  for (const auto& win : out.windows) labels.push_back(win.attack);
  out.split = StratifiedSplit(labels, settings.train_fraction, seed);

  std::vector<bool> covered(samples.size(), false);
  for (std::size_t i : out.split.train) {
    const std::size_t end = out.windows[i].end;
    for (std::size_t j = end + 1 - w; j <= end; ++j) covered[j] = true;
  }
  std::vector<sim::TrafficSample> fit_samples;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (covered[j]) fit_samples.push_back(samples[j]);
  }
  out.model.set_normalization(detect::Normalization::Fit(fit_samples));

  std::vector<detect::Window> train_windows;
  train_windows.reserve(out.split.train.size());
  for (std::size_t i : out.split.train) train_windows.push_back(out.windows[i]);
  const std::vector<nn::Example> examples =
      detect::MakeExamples(samples, train_windows, out.model);

  nn::TrainConfig config = settings.train;
  config.seed = seed;
  const auto start = Clock::now();
  out.training = nn::Train(out.model, examples, config);
  out.train_seconds = SecondsSince(start);
  return out;
}

MetricsReport EvaluateWindows(const detect::DetectorModel& model,
                              std::span<const sim::TrafficSample> samples,
                              std::span<const detect::Window> windows,
                              std::span<const std::size_t> selected) {
  std::vector<detect::Verdict> predictions, labels;
  predictions.reserve(selected.size());
  labels.reserve(selected.size());
  for (std::size_t i : selected) {
    const detect::Window& w = windows[i];
    predictions.push_back(
        detect::Classify(model, detect::Featurize(samples.first(w.end + 1), model)).verdict);
    labels.push_back(ToVerdict(w.attack));
  }
  return MetricsReport::From(Confusion(predictions, labels));
}

AlarmSummary SummarizeAlarms(std::span<const detect::NetworkState> states,
                             std::span<const detect::StreamStep> steps,
                             std::span<const detect::Window> windows,
                             std::optional<double> attack_start) {
  if (states.size() != steps.size() || steps.size() != windows.size()) {
    throw ConfigError("alarm summary: states, steps and windows must align");
  }
  AlarmSummary s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const bool alarm = states[i] == detect::NetworkState::kUnderAttack;
    if (alarm && !s.first_alarm) s.first_alarm = steps[i].timestamp;
    if (alarm && attack_start && !s.latency && steps[i].timestamp >= *attack_start) {
      s.latency = steps[i].timestamp - *attack_start;
    }
    if (alarm && !windows[i].attack) ++s.false_alarm_windows;
    if (alarm == windows[i].attack) ++correct;
  }
  if (!steps.empty()) {
    s.state_accuracy = static_cast<double>(correct) / static_cast<double>(steps.size());
  }
  return s;
}

std::optional<double> AttackStart(std::span<const sim::TrafficSample> samples) {
  for (const auto& s : samples) {
    if (s.attack) return s.timestamp;
  }
  return std::nullopt;
}

PhaseTimes TimePhases(detect::Arch arch, std::span<const sim::TrafficSample> samples,
                      const EvalSettings& settings, std::uint64_t seed) {
  const TrainedDetector trained = TrainDetector(arch, samples, settings, seed);
  const DetectionRun run = TimedDetect(trained.model, samples, settings.alpha);
  return {trained.train_seconds, run.seconds};
}

std::string_view SweepVariableName(SweepVariable v) {
  switch (v) {
    case SweepVariable::kVehicles:
      return "vehicles";
    case SweepVariable::kSpeedRange:
      return "speed_range";
    case SweepVariable::kAlpha:
      return "alpha";
  }
  return "?";
}

SweepVariable ParseSweepVariable(std::string_view name) {
  if (name == "vehicles") return SweepVariable::kVehicles;
  if (name == "speed_range") return SweepVariable::kSpeedRange;
  if (name == "alpha") return SweepVariable::kAlpha;
  throw ConfigError("unknown sweep variable '" + std::string(name) +
                    "' (expected vehicles, speed_range or alpha)");
}

void ValidateSweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep.values must not be empty");
  if (spec.archs.empty()) throw ConfigError("sweep.archs must not be empty");
  if (spec.seeds.empty()) throw ConfigError("sweep.seeds must not be empty");
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) {
    throw ConfigError("sweep.seeds must be distinct per repetition");
  }
  sim::ScenarioConfig scenario = spec.base;
  EvalSettings settings = spec.settings;
  for (const std::string& v : spec.values) ApplySweepValue(spec.variable, v, scenario, settings);
}

void ApplySweepValue(SweepVariable variable, const std::string& value,
                     sim::ScenarioConfig& scenario, EvalSettings& settings) {
  const std::string ctx = "sweep value '" + value + "'";
  try {
    switch (variable) {
      case SweepVariable::kVehicles:
        scenario.n_vehicles = static_cast<int>(ParseInt(value, ctx));
        break;
      case SweepVariable::kSpeedRange: {
        const auto dash = value.find('-');
        if (dash == std::string::npos || dash == 0) {
          throw ConfigError(ctx + ": expected min-max");
        }
        scenario.speed_min = ParseDouble(std::string_view(value).substr(0, dash), ctx);
        scenario.speed_max = ParseDouble(std::string_view(value).substr(dash + 1), ctx);
        break;
      }
      case SweepVariable::kAlpha: {
        const long long alpha = ParseInt(value, ctx);
        if (alpha < 1) throw ConfigError(ctx + ": alpha must be >= 1");
        settings.alpha = static_cast<std::size_t>(alpha);
        break;
      }
    }
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec, const SweepOptions& options) {
  ValidateSweep(spec);
  const bool alpha_sweep = spec.variable == SweepVariable::kAlpha;
  const std::size_t n_values = spec.values.size(), n_archs = spec.archs.size(),
                    n_reps = spec.seeds.size();
  const std::string variable(SweepVariableName(spec.variable));

  std::vector<SweepRow> rows(n_values * n_archs * n_reps);
  auto row_at = [&](std::size_t value, std::size_t arch, std::size_t rep) -> SweepRow& {
    return rows[(value * n_archs + arch) * n_reps + rep];
  };
  for (std::size_t v = 0; v < n_values; ++v) {
    for (std::size_t a = 0; a < n_archs; ++a) {
      for (std::size_t r = 0; r < n_reps; ++r) {
        SweepRow& row = row_at(v, a, r);
        row.variable = variable;
        row.value = spec.values[v];
        row.arch = spec.archs[a];
        row.rep = static_cast<int>(r);
        row.seed = spec.seeds[r];
      }
    }
  }

  // Alpha sweeps: one task per repetition covering every alpha value.
  // Otherwise one task per (value, repetition).
  const std::size_t n_tasks = alpha_sweep ? n_reps : n_values * n_reps;
  auto run_task = [&](std::size_t task) {
    const std::size_t rep = task % n_reps;
    const std::size_t value_idx = alpha_sweep ? 0 : task / n_reps;
    const std::uint64_t seed = spec.seeds[rep];
    auto fail_all = [&](const std::string& msg) {
      for (std::size_t a = 0; a < n_archs; ++a) {
        for (std::size_t v = 0; v < n_values; ++v) {
          if (alpha_sweep || v == value_idx) row_at(v, a, rep).error = msg;
        }
      }
    };
    std::vector<sim::TrafficSample> samples;
    EvalSettings settings = spec.settings;
    std::optional<std::filesystem::path> dir;
    try {
      sim::ScenarioConfig scenario = spec.base;
      if (!alpha_sweep) {
        ApplySweepValue(spec.variable, spec.values[value_idx], scenario, settings);
      }
      scenario.seed = seed;
      samples = sim::RunScenario(scenario);
      if (options.artifact_dir) {
        const std::string point =
            alpha_sweep ? variable : variable + "_" + spec.values[value_idx];
        dir = *options.artifact_dir / point / ("rep" + std::to_string(rep));
        SaveDataset(*dir / "dataset.csv", samples);
      }
    } catch (const std::exception& e) {
      fail_all(e.what());
      return;
    }
    const std::optional<double> attack_start = AttackStart(samples);
    for (std::size_t a = 0; a < n_archs; ++a) {
      try {
        const TrainedDetector trained = TrainDetector(spec.archs[a], samples, settings, seed);
        if (dir) {
          detect::SaveModel(trained.model,
                            *dir / (std::string(detect::ArchName(spec.archs[a])) + ".model"));
        }
        const MetricsReport metrics =
            EvaluateWindows(trained.model, samples, trained.windows, trained.split.test);
        for (std::size_t v = 0; v < n_values; ++v) {
          if (!alpha_sweep && v != value_idx) continue;
          EvalSettings point = settings;
          sim::ScenarioConfig unused;
          if (alpha_sweep) ApplySweepValue(spec.variable, spec.values[v], unused, point);
          const DetectionRun run = TimedDetect(trained.model, samples, point.alpha);
          SweepRow& row = row_at(v, a, rep);
          row.metrics = metrics;
          row.train_seconds = trained.train_seconds;
          row.detect_seconds = run.seconds;
          row.alarms = SummarizeAlarms(States(run.stream), run.stream.steps,
                                       trained.windows, attack_start);
        }
      } catch (const std::exception& e) {
        for (std::size_t v = 0; v < n_values; ++v) {
          if (alpha_sweep || v == value_idx) row_at(v, a, rep).error = e.what();
        }
      }
    }
  };

  const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  if (jobs <= 1 || n_tasks <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < std::min(jobs, n_tasks); ++w) {
      workers.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < n_tasks;) run_task(t);
      });
    }
  }
  return rows;
}

void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    const bool ok = !r.error;
    out << r.variable << ',' << r.value << ',' << detect::ArchName(r.arch) << ',' << r.rep
        << ',' << r.seed << ',' << FormatMetric(ok ? r.metrics.accuracy : std::nullopt)
        << ',' << FormatMetric(ok ? r.metrics.precision : std::nullopt) << ','
        << FormatMetric(ok ? r.metrics.recall : std::nullopt) << ','
        << FormatMetric(ok ? r.metrics.f1 : std::nullopt) << ','
        << FormatMetric(ok ? r.alarms.latency : std::nullopt, 3) << ','
        << (ok ? Fixed(r.train_seconds, 2) : "NA") << ','
        << (ok ? Fixed(r.detect_seconds, 2) : "NA") << '\n';
  }
}

std::string SummarizeSweepCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw ParseError("sweep results line 1: expected header '" +
                     std::string(kSweepCsvHeader) + "'");
  }
  constexpr std::size_t kFirstMetric = 5, kColumns = 12;
  struct Group {
    std::size_t rows = 0;
    double sum[kColumns - kFirstMetric] = {};
    std::size_t count[kColumns - kFirstMetric] = {};
  };
  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    const std::string ctx = "sweep results line " + std::to_string(line_no);
    if (fields.size() != kColumns) throw ParseError(ctx + ": expected 12 fields");
    const std::string key = std::string(fields[0]) + ',' + std::string(fields[1]) + ',' +
                            std::string(fields[2]);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    ++it->second.rows;
    for (std::size_t c = kFirstMetric; c < kColumns; ++c) {
      if (fields[c] == "NA") continue;
      it->second.sum[c - kFirstMetric] += ParseDouble(fields[c], ctx);
      ++it->second.count[c - kFirstMetric];
    }
  }
  std::ostringstream out;
  out << "variable,value,arch,n,accuracy,precision,recall,f1,latency_s,train_s,detect_s\n";
  for (const std::string& key : order) {
    const Group& g = groups[key];
    out << key << ',' << g.rows;
    for (std::size_t c = 0; c < kColumns - kFirstMetric; ++c) {
      const int decimals = c == 4 ? 3 : (c >= 5 ? 2 : 6);
      out << ','
          << FormatMetric(g.count[c] ? std::optional<double>(g.sum[c] / g.count[c])
                                     : std::nullopt,
                          decimals);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace crossfire::eval
