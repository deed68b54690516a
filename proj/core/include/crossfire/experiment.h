#ifndef CROSSFIRE_EXPERIMENT_H
#define CROSSFIRE_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossfire/alpha_buffer.h"
#include "crossfire/detector.h"
#include "crossfire/metrics.h"
#include "crossfire/scenario.h"
#include "crossfire/split.h"
#include "crossfire/trainer.h"

namespace crossfire::eval {

struct EvalSettings {
  double train_fraction = 0.7;
  std::size_t alpha = 6;
  detect::DetectorOptions detector;
  nn::TrainConfig train;
};

struct TrainedDetector {
  detect::DetectorModel model;
  nn::TrainResult training;
  std::vector<detect::Window> windows;  // every window of the stream
  Split split;                          // indices into `windows`
  double train_seconds = 0.0;
};

// Windows the stream, splits the windows (stratified, seeded), fits the
// normalization on the samples covered by training windows and trains.
// `train_seconds` covers the training loop only.
TrainedDetector TrainDetector(detect::Arch arch,
                              std::span<const sim::TrafficSample> samples,
                              const EvalSettings& settings, std::uint64_t seed);

// Per-window (pre-alpha) metrics over the selected windows.
MetricsReport EvaluateWindows(const detect::DetectorModel& model,
                              std::span<const sim::TrafficSample> samples,
                              std::span<const detect::Window> windows,
                              std::span<const std::size_t> selected);

// Alarm-level view of a detection stream whose steps align with `windows`.
struct AlarmSummary {
  // Window-end time of the first UNDER_ATTACK state at or after the attack
  // start, minus the attack start. Undefined without an attack or alarm.
  std::optional<double> latency;
  std::optional<double> first_alarm;  // first UNDER_ATTACK timestamp
  // Windows in UNDER_ATTACK whose ground truth is normal.
  std::size_t false_alarm_windows = 0;
  // Accuracy of the post-alpha state against window labels.
  std::optional<double> state_accuracy;
};

AlarmSummary SummarizeAlarms(std::span<const detect::NetworkState> states,
                             std::span<const detect::StreamStep> steps,
                             std::span<const detect::Window> windows,
                             std::optional<double> attack_start);

// Timestamp of the first attack-labeled sample.
std::optional<double> AttackStart(std::span<const sim::TrafficSample> samples);

struct PhaseTimes {
  double training_seconds = 0.0;
  double detection_seconds = 0.0;
};

// Wall-clock seconds for training and for detecting over the full stream.
PhaseTimes TimePhases(detect::Arch arch, std::span<const sim::TrafficSample> samples,
                      const EvalSettings& settings, std::uint64_t seed);

enum class SweepVariable { kVehicles, kSpeedRange, kAlpha };

std::string_view SweepVariableName(SweepVariable v);
SweepVariable ParseSweepVariable(std::string_view name);

struct SweepSpec {
  SweepVariable variable = SweepVariable::kVehicles;
  // Textual values: vehicle counts ("10"), speed ranges ("0-10"), alphas ("6").
  std::vector<std::string> values;
  sim::ScenarioConfig base;
  std::vector<detect::Arch> archs{detect::Arch::kAnn, detect::Arch::kCnn,
                                  detect::Arch::kLstm};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  EvalSettings settings;
};

// Throws ConfigError for empty values/archs/seeds or repeated seeds.
void ValidateSweep(const SweepSpec& spec);

// Applies one sweep value to a scenario/settings pair.
void ApplySweepValue(SweepVariable variable, const std::string& value,
                     sim::ScenarioConfig& scenario, EvalSettings& settings);

struct SweepRow {
  std::string variable;
  std::string value;
  detect::Arch arch = detect::Arch::kAnn;
  int rep = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  AlarmSummary alarms;
  double train_seconds = 0.0;
  double detect_seconds = 0.0;
  std::optional<std::string> error;  // set when the point failed
};

struct SweepOptions {
  int jobs = 1;
  // When set, datasets and models are written under
  // <dir>/<variable>_<value>/rep<r>/ (alpha sweeps: <dir>/alpha/rep<r>/).
  std::optional<std::filesystem::path> artifact_dir;
};

// One row per (value, arch, repetition) in that nesting order. Alpha sweeps
// simulate and train once per (arch, repetition) and only re-run detection.
std::vector<SweepRow> RunSweep(const SweepSpec& spec, const SweepOptions& options = {});

inline constexpr std::string_view kSweepCsvHeader =
    "variable,value,arch,rep,seed,accuracy,precision,recall,f1,latency_s,train_s,detect_s";
void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows);

// Means per (variable, value, arch) over a sweep CSV; NA cells are skipped.
std::string SummarizeSweepCsv(std::istream& in);

}  // namespace crossfire::eval

#endif  // CROSSFIRE_EXPERIMENT_H
