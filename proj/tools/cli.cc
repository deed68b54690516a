#include "cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crossfire/alpha_buffer.h"
#include "crossfire/config.h"
#include "crossfire/dataset_io.h"
#include "crossfire/error.h"
#include "crossfire/experiment.h"
#include "crossfire/metrics.h"
#include "crossfire/model_io.h"
#include "crossfire/scenario.h"

namespace crossfire::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::string arch;
  std::optional<long long> alpha;
  std::optional<long long> seed;
  int jobs = 1;
  std::string data;
  std::string model;
};

RunConfig LoadRunConfig(const Options& opts) {
  ConfigFile file;
  if (!opts.config_path.empty()) {
    if (!fs::exists(opts.config_path)) {
      throw ConfigError("config file not found: " + opts.config_path);
    }
    file = ConfigFile::Load(opts.config_path);
  }
  for (const std::string& o : opts.overrides) file.ApplyOverride(o);
  if (opts.seed) file.ApplyOverride("seed=" + std::to_string(*opts.seed));
  if (opts.alpha) file.Set("detector", "alpha", std::to_string(*opts.alpha));
  return ResolveConfig(file);
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " file not found: " + path);
}

void RequireOut(const Options& opts) {
  if (opts.out.empty()) throw ConfigError("missing --out");
}

// The sidecar is itself a config file: feeding it back through --config
// reproduces the run.
void WriteMeta(const fs::path& artifact, const std::string& command,
               const std::vector<std::pair<std::string, std::string>>& inputs,
               const RunConfig& config) {
  std::string text = "# crossfire " + command + "\n";
  for (const auto& [key, value] : inputs) text += "# " + key + " = " + value + "\n";
  text += ToConfigText(config);
  WriteFileAtomically(artifact.string() + ".meta", text);
}

std::string SeedText(const RunConfig& config) {
  return std::to_string(config.scenario.seed);
}

int Simulate(const Options& opts, std::ostream& out) {
  RequireOut(opts);
  const RunConfig config = LoadRunConfig(opts);
  const std::vector<sim::TrafficSample> samples = sim::RunScenario(config.scenario);
  SaveDataset(opts.out, samples);
  WriteMeta(opts.out, "simulate", {}, config);
  out << "simulate: " << samples.size() << " samples (seed " << SeedText(config)
      << ") -> " << opts.out << '\n';
  return kExitOk;
}

int Train(const Options& opts, std::ostream& out) {
  RequireFile(opts.data, "data");
  RequireOut(opts);
  if (opts.arch.empty()) throw ConfigError("missing --arch");
  const detect::Arch arch = detect::ParseArch(opts.arch);
  const RunConfig config = LoadRunConfig(opts);
  const std::vector<sim::TrafficSample> samples = LoadDataset(opts.data);

  std::size_t attack = 0;
  for (const sim::TrafficSample& s : samples) attack += s.attack ? 1 : 0;
  if (attack == 0 || attack == samples.size()) {
    throw ConfigError("dataset " + opts.data + " has a single class (" +
                      (attack == 0 ? "normal" : "attack") +
                      " only); training needs both");
  }

  const eval::TrainedDetector trained =
      eval::TrainDetector(arch, samples, config.eval, config.eval.train.seed);
  detect::SaveModel(trained.model, opts.out);

  std::string history = "epoch,train_loss,val_loss\n";
  for (const nn::EpochRecord& e : trained.training.history) {
    history += std::to_string(e.epoch) + "," + FormatDouble(e.train_loss) + "," +
               FormatDouble(e.val_loss) + "\n";
  }
  WriteFileAtomically(opts.out + ".history.csv", history);
  WriteMeta(opts.out, "train", {{"arch", opts.arch}, {"data", opts.data}}, config);

  const eval::MetricsReport test = eval::EvaluateWindows(
      trained.model, samples, trained.windows, trained.split.test);
  out << "train: " << opts.arch << " " << trained.training.history.size()
      << " epochs (best " << trained.training.best_epoch << "), test accuracy "
      << eval::FormatMetric(test.accuracy, 4) << ", f1 " << eval::FormatMetric(test.f1, 4)
      << " -> " << opts.out << '\n';
  return kExitOk;
}

int Detect(const Options& opts, std::ostream& out) {
  RequireFile(opts.model, "model");
  RequireFile(opts.data, "data");
  RequireOut(opts);
  const RunConfig config = LoadRunConfig(opts);
  const detect::DetectorModel model = detect::LoadModel(opts.model);
  const std::vector<sim::TrafficSample> samples = LoadDataset(opts.data);
  const std::size_t data_links = samples.empty() ? 0 : samples.front().per_link.size();
  if (data_links != model.n_links()) {
    throw IncompatibleError("model " + opts.model + " expects L = " +
                            std::to_string(model.n_links()) + " monitored links, dataset " +
                            opts.data + " has L = " + std::to_string(data_links));
  }
  const std::size_t alpha = config.eval.alpha;
  const detect::StreamResult stream = detect::DetectStream(model, samples, alpha);
  if (stream.too_short) {
    throw IncompatibleError("dataset " + opts.data + " has " +
                            std::to_string(samples.size()) + " samples, fewer than the " +
                            std::to_string(model.window_length()) + "-sample window");
  }

  std::string csv = "t,probability,verdict,state\n";
  std::vector<detect::Verdict> verdicts, labels;
  std::vector<detect::NetworkState> states;
  const std::vector<detect::Window> windows =
      detect::MakeWindows(samples, model.window_length());
  char t[32];
  for (std::size_t i = 0; i < stream.steps.size(); ++i) {
    const detect::StreamStep& s = stream.steps[i];
    std::snprintf(t, sizeof(t), "%.3f", s.timestamp);
    const bool attack = s.verdict == detect::Verdict::kAttack;
    const bool alarm = s.state == detect::NetworkState::kUnderAttack;
    csv += std::string(t) + "," + FormatDouble(s.probability) + "," + (attack ? "1" : "0") +
           "," + (alarm ? "UNDER_ATTACK" : "NORMAL") + "\n";
    verdicts.push_back(s.verdict);
    labels.push_back(eval::ToVerdict(windows[i].attack));
    states.push_back(s.state);
  }
  WriteFileAtomically(opts.out, csv);

  const eval::MetricsReport m = eval::MetricsReport::From(eval::Confusion(verdicts, labels));
  const eval::AlarmSummary alarms =
      eval::SummarizeAlarms(states, stream.steps, windows, eval::AttackStart(samples));
  std::ostringstream summary;
  summary << "alpha = " << alpha << "\n"
          << "windows = " << windows.size() << "\n"
          << "first_alarm_s = " << eval::FormatMetric(alarms.first_alarm, 3) << "\n"
          << "latency_s = " << eval::FormatMetric(alarms.latency, 3) << "\n"
          << "false_alarm_windows = " << alarms.false_alarm_windows << "\n"
          << "state_accuracy = " << eval::FormatMetric(alarms.state_accuracy) << "\n"
          << "true_positive = " << m.counts.true_positive << "\n"
          << "false_positive = " << m.counts.false_positive << "\n"
          << "true_negative = " << m.counts.true_negative << "\n"
          << "false_negative = " << m.counts.false_negative << "\n"
          << "accuracy = " << eval::FormatMetric(m.accuracy) << "\n"
          << "precision = " << eval::FormatMetric(m.precision) << "\n"
          << "recall = " << eval::FormatMetric(m.recall) << "\n"
          << "f1 = " << eval::FormatMetric(m.f1) << "\n";
  WriteFileAtomically(opts.out + ".summary", summary.str());
  WriteMeta(opts.out, "detect", {{"model", opts.model}, {"data", opts.data}}, config);
  out << summary.str();
  return kExitOk;
}

int Sweep(const Options& opts, std::ostream& out, std::ostream& err) {
  RequireOut(opts);
  const RunConfig config = LoadRunConfig(opts);
  eval::ValidateSweep(config.sweep);
  const fs::path dir = opts.out;
  fs::create_directories(dir);
  eval::SweepOptions sweep_options;
  sweep_options.jobs = opts.jobs;
  sweep_options.artifact_dir = dir;
  const std::vector<eval::SweepRow> rows = eval::RunSweep(config.sweep, sweep_options);

  std::ostringstream csv;
  eval::WriteSweepCsv(csv, rows);
  WriteFileAtomically(dir / "results.csv", csv.str());
  std::string failures = "value,arch,rep,error\n";
  std::size_t failed = 0;
  for (const eval::SweepRow& r : rows) {
    if (!r.error) continue;
    ++failed;
    std::string msg = *r.error;
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    failures += r.value + "," + std::string(detect::ArchName(r.arch)) + "," +
                std::to_string(r.rep) + "," + msg + "\n";
    err << "sweep: point " << r.variable << "=" << r.value << " " << detect::ArchName(r.arch)
        << " rep " << r.rep << " failed: " << *r.error << '\n';
  }
  WriteFileAtomically(dir / "failures.csv", failures);
  WriteMeta(dir / "results.csv", "sweep", {}, config);
  out << "sweep: " << rows.size() - failed << "/" << rows.size() << " rows ok -> "
      << (dir / "results.csv").string() << '\n';
  return failed == rows.size() ? kExitRuntime : kExitOk;
}

int Report(const Options& opts, std::ostream& out) {
  RequireFile(opts.data, "data");
  std::ifstream in(opts.data);
  const std::string summary = eval::SummarizeSweepCsv(in);
  if (!opts.out.empty()) WriteFileAtomically(opts.out, summary);
  out << summary;
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crossfire attack simulation and detection laboratory", "crossfire"};
  app.require_subcommand(1);
  Options opts;

  auto add_config = [&opts](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "Config file ([scenario], [train], ...)");
    cmd->add_option("--override", opts.overrides, "section.key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "Seed for every section that has one");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a labeled dataset CSV");
  add_config(simulate);
  simulate->add_option("--out", opts.out, "Dataset CSV path");

  CLI::App* train = app.add_subcommand("train", "Train a detector on a dataset");
  add_config(train);
  train->add_option("--arch", opts.arch, "ann, cnn or lstm");
  train->add_option("--data", opts.data, "Dataset CSV");
  train->add_option("--out", opts.out, "Model file path");

  CLI::App* detect = app.add_subcommand("detect", "Run a trained detector over a dataset");
  add_config(detect);
  detect->add_option("--model", opts.model, "Model file");
  detect->add_option("--data", opts.data, "Dataset CSV");
  detect->add_option("--alpha", opts.alpha, "Consecutive attack verdicts per alarm");
  detect->add_option("--out", opts.out, "Detection CSV path");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a vehicles/speed/alpha sweep");
  add_config(sweep);
  sweep->add_option("--jobs", opts.jobs, "Parallel sweep points")->check(CLI::PositiveNumber);
  sweep->add_option("--out", opts.out, "Output directory");

  CLI::App* report = app.add_subcommand("report", "Average a sweep result table");
  report->add_option("--data", opts.data, "results.csv from a sweep");
  report->add_option("--out", opts.out, "Summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return Simulate(opts, out);
    if (*train) return Train(opts, out);
    if (*detect) return Detect(opts, out);
    if (*sweep) return Sweep(opts, out, err);
    return Report(opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IncompatibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIncompatible;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIncompatible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace crossfire::cli
