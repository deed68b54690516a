#ifndef CROSSFIRE_SCENARIO_H
#define CROSSFIRE_SCENARIO_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "crossfire/rng.h"
#include "crossfire/topology.h"

namespace crossfire::sim {

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  bool Overlaps(double lo, double hi) const { return lo < end && hi > start; }
  bool operator==(const TimeWindow&) const = default;
};

struct ScenarioConfig {
  int n_vehicles = 10;
  int n_bots = 2;
  double speed_min = 0.0;  // m/s
  double speed_max = 10.0;
  double duration = 3600.0;       // s
  double sample_interval = 0.5;   // s
  std::optional<TimeWindow> attack_window = TimeWindow{900.0, 2700.0};
  int bot_groups = 3;
  std::uint64_t seed = 1;
  std::size_t n_monitored_links = 25;
  // Drop probability per m/s of vehicle speed.
  double impairment_coefficient = 0.004;
  TopologyParams topology;
  // Road length covered by one RSU; vehicles drive a ring road past all RSUs.
  double rsu_coverage_m = 500.0;
  double background_rate_min = 600.0;  // Kbps
  double background_rate_max = 1700.0;
  double attack_rate_start = 40.0;
  double attack_rate_end = 300.0;

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void ValidateScenario(const ScenarioConfig& config);
std::size_t SampleCount(const ScenarioConfig& config);

struct Vehicle {
  int id = 0;
  double speed = 0.0;            // m/s
  double initial_position = 0.0; // m along the ring road
  bool is_bot = false;
  NodeId attached_rsu = 0;       // RSU at t = 0
};

// RSU serving a vehicle at time t.
NodeId AttachedRsu(const Vehicle& vehicle, double t,
                   const NetworkTopology& topology, double rsu_coverage_m);

// Seeded speeds in [speed_min, speed_max] and start positions.
std::vector<Vehicle> MakeVehicles(const ScenarioConfig& config,
                                  const NetworkTopology& topology);

// Flags exactly n_bots vehicles, uniformly at random per seed.
std::vector<Vehicle> AssignBots(std::vector<Vehicle> vehicles, int n_bots,
                                std::uint64_t seed);

enum class FlowKind { kBackground, kAttack };

// Rate linear in time from start_rate at `start` to end_rate at `end`.
struct RateProfile {
  double start_rate = 0.0;
  double end_rate = 0.0;
};

struct FlowSpec {
  int src = 0;      // vehicle id
  NodeId dst = 0;   // server node
  RateProfile rate;
  double start = 0.0;
  double end = 0.0;
  FlowKind kind = FlowKind::kBackground;

  double RateAt(double t) const;
  // Kbit sent over [a, b] (clipped to the active span).
  double Volume(double a, double b) const;
};

// Background flow per vehicle plus alternating attack flows; see README for
// the bot-group schedule. Throws ConfigError for bot_groups == 0 when an
// attack is configured with bots.
std::vector<FlowSpec> GenerateFlowSchedule(const ScenarioConfig& config,
                                           const std::vector<Vehicle>& vehicles,
                                           const NetworkTopology& topology);

struct ImpairmentOutcome {
  double delay_jitter = 0.0;
  bool dropped = false;
};

// p = min(1, coefficient * speed); jitter ~ U[0, coefficient * speed *
// sample_interval] when not dropped. Always consumes two draws from `rng`.
ImpairmentOutcome ConnectionImpairment(double speed, double coefficient,
                                       double sample_interval, Rng& rng);

struct LinkObservation {
  int flow_count = 0;
  double aggregate_size = 0.0;  // Kbit in the interval

  bool operator==(const LinkObservation&) const = default;
};

struct TrafficSample {
  double timestamp = 0.0;  // interval start, s
  std::vector<LinkObservation> per_link;
  bool attack = false;

  bool operator==(const TrafficSample&) const = default;
};

struct ScenarioRun {
  NetworkTopology topology;
  std::vector<Vehicle> vehicles;
  std::vector<FlowSpec> flows;
  std::vector<TrafficSample> samples;
};

// Full pipeline: topology, vehicles, bots, schedule and per-interval
// accounting on the monitored links.
ScenarioRun SimulateScenario(const ScenarioConfig& config);

inline std::vector<TrafficSample> RunScenario(const ScenarioConfig& config) {
  return SimulateScenario(config).samples;
}

}  // namespace crossfire::sim

#endif  // CROSSFIRE_SCENARIO_H
