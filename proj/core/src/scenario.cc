#include "crossfire/scenario.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "crossfire/error.h"

namespace crossfire::sim {
namespace {

constexpr std::uint64_t kVehicleStream = 0xc0ffee01;
constexpr std::uint64_t kBotStream = 0xc0ffee02;
constexpr std::uint64_t kBackgroundStream = 0xc0ffee03;
constexpr std::uint64_t kDecoyStream = 0xc0ffee04;
constexpr std::uint64_t kImpairmentStream = 0xc0ffee05;

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double RoadLength(const NetworkTopology& topology, double coverage) {
  return static_cast<double>(topology.rsus.size()) * coverage;
}

}  // namespace

void ValidateScenario(const ScenarioConfig& c) {
  Require(c.n_vehicles >= 0, "scenario.n_vehicles must be >= 0");
  Require(c.n_bots >= 0, "scenario.n_bots must be >= 0");
  Require(c.n_bots <= c.n_vehicles, "scenario.n_bots (" + std::to_string(c.n_bots) +
                                        ") exceeds scenario.n_vehicles (" +
                                        std::to_string(c.n_vehicles) + ")");
  Require(c.speed_min >= 0.0 && c.speed_min <= c.speed_max,
          "scenario.speed_range must satisfy 0 <= min <= max");
  Require(c.duration > 0.0, "scenario.duration must be > 0");
  Require(c.sample_interval > 0.0, "scenario.sample_interval must be > 0");
  const double ratio = c.duration / c.sample_interval;
  Require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio,
          "scenario.sample_interval must divide scenario.duration");
  if (c.attack_window) {
    Require(c.attack_window->start >= 0.0 &&
                c.attack_window->start < c.attack_window->end &&
                c.attack_window->end <= c.duration,
            "scenario.attack_window must satisfy 0 <= start < end <= duration");
    Require(c.bot_groups > 0 || c.n_bots == 0,
            "scenario.bot_groups must be >= 1 when bots attack");
  }
  Require(c.bot_groups >= 0, "scenario.bot_groups must be >= 0");
  Require(c.n_monitored_links >= 1, "scenario.n_monitored_links must be >= 1");
  Require(c.impairment_coefficient >= 0.0,
          "scenario.impairment_coefficient must be >= 0");
  Require(c.rsu_coverage_m > 0.0, "scenario.rsu_coverage_m must be > 0");
  Require(c.background_rate_min > 0.0 &&
              c.background_rate_min <= c.background_rate_max,
          "scenario.background_rate range must satisfy 0 < min <= max");
  Require(c.attack_rate_start > 0.0 && c.attack_rate_start <= c.attack_rate_end,
          "scenario.attack_rate ramp must satisfy 0 < start <= end");
}

std::size_t SampleCount(const ScenarioConfig& config) {
  return static_cast<std::size_t>(
      std::llround(config.duration / config.sample_interval));
}

NodeId AttachedRsu(const Vehicle& vehicle, double t,
                   const NetworkTopology& topology, double rsu_coverage_m) {
  const double road = RoadLength(topology, rsu_coverage_m);
  double pos = std::fmod(vehicle.initial_position + vehicle.speed * t, road);
  if (pos < 0.0) pos += road;
  auto idx = static_cast<std::size_t>(pos / rsu_coverage_m);
  idx = std::min(idx, topology.rsus.size() - 1);
  return topology.rsus[idx];
}

std::vector<Vehicle> MakeVehicles(const ScenarioConfig& config,
                                  const NetworkTopology& topology) {
  Rng rng(MixSeed(config.seed, kVehicleStream));
  const double road = RoadLength(topology, config.rsu_coverage_m);
  std::vector<Vehicle> vehicles;
  vehicles.reserve(static_cast<std::size_t>(config.n_vehicles));
  for (int i = 0; i < config.n_vehicles; ++i) {
    Vehicle v;
    v.id = i;
    v.speed = rng.Uniform(config.speed_min, config.speed_max);
    v.initial_position = rng.Uniform(0.0, road);
    v.attached_rsu = AttachedRsu(v, 0.0, topology, config.rsu_coverage_m);
    vehicles.push_back(v);
  }
  return vehicles;
}

std::vector<Vehicle> AssignBots(std::vector<Vehicle> vehicles, int n_bots,
                                std::uint64_t seed) {
  if (n_bots < 0 || static_cast<std::size_t>(n_bots) > vehicles.size()) {
    throw ConfigError("assign_bots: n_bots = " + std::to_string(n_bots) +
                      " with " + std::to_string(vehicles.size()) + " vehicles");
  }
  std::vector<std::size_t> idx(vehicles.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(MixSeed(seed, kBotStream));
  // Partial Fisher-Yates: the first n_bots slots are a uniform sample.
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_bots); ++i) {
    const std::size_t j = i + rng.Below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  for (Vehicle& v : vehicles) v.is_bot = false;
  for (int i = 0; i < n_bots; ++i) vehicles[idx[static_cast<std::size_t>(i)]].is_bot = true;
  return vehicles;
}

double FlowSpec::RateAt(double t) const {
  if (end <= start) return rate.start_rate;
  const double frac = std::clamp((t - start) / (end - start), 0.0, 1.0);
  return rate.start_rate + (rate.end_rate - rate.start_rate) * frac;
}

double FlowSpec::Volume(double a, double b) const {
  const double lo = std::max(a, start), hi = std::min(b, end);
  if (hi <= lo) return 0.0;
  // Exact for a linear profile.
  return (hi - lo) * 0.5 * (RateAt(lo) + RateAt(hi));
}

std::vector<FlowSpec> GenerateFlowSchedule(const ScenarioConfig& config,
                                           const std::vector<Vehicle>& vehicles,
                                           const NetworkTopology& topology) {
  if (topology.victim_servers.empty() || topology.decoy_servers.empty()) {
    throw ConfigError("flow schedule needs victim and decoy servers");
  }
  std::vector<FlowSpec> flows;
  Rng background(MixSeed(config.seed, kBackgroundStream));
  for (const Vehicle& v : vehicles) {
    FlowSpec f;
    f.src = v.id;
    f.dst = topology.victim_servers[background.Below(topology.victim_servers.size())];
    const double rate =
        background.Uniform(config.background_rate_min, config.background_rate_max);
    f.rate = {rate, rate};
    f.start = 0.0;
    f.end = config.duration;
    f.kind = FlowKind::kBackground;
    flows.push_back(f);
  }

  std::vector<int> bots;
  for (const Vehicle& v : vehicles) {
    if (v.is_bot) bots.push_back(v.id);
  }
  if (!config.attack_window || bots.empty()) return flows;
  if (config.bot_groups <= 0) {
    throw ConfigError("scenario.bot_groups must be >= 1 when bots attack");
  }
  // An empty group would leave a silent sub-slot inside the attack window.
  const std::size_t groups =
      std::min(static_cast<std::size_t>(config.bot_groups), bots.size());
  const TimeWindow w = *config.attack_window;
  const double slot = (w.end - w.start) / static_cast<double>(groups);
  Rng decoys(MixSeed(config.seed, kDecoyStream));
  for (std::size_t g = 0; g < groups; ++g) {
    const double start = w.start + slot * static_cast<double>(g);
    const double end = g + 1 == groups ? w.end : start + slot;
    for (std::size_t b = g; b < bots.size(); b += groups) {
      FlowSpec f;
      f.src = bots[b];
      f.dst = topology.decoy_servers[decoys.Below(topology.decoy_servers.size())];
      f.rate = {config.attack_rate_start, config.attack_rate_end};
      f.start = start;
      f.end = end;
      f.kind = FlowKind::kAttack;
      flows.push_back(f);
    }
  }
  return flows;
}

ImpairmentOutcome ConnectionImpairment(double speed, double coefficient,
                                       double sample_interval, Rng& rng) {
  const double drop_draw = rng.Uniform01();
  const double jitter_draw = rng.Uniform01();
  const double scaled = coefficient * speed;
  const double p = std::min(1.0, scaled);
  ImpairmentOutcome out;
  out.dropped = drop_draw < p;
  if (!out.dropped) out.delay_jitter = jitter_draw * scaled * sample_interval;
  return out;
}

ScenarioRun SimulateScenario(const ScenarioConfig& config) {
  ValidateScenario(config);
  ScenarioRun run;
  run.topology = BuildTopology(config.topology, config.n_monitored_links);
  run.vehicles = AssignBots(MakeVehicles(config, run.topology), config.n_bots,
                            config.seed);
  run.flows = GenerateFlowSchedule(config, run.vehicles, run.topology);

  const NetworkTopology& topo = run.topology;
  const std::size_t n = SampleCount(config);
  const std::size_t n_links = topo.monitored_links.size();
  std::vector<int> monitored_pos(topo.links.size(), -1);
  for (std::size_t i = 0; i < n_links; ++i) {
    monitored_pos[static_cast<std::size_t>(topo.monitored_links[i])] = static_cast<int>(i);
  }
  // Routes reduced to monitored positions, cached per (rsu, server).
  std::map<std::pair<NodeId, NodeId>, std::vector<int>> routes;
  auto route = [&](NodeId rsu, NodeId dst) -> const std::vector<int>& {
    auto [it, inserted] = routes.try_emplace({rsu, dst});
    if (inserted) {
      for (LinkId l : RouteFlow(topo, rsu, dst)) {
        if (monitored_pos[static_cast<std::size_t>(l)] >= 0) {
          it->second.push_back(monitored_pos[static_cast<std::size_t>(l)]);
        }
      }
    }
    return it->second;
  };

  std::vector<Rng> impairment_rngs;
  impairment_rngs.reserve(run.vehicles.size());
  for (const Vehicle& v : run.vehicles) {
    impairment_rngs.emplace_back(
        MixSeed(config.seed, kImpairmentStream, static_cast<std::uint64_t>(v.id)));
  }

  run.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    run.samples[k].per_link.assign(n_links, LinkObservation{});
  }
  // Last interval in which flow f was counted on monitored position p.
  std::vector<std::int64_t> stamp(run.flows.size() * n_links, -1);
  auto credit = [&](std::size_t flow, const std::vector<int>& path,
                    std::size_t k, double volume) {
    if (volume <= 0.0) return;
    for (int pos : path) {
      LinkObservation& obs = run.samples[k].per_link[static_cast<std::size_t>(pos)];
      obs.aggregate_size += volume;
      std::int64_t& s = stamp[flow * n_links + static_cast<std::size_t>(pos)];
      if (s != static_cast<std::int64_t>(k)) {
        s = static_cast<std::int64_t>(k);
        ++obs.flow_count;
      }
    }
  };

  std::vector<ImpairmentOutcome> outcomes(run.vehicles.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = static_cast<double>(k) * config.sample_interval;
    const double t1 = static_cast<double>(k + 1) * config.sample_interval;
    TrafficSample& sample = run.samples[k];
    sample.timestamp = t0;
    sample.attack = config.attack_window && config.attack_window->Overlaps(t0, t1);
    for (std::size_t v = 0; v < run.vehicles.size(); ++v) {
      outcomes[v] = ConnectionImpairment(run.vehicles[v].speed,
                                         config.impairment_coefficient,
                                         config.sample_interval, impairment_rngs[v]);
    }
    for (std::size_t f = 0; f < run.flows.size(); ++f) {
      const FlowSpec& flow = run.flows[f];
      const double a = std::max(t0, flow.start), b = std::min(t1, flow.end);
      if (b <= a) continue;
      const auto vid = static_cast<std::size_t>(flow.src);
      const ImpairmentOutcome& out = outcomes[vid];
      if (out.dropped) continue;
      const NodeId rsu = AttachedRsu(run.vehicles[vid], t0, topo, config.rsu_coverage_m);
      const std::vector<int>& path = route(rsu, flow.dst);
      // Traffic sent in [a, b) arrives in [a + jitter, b + jitter); the part
      // pushed past t1 is credited to the next interval.
      const double split = t1 - out.delay_jitter;
      credit(f, path, k, flow.Volume(a, std::min(b, split)));
      if (k + 1 < n) credit(f, path, k + 1, flow.Volume(std::max(a, split), b));
    }
  }
  return run;
}

}  // namespace crossfire::sim
