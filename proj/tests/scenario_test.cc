#include "crossfire/scenario.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "crossfire/error.h"

namespace crossfire::sim {
namespace {

ScenarioConfig Small() {
  ScenarioConfig c;
  c.duration = 120.0;
  c.attack_window = TimeWindow{30.0, 90.0};
  return c;
}

TEST(ValidateScenarioTest, RejectsBrokenConfigs) {
  auto expect_bad = [](auto mutate, const char* field) {
    ScenarioConfig c;
    mutate(c);
    try {
      ValidateScenario(c);
      ADD_FAILURE() << "accepted bad " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_bad([](ScenarioConfig& c) { c.n_bots = 11; }, "n_bots");
  expect_bad([](ScenarioConfig& c) { c.sample_interval = 0.7; }, "sample_interval");
  expect_bad([](ScenarioConfig& c) { c.attack_window = TimeWindow{100, 4000}; }, "attack_window");
  expect_bad([](ScenarioConfig& c) { c.speed_min = 5, c.speed_max = 1; }, "speed_range");
  expect_bad([](ScenarioConfig& c) { c.bot_groups = 0; }, "bot_groups");
  ScenarioConfig too_many_links;
  too_many_links.n_monitored_links = 26;
  EXPECT_THROW(SimulateScenario(too_many_links), ConfigError);
}

TEST(VehiclesTest, SpeedsInRangeAndRsuAlwaysValid) {
  ScenarioConfig c;
  c.n_vehicles = 40;
  c.speed_min = 20;
  c.speed_max = 30;
  const NetworkTopology topo = BuildTopology(c.topology, 25);
  const std::vector<Vehicle> vs = MakeVehicles(c, topo);
  ASSERT_EQ(vs.size(), 40u);
  for (const Vehicle& v : vs) {
    EXPECT_GE(v.speed, 20.0);
    EXPECT_LE(v.speed, 30.0);
    for (double t = 0; t < 3600; t += 7.5) {
      const NodeId r = AttachedRsu(v, t, topo, c.rsu_coverage_m);
      EXPECT_TRUE(std::count(topo.rsus.begin(), topo.rsus.end(), r) == 1);
    }
  }
}

TEST(VehiclesTest, MovingVehicleVisitsRsusInRingOrder) {
  const NetworkTopology topo = BuildTopology(TopologyParams{}, 25);
  Vehicle v;
  v.speed = 10.0;
  v.initial_position = 250.0;
  EXPECT_EQ(AttachedRsu(v, 0.0, topo, 500.0), topo.rsus[0]);
  EXPECT_EQ(AttachedRsu(v, 30.0, topo, 500.0), topo.rsus[1]);
  EXPECT_EQ(AttachedRsu(v, 180.0, topo, 500.0), topo.rsus[0]);  // 2050 m wraps
}

TEST(AssignBotsTest, Counts) {
  ScenarioConfig c;
  c.n_vehicles = 30;
  const NetworkTopology topo = BuildTopology(c.topology, 25);
  const auto vs = MakeVehicles(c, topo);
  auto count = [](const std::vector<Vehicle>& v) {
    return std::count_if(v.begin(), v.end(), [](const Vehicle& x) { return x.is_bot; });
  };
  EXPECT_EQ(count(AssignBots(vs, 0, 1)), 0);
  EXPECT_EQ(count(AssignBots(vs, 30, 1)), 30);
  EXPECT_EQ(count(AssignBots(vs, 5, 1)), 5);
  EXPECT_THROW(AssignBots(vs, 31, 1), ConfigError);
}

TEST(AssignBotsTest, DeterministicAndUniform) {
  std::vector<Vehicle> vs(30);
  for (int i = 0; i < 30; ++i) vs[i].id = i;
  auto ids = [](const std::vector<Vehicle>& v) {
    std::vector<int> out;
    for (const Vehicle& x : v) {
      if (x.is_bot) out.push_back(x.id);
    }
    return out;
  };
  EXPECT_EQ(ids(AssignBots(vs, 5, 77)), ids(AssignBots(vs, 5, 77)));
  std::vector<int> hits(30);
  const int trials = 3000;
  for (int s = 0; s < trials; ++s) {
    for (int id : ids(AssignBots(vs, 5, static_cast<std::uint64_t>(s)))) ++hits[id];
  }
  // Each vehicle is a bot with probability 1/6: 500 expected, sd ~20.4.
  for (int h : hits) EXPECT_NEAR(h, 500, 90);
}

TEST(FlowScheduleTest, NoAttackWindowMeansBackgroundOnly) {
  ScenarioConfig c;
  c.attack_window.reset();
  const ScenarioRun run = SimulateScenario(c);
  ASSERT_EQ(run.flows.size(), 10u);
  for (const FlowSpec& f : run.flows) {
    EXPECT_EQ(f.kind, FlowKind::kBackground);
    EXPECT_GE(f.rate.start_rate, 600.0);
    EXPECT_LE(f.rate.start_rate, 1700.0);
    EXPECT_EQ(f.rate.start_rate, f.rate.end_rate);
    EXPECT_EQ(f.start, 0.0);
    EXPECT_EQ(f.end, 3600.0);
    EXPECT_TRUE(std::count(run.topology.victim_servers.begin(),
                           run.topology.victim_servers.end(), f.dst));
  }
}

TEST(FlowScheduleTest, SixBotsThreeGroupsAlternate) {
  ScenarioConfig c;
  c.n_vehicles = 12;
  c.n_bots = 6;
  c.bot_groups = 3;
  c.attack_window = TimeWindow{900, 2700};
  const ScenarioRun run = SimulateScenario(c);
  std::vector<int> bots;
  for (const Vehicle& v : run.vehicles) {
    if (v.is_bot) bots.push_back(v.id);
  }
  ASSERT_EQ(bots.size(), 6u);
  std::map<std::pair<double, double>, std::set<int>> slots;
  for (const FlowSpec& f : run.flows) {
    if (f.kind != FlowKind::kAttack) continue;
    slots[{f.start, f.end}].insert(f.src);
    EXPECT_TRUE(std::count(run.topology.decoy_servers.begin(),
                           run.topology.decoy_servers.end(), f.dst));
  }
  ASSERT_EQ(slots.size(), 3u);
  std::set<int> seen;
  double expect_start = 900;
  for (const auto& [span, members] : slots) {
    EXPECT_DOUBLE_EQ(span.first, expect_start);
    EXPECT_DOUBLE_EQ(span.second - span.first, 600.0);
    EXPECT_EQ(members.size(), 2u);
    for (int b : members) EXPECT_TRUE(seen.insert(b).second) << "bot in two groups";
    expect_start = span.second;
  }
  EXPECT_EQ(seen, std::set<int>(bots.begin(), bots.end()));
  // Round-robin over bots in id order.
  const std::vector<std::set<int>> groups{{bots[0], bots[3]}, {bots[1], bots[4]},
                                          {bots[2], bots[5]}};
  std::size_t g = 0;
  for (const auto& [span, members] : slots) EXPECT_EQ(members, groups[g++]);
}

TEST(FlowScheduleTest, FewerBotsThanGroupsLeavesNoSilentSlot) {
  ScenarioConfig c;  // 2 bots, 3 groups
  const ScenarioRun run = SimulateScenario(c);
  double covered = 0;
  for (const FlowSpec& f : run.flows) {
    if (f.kind == FlowKind::kAttack) covered += f.end - f.start;
  }
  EXPECT_DOUBLE_EQ(covered, 1800.0);
}

TEST(FlowScheduleTest, AttackRampsFrom40To300) {
  ScenarioConfig c;
  c.n_vehicles = 20;
  c.n_bots = 7;
  const ScenarioRun run = SimulateScenario(c);
  int attacks = 0;
  for (const FlowSpec& f : run.flows) {
    if (f.kind != FlowKind::kAttack) continue;
    ++attacks;
    EXPECT_GE(f.start, 900.0);
    EXPECT_LE(f.end, 2700.0);
    EXPECT_LT(f.start, f.end);
    EXPECT_DOUBLE_EQ(f.RateAt(f.start), 40.0);
    EXPECT_DOUBLE_EQ(f.RateAt(f.end), 300.0);
    double prev = 0;
    for (int i = 0; i <= 50; ++i) {
      const double r = f.RateAt(f.start + (f.end - f.start) * i / 50.0);
      EXPECT_GE(r, prev);
      EXPECT_GE(r, 40.0);
      EXPECT_LE(r, 300.0);
      prev = r;
    }
  }
  EXPECT_EQ(attacks, 7);
}

TEST(FlowScheduleTest, ZeroGroupsRejectedWhenBotsAttack) {
  ScenarioConfig c;
  const NetworkTopology topo = BuildTopology(c.topology, 25);
  const auto vs = AssignBots(MakeVehicles(c, topo), 2, 1);
  c.bot_groups = 0;
  EXPECT_THROW(GenerateFlowSchedule(c, vs, topo), ConfigError);
  c.attack_window.reset();
  EXPECT_NO_THROW(GenerateFlowSchedule(c, vs, topo));
}

TEST(FlowSpecTest, VolumeIntegratesLinearRate) {
  FlowSpec f;
  f.start = 10;
  f.end = 20;
  f.rate = {40, 300};
  EXPECT_DOUBLE_EQ(f.Volume(0, 100), 10 * 170.0);
  EXPECT_DOUBLE_EQ(f.Volume(10, 15), 5 * (40 + 170) / 2.0);
  EXPECT_EQ(f.Volume(20, 30), 0.0);
}

TEST(ImpairmentTest, StandingVehicleNeverImpaired) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const ImpairmentOutcome o = ConnectionImpairment(0.0, 0.004, 0.5, rng);
    EXPECT_FALSE(o.dropped);
    EXPECT_EQ(o.delay_jitter, 0.0);
  }
}

TEST(ImpairmentTest, ClampedProbabilityAlwaysDrops) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(ConnectionImpairment(300, 0.004, 0.5, rng).dropped);
}

TEST(ImpairmentTest, EmpiricalDropRateAndJitterBounds) {
  Rng rng(3);
  int drops = 0;
  const double speed = 50, coef = 0.004;  // p = 0.2
  for (int i = 0; i < 10000; ++i) {
    const ImpairmentOutcome o = ConnectionImpairment(speed, coef, 0.5, rng);
    drops += o.dropped;
    if (!o.dropped) {
      EXPECT_GE(o.delay_jitter, 0.0);
      EXPECT_LE(o.delay_jitter, coef * speed * 0.5);
    }
  }
  EXPECT_NEAR(drops / 10000.0, 0.2, 0.02);
}

TEST(ImpairmentTest, FasterNeverDropsLessOnSameDraws) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    bool prev = false;
    for (double speed = 0; speed <= 300; speed += 10) {
      Rng rng(s);
      const bool dropped = ConnectionImpairment(speed, 0.004, 0.5, rng).dropped;
      EXPECT_TRUE(dropped || !prev);
      prev = dropped;
    }
  }
}

TEST(RunScenarioTest, DefaultEmits7200Samples) {
  const std::vector<TrafficSample> s = RunScenario(ScenarioConfig{});
  ASSERT_EQ(s.size(), 7200u);
  EXPECT_EQ(s.back().timestamp, 3599.5);
  for (const TrafficSample& x : s) ASSERT_EQ(x.per_link.size(), 25u);
}

TEST(RunScenarioTest, ZeroVehiclesGiveSilentNormalSamples) {
  ScenarioConfig c = Small();
  c.n_vehicles = 0;
  c.n_bots = 0;
  c.attack_window.reset();
  for (const TrafficSample& s : RunScenario(c)) {
    EXPECT_FALSE(s.attack);
    for (const LinkObservation& o : s.per_link) {
      EXPECT_EQ(o.flow_count, 0);
      EXPECT_EQ(o.aggregate_size, 0.0);
    }
  }
}

TEST(RunScenarioTest, SingleStationaryFlowOnKnownPath) {
  ScenarioConfig c = Small();
  c.n_vehicles = 1;
  c.n_bots = 0;
  c.speed_min = c.speed_max = 0.0;
  c.attack_window.reset();
  const ScenarioRun run = SimulateScenario(c);
  ASSERT_EQ(run.flows.size(), 1u);
  const FlowSpec& f = run.flows[0];
  const std::vector<LinkId> path = RouteFlow(run.topology, run.vehicles[0].attached_rsu, f.dst);
  const double per_interval = f.rate.start_rate * c.sample_interval;
  for (const TrafficSample& s : run.samples) {
    for (std::size_t i = 0; i < s.per_link.size(); ++i) {
      const bool on_path =
          std::count(path.begin(), path.end(), run.topology.monitored_links[i]) == 1;
      EXPECT_EQ(s.per_link[i].flow_count, on_path ? 1 : 0);
      if (on_path) {
        EXPECT_NEAR(s.per_link[i].aggregate_size, per_interval, 1e-12 * per_interval);
      } else {
        EXPECT_EQ(s.per_link[i].aggregate_size, 0.0);
      }
    }
  }
}

TEST(RunScenarioTest, LabelsFollowAttackWindowOverlap) {
  ScenarioConfig c = Small();
  c.sample_interval = 0.75;
  c.attack_window = TimeWindow{30.2, 61.0};
  for (const TrafficSample& s : RunScenario(c)) {
    const double t0 = s.timestamp, t1 = s.timestamp + 0.75;
    EXPECT_EQ(s.attack, t0 < 61.0 && t1 > 30.2) << t0;
  }
}

TEST(RunScenarioTest, DeterministicPerSeed) {
  ScenarioConfig c = Small();
  c.speed_min = 10;
  c.speed_max = 40;
  EXPECT_EQ(RunScenario(c), RunScenario(c));
  ScenarioConfig d = c;
  d.seed = 2;
  EXPECT_NE(RunScenario(c), RunScenario(d));
}

TEST(RunScenarioTest, ZeroFlowsMeansZeroSize) {
  ScenarioConfig c = Small();
  c.speed_min = 20;
  c.speed_max = 60;
  for (const TrafficSample& s : RunScenario(c)) {
    for (const LinkObservation& o : s.per_link) {
      EXPECT_GE(o.flow_count, 0);
      EXPECT_GE(o.aggregate_size, 0.0);
      if (o.flow_count == 0) {
        EXPECT_EQ(o.aggregate_size, 0.0);
      }
    }
  }
}

TEST(RunScenarioTest, AttackOnlyAddsTraffic) {
  ScenarioConfig attack = Small();
  attack.speed_max = 30;
  ScenarioConfig normal = attack;
  normal.attack_window.reset();
  const auto a = RunScenario(attack), n = RunScenario(normal);
  bool pivotal_grew = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].per_link.size(); ++i) {
      EXPECT_GE(a[k].per_link[i].aggregate_size, n[k].per_link[i].aggregate_size);
      EXPECT_GE(a[k].per_link[i].flow_count, n[k].per_link[i].flow_count);
    }
    if (a[k].attack && a[k].per_link[0].aggregate_size > n[k].per_link[0].aggregate_size) {
      pivotal_grew = true;
    }
    if (!a[k].attack && a[k].timestamp + 0.5 < 30.0) {
      EXPECT_EQ(a[k], n[k]);
    }
  }
  EXPECT_TRUE(pivotal_grew);
}

}  // namespace
}  // namespace crossfire::sim
