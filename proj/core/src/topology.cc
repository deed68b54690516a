#include "crossfire/topology.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "crossfire/error.h"

namespace crossfire::sim {
namespace {

constexpr double kRsuRingKbps = 10'000.0;
constexpr double kUplinkKbps = 20'000.0;
constexpr double kCoreKbps = 100'000.0;
constexpr double kPivotalKbps = 10'000.0;
constexpr double kServerKbps = 20'000.0;
constexpr double kServerLanKbps = 10'000.0;

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

// Adds links forming a ring (a single link for two nodes, nothing for one).
template <typename AddFn>
void AddRing(const std::vector<NodeId>& ring, double capacity, AddFn add) {
  if (ring.size() == 2) {
    add(ring[0], ring[1], capacity, false);
  } else if (ring.size() > 2) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      add(ring[i], ring[(i + 1) % ring.size()], capacity, false);
    }
  }
}

std::vector<int> Distances(const NetworkTopology& t, NodeId from) {
  std::vector<int> dist(t.node_count(), -1);
  std::deque<NodeId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    for (LinkId l : t.adjacency[n]) {
      const NodeId m = t.links[l].Other(n);
      if (dist[m] < 0) {
        dist[m] = dist[n] + 1;
        queue.push_back(m);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<NodeId> NetworkTopology::Servers() const {
  std::vector<NodeId> out = victim_servers;
  out.insert(out.end(), decoy_servers.begin(), decoy_servers.end());
  return out;
}

NetworkTopology BuildTopology(const TopologyParams& params,
                              std::size_t n_monitored_links) {
  Require(params.n_rsus >= 1, "topology.n_rsus must be >= 1");
  Require(params.n_switches >= 2, "topology.n_switches must be >= 2");
  Require(params.n_victim_servers >= 1, "topology.n_victim_servers must be >= 1");
  Require(params.n_decoy_servers >= 1, "topology.n_decoy_servers must be >= 1");

  NetworkTopology t;
  auto add_nodes = [&t](int count, NodeKind kind, std::vector<NodeId>& ids) {
    for (int i = 0; i < count; ++i) {
      ids.push_back(static_cast<NodeId>(t.nodes.size()));
      t.nodes.push_back(kind);
    }
  };
  add_nodes(params.n_rsus, NodeKind::kRsu, t.rsus);
  add_nodes(params.n_switches, NodeKind::kSwitch, t.switches);
  add_nodes(params.n_victim_servers, NodeKind::kVictimServer, t.victim_servers);
  add_nodes(params.n_decoy_servers, NodeKind::kDecoyServer, t.decoy_servers);
  t.adjacency.resize(t.nodes.size());

  auto add = [&t](NodeId a, NodeId b, double capacity, bool pivotal) {
    Link link{static_cast<LinkId>(t.links.size()), {a, b}, capacity, pivotal};
    t.adjacency[a].push_back(link.id);
    t.adjacency[b].push_back(link.id);
    if (pivotal) t.pivotal_links.push_back(link.id);
    t.links.push_back(link);
  };

  const std::vector<NodeId> access(t.switches.begin(), t.switches.end() - 1);
  const NodeId gateway = t.switches.back();

  AddRing(t.rsus, kRsuRingKbps, add);
  for (NodeId r : t.rsus) {
    for (NodeId s : access) add(r, s, kUplinkKbps, false);
  }
  for (std::size_t i = 0; i < access.size(); ++i) {
    for (std::size_t j = i + 1; j < access.size(); ++j) {
      add(access[i], access[j], kCoreKbps, false);
    }
  }
  for (NodeId s : access) add(s, gateway, kPivotalKbps, true);
  const std::vector<NodeId> servers = t.Servers();
  for (NodeId s : servers) add(s, gateway, kServerKbps, false);
  AddRing(servers, kServerLanKbps, add);

  if (n_monitored_links > t.links.size()) {
    throw ConfigError("n_monitored_links = " + std::to_string(n_monitored_links) +
                      " exceeds the " + std::to_string(t.links.size()) +
                      " links of the topology");
  }
  std::vector<LinkId> rest;
  for (const Link& l : t.links) {
    if (!l.is_pivotal) rest.push_back(l.id);
  }
  auto degree = [&t](LinkId id) {
    const Link& l = t.links[id];
    return t.adjacency[l.endpoints.first].size() +
           t.adjacency[l.endpoints.second].size();
  };
  std::stable_sort(rest.begin(), rest.end(), [&](LinkId a, LinkId b) {
    return degree(a) > degree(b);
  });
  t.monitored_links = t.pivotal_links;
  t.monitored_links.insert(t.monitored_links.end(), rest.begin(), rest.end());
  t.monitored_links.resize(n_monitored_links);
  return t;
}

std::vector<LinkId> RouteFlow(const NetworkTopology& topology, NodeId src,
                              NodeId dst) {
  const auto n = static_cast<NodeId>(topology.node_count());
  if (src < 0 || src >= n || dst < 0 || dst >= n) {
    throw ConfigError("route: unknown node " + std::to_string(src < 0 || src >= n ? src : dst));
  }
  // Distances to dst; walking greedily over the smallest-id link that makes
  // progress yields the lexicographically smallest shortest path.
  const std::vector<int> to_dst = Distances(topology, dst);
  if (to_dst[src] < 0) {
    throw RoutingError("route: node " + std::to_string(dst) +
                       " unreachable from node " + std::to_string(src));
  }
  std::vector<LinkId> path;
  NodeId at = src;
  while (at != dst) {
    LinkId best = std::numeric_limits<LinkId>::max();
    for (LinkId l : topology.adjacency[at]) {
      if (to_dst[topology.links[l].Other(at)] == to_dst[at] - 1) {
        best = std::min(best, l);
      }
    }
    path.push_back(best);
    at = topology.links[best].Other(at);
  }
  return path;
}

std::vector<bool> Reachable(const NetworkTopology& topology, NodeId start,
                            const std::vector<LinkId>& removed) {
  std::vector<bool> cut(topology.links.size(), false);
  for (LinkId l : removed) cut.at(l) = true;
  std::vector<bool> seen(topology.node_count(), false);
  std::deque<NodeId> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    for (LinkId l : topology.adjacency[n]) {
      if (cut[l]) continue;
      const NodeId m = topology.links[l].Other(n);
      if (!seen[m]) {
        seen[m] = true;
        queue.push_back(m);
      }
    }
  }
  return seen;
}

}  // namespace crossfire::sim
