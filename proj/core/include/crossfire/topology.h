#ifndef CROSSFIRE_TOPOLOGY_H
#define CROSSFIRE_TOPOLOGY_H

#include <cstddef>
#include <utility>
#include <vector>

namespace crossfire::sim {

using NodeId = int;
using LinkId = int;

enum class NodeKind { kRsu, kSwitch, kVictimServer, kDecoyServer };

struct Link {
  LinkId id = 0;
  std::pair<NodeId, NodeId> endpoints;
  double capacity_kbps = 0.0;
  bool is_pivotal = false;

  NodeId Other(NodeId n) const {
    return n == endpoints.first ? endpoints.second : endpoints.first;
  }

  bool operator==(const Link&) const = default;
};

// Parameters of the generated ITS core. The defaults give exactly 25 links.
struct TopologyParams {
  int n_rsus = 4;
  // The last switch is the gateway of the target region; the others are
  // access switches every RSU uplinks to.
  int n_switches = 3;
  int n_victim_servers = 2;
  int n_decoy_servers = 3;

  bool operator==(const TopologyParams&) const = default;
};

// RSUs, switches and servers joined by undirected links. Node ids are dense:
// RSUs first, then switches, victim servers and decoy servers.
struct NetworkTopology {
  std::vector<NodeKind> nodes;
  std::vector<NodeId> rsus;
  std::vector<NodeId> switches;
  std::vector<NodeId> victim_servers;
  std::vector<NodeId> decoy_servers;
  std::vector<Link> links;
  std::vector<LinkId> pivotal_links;
  // Links whose features are reported, pivotal ones first.
  std::vector<LinkId> monitored_links;
  std::vector<std::vector<LinkId>> adjacency;

  std::size_t node_count() const { return nodes.size(); }
  std::vector<NodeId> Servers() const;

  bool operator==(const NetworkTopology&) const = default;
};

// Generated layout (R RSUs, A = n_switches - 1 access switches, one gateway):
//   RSU ring, every RSU to every access switch, access switches fully meshed,
//   every access switch to the gateway (the pivotal cut), every server to the
//   gateway, and a ring among the servers behind the gateway.
// Monitored links: pivotal links first, then the remaining links by endpoint
// degree (descending), ties by id. Throws ConfigError when n_monitored_links
// exceeds the link count or a count parameter is out of range.
NetworkTopology BuildTopology(const TopologyParams& params,
                              std::size_t n_monitored_links);

// Hop-count shortest path from `src` to `dst` as link ids; ties go to the
// lexicographically smallest link-id sequence. Throws RoutingError when `dst`
// is unreachable and ConfigError for unknown nodes.
std::vector<LinkId> RouteFlow(const NetworkTopology& topology, NodeId src,
                              NodeId dst);

// Nodes reachable from `start` when the links in `removed` are cut.
std::vector<bool> Reachable(const NetworkTopology& topology, NodeId start,
                            const std::vector<LinkId>& removed = {});

}  // namespace crossfire::sim

#endif  // CROSSFIRE_TOPOLOGY_H
