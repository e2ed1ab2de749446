#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace anoncomp {

using NodeId = std::size_t;

/// Port numbers are 1-based; 0 never names a port and is used by protocols
/// to mean "this node itself".
using Port = std::size_t;
inline constexpr Port kSelf = 0;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One outgoing port: the neighbor it leads to, and the port number the same
/// edge carries at that neighbor.
struct PortEdge {
  NodeId neighbor = 0;
  Port reverse = 0;
  auto operator<=>(const PortEdge&) const = default;
};

/// Bidirectional, connected graph with a private port numbering at every node.
/// Construction validates reverse-port consistency and connectivity.
class PortLabeledGraph {
 public:
  PortLabeledGraph() = default;
  explicit PortLabeledGraph(std::vector<std::vector<PortEdge>> adjacency);

  std::size_t size() const { return adjacency_.size(); }
  std::size_t degree(NodeId node) const { return adjacency_[node].size(); }
  std::size_t max_degree() const;
  std::size_t port_count() const;

  std::span<const PortEdge> ports(NodeId node) const { return adjacency_[node]; }
  const PortEdge& at(NodeId node, Port port) const { return adjacency_[node][port - 1]; }
  NodeId neighbor(NodeId node, Port port) const { return at(node, port).neighbor; }

  bool operator==(const PortLabeledGraph&) const = default;

 private:
  std::vector<std::vector<PortEdge>> adjacency_;
};

/// Undirected edge for explicit construction. Ports are either all zero
/// (assigned automatically) or all given.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  Port port_a = 0;
  Port port_b = 0;
};

/// Node i's port 1 leads to i-1 and port 2 to i+1 (mod n). ring(2) has two
/// parallel edges so that every node keeps degree 2.
PortLabeledGraph ring(std::size_t n);
PortLabeledGraph complete(std::size_t n);
PortLabeledGraph path(std::size_t n);
/// Node 0 is the center.
PortLabeledGraph star(std::size_t leaves);
/// Random spanning tree plus up to `extra_edges` distinct extra edges.
PortLabeledGraph random_connected(std::size_t n, std::size_t extra_edges, std::uint64_t seed);
/// Ports default to ascending neighbor order (ties kept in edge order).
PortLabeledGraph from_edges(std::size_t n, std::span<const Edge> edges);

/// Moves node i to perm[i], keeping every port label attached to its edge.
PortLabeledGraph apply_isomorphism(const PortLabeledGraph& graph, std::span<const NodeId> perm);

std::size_t diameter(const PortLabeledGraph& graph);

/// Port table, one line per node: "i: j/r j/r ...".
std::string to_text(const PortLabeledGraph& graph);

}  // namespace anoncomp
