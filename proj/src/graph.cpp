#include "anoncomp/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "anoncomp/detail/random.hpp"

namespace anoncomp {

namespace {

std::string where(NodeId node, Port port) {
  return "node " + std::to_string(node) + " port " + std::to_string(port);
}

std::vector<std::size_t> bfs_distances(const PortLabeledGraph& graph, NodeId source) {
  constexpr auto unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(graph.size(), unseen);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId node = frontier.front();
    frontier.pop();
    for (const auto& edge : graph.ports(node)) {
      if (dist[edge.neighbor] == unseen) {
        dist[edge.neighbor] = dist[node] + 1;
        frontier.push(edge.neighbor);
      }
    }
  }
  return dist;
}

}  // namespace

PortLabeledGraph::PortLabeledGraph(std::vector<std::vector<PortEdge>> adjacency)
    : adjacency_(std::move(adjacency)) {
  const std::size_t n = adjacency_.size();
  if (n == 0) throw GraphError("graph has no nodes");
  for (NodeId i = 0; i < n; ++i) {
    for (Port k = 1; k <= adjacency_[i].size(); ++k) {
      const PortEdge& edge = adjacency_[i][k - 1];
      if (edge.neighbor >= n) {
        throw GraphError(where(i, k) + " leads to unknown node " + std::to_string(edge.neighbor));
      }
      if (edge.neighbor == i) throw GraphError(where(i, k) + " is a self-loop");
      const auto& back = adjacency_[edge.neighbor];
      if (edge.reverse < 1 || edge.reverse > back.size()) {
        throw GraphError(where(i, k) + " names reverse port " + std::to_string(edge.reverse) +
                         " but node " + std::to_string(edge.neighbor) + " has degree " +
                         std::to_string(back.size()));
      }
      const PortEdge& mirror = back[edge.reverse - 1];
      if (mirror.neighbor != i || mirror.reverse != k) {
        throw GraphError(where(i, k) + " is inconsistent with " + where(edge.neighbor, edge.reverse));
      }
    }
  }
  const auto dist = bfs_distances(*this, 0);
  for (NodeId i = 0; i < n; ++i) {
    if (dist[i] == static_cast<std::size_t>(-1)) {
      throw GraphError("graph is disconnected: node " + std::to_string(i) + " unreachable from node 0");
    }
  }
}

std::size_t PortLabeledGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& ports : adjacency_) best = std::max(best, ports.size());
  return best;
}

std::size_t PortLabeledGraph::port_count() const {
  std::size_t total = 0;
  for (const auto& ports : adjacency_) total += ports.size();
  return total;
}

PortLabeledGraph ring(std::size_t n) {
  if (n < 2) throw GraphError("ring needs at least 2 nodes");
  std::vector<std::vector<PortEdge>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    adj[i] = {PortEdge{(i + n - 1) % n, 2}, PortEdge{(i + 1) % n, 1}};
  }
  return PortLabeledGraph(std::move(adj));
}

PortLabeledGraph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return from_edges(n, edges);
}

PortLabeledGraph path(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return from_edges(n, edges);
}

PortLabeledGraph star(std::size_t leaves) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return from_edges(leaves + 1, edges);
}

PortLabeledGraph random_connected(std::size_t n, std::size_t extra_edges, std::uint64_t seed) {
  if (n == 0) throw GraphError("graph has no nodes");
  std::mt19937_64 rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  detail::shuffle(order, rng);

  std::set<std::pair<NodeId, NodeId>> present;
  std::vector<Edge> edges;
  auto add = [&](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    present.emplace(a, b);
    edges.push_back({a, b});
  };
  for (std::size_t idx = 1; idx < n; ++idx) {
    add(order[idx], order[detail::uniform_below(rng, idx)]);
  }

  std::vector<std::pair<NodeId, NodeId>> candidates;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (!present.contains({a, b})) candidates.emplace_back(a, b);
    }
  }
  detail::shuffle(candidates, rng);
  const std::size_t extra = std::min(extra_edges, candidates.size());
  for (std::size_t idx = 0; idx < extra; ++idx) add(candidates[idx].first, candidates[idx].second);
  return from_edges(n, edges);
}

PortLabeledGraph from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw GraphError("graph has no nodes");
  const bool explicit_ports =
      std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.port_a != 0 || e.port_b != 0; });
  for (const Edge& e : edges) {
    if (e.a >= n || e.b >= n) {
      throw GraphError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " names a node outside 0.." +
                       std::to_string(n - 1));
    }
    if (e.a == e.b) throw GraphError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " is a self-loop");
    if (explicit_ports && (e.port_a == 0 || e.port_b == 0)) {
      throw GraphError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                       " lacks ports while other edges specify them");
    }
  }

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  std::vector<std::vector<PortEdge>> adj(n);
  for (NodeId i = 0; i < n; ++i) adj[i].resize(degree[i]);

  if (explicit_ports) {
    for (const Edge& e : edges) {
      auto place = [&](NodeId node, Port port, NodeId other, Port reverse) {
        if (port > degree[node]) {
          throw GraphError(where(node, port) + " exceeds its degree " + std::to_string(degree[node]));
        }
        if (adj[node][port - 1].reverse != 0) throw GraphError(where(node, port) + " is assigned twice");
        adj[node][port - 1] = PortEdge{other, reverse};
      };
      place(e.a, e.port_a, e.b, e.port_b);
      place(e.b, e.port_b, e.a, e.port_a);
    }
    return PortLabeledGraph(std::move(adj));
  }

  // Ascending neighbor order; stable so parallel edges keep their listed order.
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> incident(n);
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    incident[edges[idx].a].emplace_back(edges[idx].b, idx);
    incident[edges[idx].b].emplace_back(edges[idx].a, idx);
  }
  std::vector<Port> port_a(edges.size()), port_b(edges.size());
  for (NodeId i = 0; i < n; ++i) {
    std::stable_sort(incident[i].begin(), incident[i].end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t k = 0; k < incident[i].size(); ++k) {
      const std::size_t idx = incident[i][k].second;
      if (edges[idx].a == i) {
        port_a[idx] = k + 1;
      } else {
        port_b[idx] = k + 1;
      }
    }
  }
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const Edge& e = edges[idx];
    adj[e.a][port_a[idx] - 1] = PortEdge{e.b, port_b[idx]};
    adj[e.b][port_b[idx] - 1] = PortEdge{e.a, port_a[idx]};
  }
  return PortLabeledGraph(std::move(adj));
}

PortLabeledGraph apply_isomorphism(const PortLabeledGraph& graph, std::span<const NodeId> perm) {
  const std::size_t n = graph.size();
  if (perm.size() != n) throw GraphError("permutation size does not match node count");
  std::vector<bool> seen(n, false);
  for (NodeId target : perm) {
    if (target >= n || seen[target]) throw GraphError("not a permutation of the node set");
    seen[target] = true;
  }
  std::vector<std::vector<PortEdge>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    auto& ports = adj[perm[i]];
    for (const PortEdge& edge : graph.ports(i)) ports.push_back({perm[edge.neighbor], edge.reverse});
  }
  return PortLabeledGraph(std::move(adj));
}

std::size_t diameter(const PortLabeledGraph& graph) {
  std::size_t best = 0;
  for (NodeId i = 0; i < graph.size(); ++i) {
    const auto dist = bfs_distances(graph, i);
    best = std::max(best, *std::max_element(dist.begin(), dist.end()));
  }
  return best;
}

std::string to_text(const PortLabeledGraph& graph) {
  std::ostringstream out;
  for (NodeId i = 0; i < graph.size(); ++i) {
    out << i << ':';
    for (const auto& edge : graph.ports(i)) out << ' ' << edge.neighbor << '/' << edge.reverse;
    out << '\n';
  }
  return out.str();
}

}  // namespace anoncomp
