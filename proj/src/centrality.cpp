#include "critnode/centrality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "critnode/exact_sum.hpp"

namespace critnode {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// BFS from `source`; fills dist (kUnreached elsewhere) and the visit order.
void bfs(const Graph& g, NodeId source, std::vector<std::uint32_t>& dist,
         std::vector<NodeId>& order) {
  std::fill(dist.begin(), dist.end(), kUnreached);
  order.clear();
  dist[source] = 0;
  order.push_back(source);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId v = order[head];
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        order.push_back(w);
      }
    }
  }
}

}  // namespace

std::vector<double> betweenness(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<ExactSum> total(n);
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> order;
  std::vector<double> paths(n), delta(n);
  ExactSum acc;

  for (NodeId s = 0; s < n; ++s) {
    bfs(g, s, dist, order);
    // Shortest-path counts, pulled from predecessors.
    paths[s] = 1.0;
    for (std::size_t i = 1; i < order.size(); ++i) {
      const NodeId v = order[i];
      acc.clear();
      for (NodeId u : g.neighbors(v)) {
        if (dist[u] + 1 == dist[v]) acc.add(paths[u]);
      }
      paths[v] = acc.value();
    }
    // Dependencies, pulled from successors in reverse BFS order.
    for (std::size_t i = order.size(); i-- > 0;) {
      const NodeId v = order[i];
      acc.clear();
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] == dist[v] + 1) acc.add(paths[v] / paths[w] * (1.0 + delta[w]));
      }
      delta[v] = acc.value();
      if (v != s) total[v].add(delta[v]);
    }
  }

  std::vector<double> out(n);
  for (NodeId v = 0; v < n; ++v) out[v] = total[v].value() / 2.0;
  return out;
}

std::vector<double> harmonic_closeness(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> order;
  std::vector<std::size_t> at_distance;

  for (NodeId v = 0; v < n; ++v) {
    bfs(g, v, dist, order);
    at_distance.assign(dist[order.back()] + 1, 0);
    for (NodeId u : order) ++at_distance[dist[u]];
    double sum = 0.0;
    for (std::size_t d = 1; d < at_distance.size(); ++d) {
      sum += static_cast<double>(at_distance[d]) / static_cast<double>(d);
    }
    out[v] = sum;
  }
  return out;
}

std::vector<double> pagerank(const Graph& g, const PageRankOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) {
    throw std::invalid_argument("pagerank damping must lie in (0, 1)");
  }
  const std::size_t n = g.node_count();
  if (n == 0) return {};
  const double nd = static_cast<double>(n);
  std::vector<double> x(n, 1.0 / nd), next(n);
  ExactSum acc;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    acc.clear();
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) == 0) acc.add(x[v]);
    }
    const double dangling = acc.value();
    for (NodeId v = 0; v < n; ++v) {
      acc.clear();
      for (NodeId u : g.neighbors(v)) acc.add(x[u] / static_cast<double>(g.degree(u)));
      next[v] = (1.0 - opts.damping) / nd + opts.damping * (acc.value() + dangling / nd);
    }
    acc.clear();
    for (NodeId v = 0; v < n; ++v) acc.add(std::fabs(next[v] - x[v]));
    x.swap(next);
    if (acc.value() < opts.tol) break;
  }
  return x;
}

std::vector<double> eigenvector_centrality(const Graph& g, const EigenvectorOptions& opts) {
  const std::size_t n = g.node_count();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  ExactSum acc;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    for (NodeId v = 0; v < n; ++v) {
      acc.clear();
      acc.add(x[v]);
      for (NodeId u : g.neighbors(v)) acc.add(x[u]);
      next[v] = acc.value();
    }
    acc.clear();
    for (double y : next) acc.add(y * y);
    const double norm = std::sqrt(acc.value());
    if (norm == 0.0) break;
    for (double& y : next) y /= norm;

    acc.clear();
    for (NodeId v = 0; v < n; ++v) acc.add((next[v] - x[v]) * (next[v] - x[v]));
    x.swap(next);
    if (std::sqrt(acc.value()) < opts.tol) break;
  }
  return x;
}

std::vector<std::uint32_t> khop_counts(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("khop_counts requires k >= 1");
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> out(n, 0);
  // Visit stamps avoid clearing a visited array per source.
  std::vector<NodeId> stamp(n, kUnreached);
  std::vector<NodeId> frontier, next;

  for (NodeId v = 0; v < n; ++v) {
    stamp[v] = v;
    frontier.assign(1, v);
    std::uint32_t count = 0;
    for (int hop = 0; hop < k && !frontier.empty(); ++hop) {
      next.clear();
      for (NodeId u : frontier) {
        for (NodeId w : g.neighbors(u)) {
          if (stamp[w] != v) {
            stamp[w] = v;
            next.push_back(w);
          }
        }
      }
      count += static_cast<std::uint32_t>(next.size());
      frontier.swap(next);
    }
    out[v] = count;
  }
  return out;
}

std::vector<double> clustering_coefficients(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t d = g.degree(v);
    if (d < 2) continue;
    auto nv = g.neighbors(v);
    // Each triangle through v is seen twice (once from each other corner).
    std::uint64_t twice_triangles = 0;
    for (NodeId u : nv) {
      auto nu = g.neighbors(u);
      auto a = nv.begin();
      auto b = nu.begin();
      while (a != nv.end() && b != nu.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++twice_triangles;
          ++a;
          ++b;
        }
      }
    }
    out[v] = static_cast<double>(twice_triangles) / static_cast<double>(d * (d - 1));
  }
  return out;
}

}  // namespace critnode
