#pragma once

#include <cstdint>
#include <vector>

#include "critnode/graph.hpp"

namespace critnode {

// All centralities here are pure functions of graph structure. Floating
// accumulations go through ExactSum, so relabeling the nodes permutes the
// outputs bit-for-bit.

/// Brandes betweenness on unweighted shortest paths. Each unordered pair is
/// counted once, endpoints excluded, no normalization.
std::vector<double> betweenness(const Graph& g);

/// Harmonic closeness: sum over reachable u != v of 1 / d(v, u).
std::vector<double> harmonic_closeness(const Graph& g);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-9;
  int max_iter = 100;
};

/// Power iteration for the random walk with uniform teleport. Mass on
/// degree-0 nodes is spread uniformly. Stops once the L1 change drops below
/// tol or after max_iter sweeps.
std::vector<double> pagerank(const Graph& g, const PageRankOptions& opts = {});

struct EigenvectorOptions {
  double tol = 1e-9;
  int max_iter = 1000;
};

/// Leading eigenvector of the adjacency matrix by power iteration on
/// (A + I) starting from the uniform unit vector. The identity shift keeps
/// the iteration from oscillating on bipartite graphs and leaves the
/// eigenvector unchanged. Entries are non-negative with unit L2 norm.
std::vector<double> eigenvector_centrality(const Graph& g, const EigenvectorOptions& opts = {});

/// Per node, the number of distinct nodes at hop distance 1..k.
std::vector<std::uint32_t> khop_counts(const Graph& g, int k);

/// Local clustering coefficient 2T(v) / (d(d-1)); 0 when d < 2.
std::vector<double> clustering_coefficients(const Graph& g);

}  // namespace critnode
