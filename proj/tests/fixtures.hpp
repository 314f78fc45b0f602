#pragma once

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "critnode/graph.hpp"
#include "critnode/rng.hpp"

namespace fixtures {

using critnode::Edge;
using critnode::Graph;
using critnode::NodeId;

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

/// Node 0 is the hub.
inline Graph star(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph::from_edges(n, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

inline Graph from_text(const std::string& text) {
  std::istringstream in(text);
  return critnode::load_edge_list(in);
}

inline std::vector<NodeId> random_permutation(critnode::Rng& rng, std::size_t n) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  return perm;
}

}  // namespace fixtures
