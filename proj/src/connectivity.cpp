#include "critnode/connectivity.hpp"

#include <algorithm>
#include <stdexcept>

namespace critnode {

namespace {

void check_mask(const Graph& g, const NodeMask& mask) {
  if (mask.size() != g.node_count()) throw std::invalid_argument("mask size does not match graph");
}

}  // namespace

ComponentPartition connected_components(const Graph& g, const NodeMask& mask) {
  check_mask(g, mask);
  const std::size_t n = g.node_count();
  ComponentPartition out;
  out.component_id.assign(n, ComponentPartition::kRemoved);

  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (mask.removed(root) || out.component_id[root] != ComponentPartition::kRemoved) continue;
    const auto id = static_cast<std::int32_t>(out.component_sizes.size());
    std::size_t size = 0;
    out.component_id[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId w : g.neighbors(v)) {
        if (mask.alive(w) && out.component_id[w] == ComponentPartition::kRemoved) {
          out.component_id[w] = id;
          stack.push_back(w);
        }
      }
    }
    out.component_sizes.push_back(size);
  }
  return out;
}

std::uint64_t pairwise_connectivity(const Graph& g, const NodeMask& mask) {
  std::uint64_t sigma = 0;
  for (std::size_t size : connected_components(g, mask).component_sizes) {
    const auto s = static_cast<std::uint64_t>(size);
    sigma += s * (s - 1) / 2;
  }
  return sigma;
}

std::uint64_t pairwise_connectivity(const Graph& g) {
  return pairwise_connectivity(g, NodeMask(g.node_count()));
}

std::vector<std::uint32_t> degrees(const Graph& g, const NodeMask& mask) {
  check_mask(g, mask);
  std::vector<std::uint32_t> deg(g.node_count(), 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (mask.removed(v)) continue;
    for (NodeId w : g.neighbors(v)) deg[v] += mask.alive(w) ? 1 : 0;
  }
  return deg;
}

std::vector<std::uint32_t> core_decomposition(const Graph& g, const NodeMask& mask) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> deg = degrees(g, mask);
  const std::uint32_t max_deg = n == 0 ? 0 : *std::max_element(deg.begin(), deg.end());

  // Bucket sort nodes by degree; pos/order give O(1) bucket moves.
  std::vector<std::size_t> bin(max_deg + 2, 0);
  for (NodeId v = 0; v < n; ++v) ++bin[deg[v]];
  std::size_t start = 0;
  for (std::uint32_t d = 0; d <= max_deg; ++d) {
    const std::size_t count = bin[d];
    bin[d] = start;
    start += count;
  }
  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    order[pos[v]] = v;
  }
  for (std::uint32_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  if (!bin.empty()) bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    if (mask.removed(v)) continue;
    for (NodeId u : g.neighbors(v)) {
      if (mask.removed(u) || deg[u] <= deg[v]) continue;
      const std::uint32_t du = deg[u];
      const std::size_t pu = pos[u];
      const std::size_t pw = bin[du];
      const NodeId w = order[pw];
      if (u != w) {
        order[pu] = w;
        pos[w] = pu;
        order[pw] = u;
        pos[u] = pw;
      }
      ++bin[du];
      --deg[u];
    }
  }
  return deg;
}

std::vector<std::uint32_t> core_decomposition(const Graph& g) {
  return core_decomposition(g, NodeMask(g.node_count()));
}

}  // namespace critnode
