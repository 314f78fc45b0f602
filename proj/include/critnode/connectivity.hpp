#pragma once

#include <cstdint>
#include <vector>

#include "critnode/graph.hpp"

namespace critnode {

struct ComponentPartition {
  static constexpr std::int32_t kRemoved = -1;

  /// Component of each node; kRemoved for masked nodes. Ids are numbered in
  /// order of each component's lowest node index.
  std::vector<std::int32_t> component_id;
  std::vector<std::size_t> component_sizes;
};

ComponentPartition connected_components(const Graph& g, const NodeMask& mask);

/// Number of still-connected unordered node pairs:
/// sum over components C of |C|(|C|-1)/2.
std::uint64_t pairwise_connectivity(const Graph& g, const NodeMask& mask);
std::uint64_t pairwise_connectivity(const Graph& g);

/// Degree over surviving neighbors; masked nodes report 0.
std::vector<std::uint32_t> degrees(const Graph& g, const NodeMask& mask);

/// k-core numbers by bucket peeling (Batagelj–Zaversnik). Masked nodes
/// report 0 and do not contribute to neighbor degrees.
std::vector<std::uint32_t> core_decomposition(const Graph& g, const NodeMask& mask);
std::vector<std::uint32_t> core_decomposition(const Graph& g);

}  // namespace critnode
