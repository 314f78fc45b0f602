#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace critnode {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected simple graph in compressed adjacency (CSR) form.
///
/// Nodes are dense indices 0..V-1. Each neighbor list is sorted ascending
/// and free of duplicates and self-loops; adjacency is symmetric. The
/// original node identifiers survive only as `labels()`, for reports.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph over `node_count` nodes. Edge direction is ignored,
  /// duplicate edges are merged and self-loops dropped. Labels default to
  /// the decimal index when `labels` is empty.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          std::vector<std::string> labels = {});

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId v) const { return labels_[v]; }

  /// Every edge once, as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  /// Relabels nodes: node v of this graph becomes node perm[v] of the
  /// result. perm must be a permutation of 0..V-1.
  Graph permuted(std::span<const NodeId> perm) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<std::string> labels_;
};

/// Removed-node flags for one graph; represents G \ {v1..vk}.
class NodeMask {
 public:
  NodeMask() = default;
  explicit NodeMask(std::size_t node_count) : removed_(node_count, 0) {}

  std::size_t size() const { return removed_.size(); }
  bool removed(NodeId v) const { return removed_[v] != 0; }
  bool alive(NodeId v) const { return removed_[v] == 0; }
  void remove(NodeId v) { removed_[v] = 1; }
  void restore(NodeId v) { removed_[v] = 0; }
  std::size_t surviving_count() const;

 private:
  std::vector<unsigned char> removed_;
};

class GraphParseError : public std::runtime_error {
 public:
  GraphParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a whitespace-separated edge list. Lines starting with '#' or '%'
/// are comments; tokens past the first two on a line are ignored. Labels are
/// assigned in order of first appearance.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

/// Writes one "u v" line per edge using node labels.
void write_edge_list(std::ostream& out, const Graph& g);

/// Barabási–Albert preferential attachment. The seed graph is a star on
/// m+1 nodes (node 0 is the hub); every later node links to m distinct
/// existing nodes chosen with probability proportional to degree.
/// Yields m + (n-m-1)*m edges. Throws std::invalid_argument unless n > m >= 1.
Graph generate_ba(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace critnode
