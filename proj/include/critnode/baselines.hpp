#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "critnode/dismantle.hpp"
#include "critnode/graph.hpp"
#include "critnode/rng.hpp"

namespace critnode {

enum class BaselineKind { dc, corehd, wn };

std::string_view name(BaselineKind kind);
std::optional<BaselineKind> parse_baseline_kind(std::string_view text);

/// Adaptive reference strategies.
///
/// dc:     highest surviving degree, ties by ascending index.
/// corehd: highest degree inside the top k-core of the surviving graph
///         (degree counted within that core), ties broken uniformly at
///         random; plain highest degree once the survivors form a forest.
/// wn:     as corehd, but a degree tie goes to the node whose weakest
///         neighbor (minimum degree, measured the same way) is weakest;
///         remaining ties by ascending index.
class BaselineStrategy {
 public:
  explicit BaselineStrategy(BaselineKind kind, std::uint64_t seed = 0)
      : kind_(kind), rng_(seed) {}

  BaselineKind kind() const { return kind_; }

  /// Throws std::invalid_argument when no node survives.
  NodeId next_node(const Graph& g, const NodeMask& mask);

 private:
  BaselineKind kind_;
  Rng rng_;
};

struct BaselineResult {
  RemovalList removal;
  AncCurve curve;
};

BaselineResult run_baseline(BaselineStrategy strategy, const Graph& g, double fraction);

}  // namespace critnode
