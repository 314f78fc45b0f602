#include "critnode/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "critnode/connectivity.hpp"

namespace critnode {

std::string_view name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::dc: return "dc";
    case BaselineKind::corehd: return "corehd";
    case BaselineKind::wn: return "wn";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline_kind(std::string_view text) {
  if (text == "dc") return BaselineKind::dc;
  if (text == "corehd") return BaselineKind::corehd;
  if (text == "wn") return BaselineKind::wn;
  return std::nullopt;
}

namespace {

NodeId max_degree_node(const std::vector<std::uint32_t>& deg, const NodeMask& mask) {
  NodeId best = std::numeric_limits<NodeId>::max();
  for (NodeId v = 0; v < deg.size(); ++v) {
    if (mask.alive(v) && (best == std::numeric_limits<NodeId>::max() || deg[v] > deg[best])) best = v;
  }
  return best;
}

}  // namespace

NodeId BaselineStrategy::next_node(const Graph& g, const NodeMask& mask) {
  if (mask.surviving_count() == 0) throw std::invalid_argument("no surviving nodes");
  const std::vector<std::uint32_t> deg = degrees(g, mask);
  if (kind_ == BaselineKind::dc) return max_degree_node(deg, mask);

  const std::vector<std::uint32_t> core = core_decomposition(g, mask);
  std::uint32_t top = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (mask.alive(v)) top = std::max(top, core[v]);
  }
  if (top <= 1) return max_degree_node(deg, mask);

  // Degrees inside the induced subgraph of the top core.
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> core_deg(n, 0);
  auto in_top = [&](NodeId v) { return mask.alive(v) && core[v] == top; };
  std::uint32_t best_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (!in_top(v)) continue;
    for (NodeId w : g.neighbors(v)) core_deg[v] += in_top(w) ? 1 : 0;
    best_deg = std::max(best_deg, core_deg[v]);
  }
  std::vector<NodeId> tied;
  for (NodeId v = 0; v < n; ++v) {
    if (in_top(v) && core_deg[v] == best_deg) tied.push_back(v);
  }

  if (kind_ == BaselineKind::corehd) return tied[rng_.uniform_index(tied.size())];

  NodeId pick = tied.front();
  std::uint32_t pick_weakest = std::numeric_limits<std::uint32_t>::max();
  for (NodeId v : tied) {
    std::uint32_t weakest = std::numeric_limits<std::uint32_t>::max();
    for (NodeId w : g.neighbors(v)) {
      if (in_top(w)) weakest = std::min(weakest, core_deg[w]);
    }
    if (weakest < pick_weakest) {
      pick = v;
      pick_weakest = weakest;
    }
  }
  return pick;
}

BaselineResult run_baseline(BaselineStrategy strategy, const Graph& g, double fraction) {
  BaselineResult result;
  result.removal = dismantle_adaptive(
      g, [&](const Graph& graph, const NodeMask& mask) { return strategy.next_node(graph, mask); },
      fraction);
  result.curve = anc(g, result.removal);
  return result;
}

}  // namespace critnode
