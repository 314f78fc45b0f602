#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "critnode/dsl.hpp"
#include "critnode/evaluate.hpp"
#include "critnode/graph.hpp"

namespace critnode {

/// Ordered, duplicate-free removal sequence v_1..v_L.
using RemovalList = std::vector<NodeId>;

/// Normalization of the accumulated connectivity: by the number of removals
/// (default) or by the total node count.
enum class AncNormalization { removal_count, node_count };

enum class FitnessMode { anc, terminal };

/// Connectivity trace of one removal sequence.
struct AncCurve {
  std::uint64_t sigma0 = 0;
  /// sigma(G \ {v_1..v_k}) / sigma(G) for k = 1..L.
  std::vector<double> ratios;
  AncNormalization normalization = AncNormalization::removal_count;
  std::size_t node_count = 0;

  /// The ANC value R.
  double value() const;
  /// Final ratio sigma(G \ removal) / sigma(G).
  double terminal_ratio() const { return ratios.empty() ? 1.0 : ratios.back(); }
};

class UndefinedConnectivityError : public std::domain_error {
 public:
  UndefinedConnectivityError()
      : std::domain_error("pairwise connectivity of the intact graph is zero") {}
};

/// Nodes by score descending, ties by ascending index; the first l.
/// Throws std::out_of_range unless 1 <= l <= V.
RemovalList top_l_by_score(std::span<const double> scores, std::size_t l);

/// Number of removals for a budget fraction: round-half-up of fraction*V,
/// clamped to [1, V-1]. Throws std::invalid_argument unless 0 < fraction < 1.
std::size_t removal_count(std::size_t node_count, double fraction);

/// Removes nodes in order and records the normalized pairwise connectivity
/// after each step. Exact: connectivity is tracked with integer arithmetic by
/// re-inserting nodes in reverse order into a union-find.
AncCurve anc(const Graph& g, std::span<const NodeId> removal,
             AncNormalization normalization = AncNormalization::removal_count);

/// Fitness of a scoring expression: score once, remove the top L, and
/// return 1 - ANC (anc mode) or 1 - final ratio (terminal mode).
double fitness(const Graph& g, const dsl::Expr& e, double fraction,
               FitnessMode mode = FitnessMode::anc);
double fitness(MetricCache& cache, const dsl::Expr& e, double fraction,
               FitnessMode mode = FitnessMode::anc,
               AncNormalization normalization = AncNormalization::removal_count);

/// Picks the next node to remove from the surviving graph.
using NextNodeFn = std::function<NodeId(const Graph&, const NodeMask&)>;

/// Adaptive dismantling: asks `next` for a node on the surviving graph,
/// removes it, and repeats until removal_count(V, fraction) nodes are gone.
RemovalList dismantle_adaptive(const Graph& g, const NextNodeFn& next, double fraction);

/// CSV with header `k,sigma_ratio`, one row per removal step.
void write_anc_csv(std::ostream& out, const AncCurve& curve);
/// One node label per line.
void write_removal_list(std::ostream& out, const Graph& g, std::span<const NodeId> removal);

}  // namespace critnode
