#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "critnode/dsl.hpp"
#include "critnode/graph.hpp"

namespace critnode {

using ScoreVector = std::vector<double>;

/// Every intermediate value is clamped to [-kValueBound, kValueBound] and
/// NaN maps to 0. The bound leaves headroom for exact neighbor sums.
inline constexpr double kValueBound = 1e300;

/// The raw graph vector behind one DSL metric, computed from scratch.
std::vector<double> compute_metric(const Graph& g, dsl::Metric metric, int k = 0);

/// Per-graph memo of metric vectors. Safe for concurrent use.
class MetricCache {
 public:
  explicit MetricCache(const Graph& g) : graph_(&g) {}

  const Graph& graph() const { return *graph_; }
  std::shared_ptr<const std::vector<double>> get(dsl::Metric metric, int k = 0);

 private:
  const Graph* graph_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::shared_ptr<const std::vector<double>>> entries_;
};

/// Vector semantics: metrics broadcast per node, constants broadcast,
/// operators apply elementwise, nsum/nmean/nmax aggregate over neighbors.
/// Evaluation is total: it never fails and every entry is finite.
/// Throws std::invalid_argument on an empty graph.
ScoreVector evaluate(const dsl::Expr& e, MetricCache& cache);
ScoreVector evaluate(const dsl::Expr& e, const Graph& g);

/// Same semantics with no memoization; exists so tests can confirm caching
/// is invisible.
ScoreVector evaluate_uncached(const dsl::Expr& e, const Graph& g);

}  // namespace critnode
