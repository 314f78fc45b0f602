#include "critnode/dismantle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "critnode/connectivity.hpp"

namespace critnode {

namespace {

// Union-find over node indices that keeps sigma = sum C(|C|, 2) current.
class ConnectivityTracker {
 public:
  explicit ConnectivityTracker(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    sigma_ += size_[a] * size_[b];
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::uint64_t sigma() const { return sigma_; }

 private:
  NodeId find(NodeId v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  std::vector<NodeId> parent_;
  std::vector<std::uint64_t> size_;
  std::uint64_t sigma_ = 0;
};

}  // namespace

double AncCurve::value() const {
  if (ratios.empty()) return 0.0;
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const std::size_t denom =
      normalization == AncNormalization::removal_count ? ratios.size() : node_count;
  return sum / static_cast<double>(denom);
}

RemovalList top_l_by_score(std::span<const double> scores, std::size_t l) {
  if (l < 1 || l > scores.size()) {
    throw std::out_of_range("removal count " + std::to_string(l) + " outside [1, " +
                            std::to_string(scores.size()) + "]");
  }
  RemovalList order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l), order.end(),
                    [&](NodeId a, NodeId b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  order.resize(l);
  return order;
}

std::size_t removal_count(std::size_t node_count, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("removal fraction must lie in (0, 1)");
  }
  const auto raw = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(node_count) + 0.5));
  const std::size_t upper = node_count > 1 ? node_count - 1 : 1;
  return std::clamp<std::size_t>(raw, 1, upper);
}

AncCurve anc(const Graph& g, std::span<const NodeId> removal, AncNormalization normalization) {
  if (removal.empty()) throw std::invalid_argument("removal list is empty");
  const std::size_t n = g.node_count();

  std::vector<std::size_t> step(n, SIZE_MAX);  // removal position, SIZE_MAX if kept
  for (std::size_t i = 0; i < removal.size(); ++i) {
    const NodeId v = removal[i];
    if (v >= n) throw std::out_of_range("removal list references a missing node");
    if (step[v] != SIZE_MAX) throw std::invalid_argument("removal list has duplicates");
    step[v] = i;
  }

  // Build the fully dismantled graph, then add nodes back last-removed first.
  ConnectivityTracker tracker(n);
  for (auto [u, v] : g.edges()) {
    if (step[u] == SIZE_MAX && step[v] == SIZE_MAX) tracker.unite(u, v);
  }
  const std::size_t len = removal.size();
  std::vector<std::uint64_t> sigma_after(len);
  for (std::size_t k = len; k-- > 0;) {
    sigma_after[k] = tracker.sigma();
    const NodeId v = removal[k];
    step[v] = SIZE_MAX;
    for (NodeId w : g.neighbors(v)) {
      if (step[w] == SIZE_MAX) tracker.unite(v, w);
    }
  }

  AncCurve curve;
  curve.sigma0 = tracker.sigma();
  if (curve.sigma0 == 0) throw UndefinedConnectivityError();
  curve.normalization = normalization;
  curve.node_count = n;
  curve.ratios.reserve(len);
  const auto denom = static_cast<double>(curve.sigma0);
  for (std::uint64_t s : sigma_after) curve.ratios.push_back(static_cast<double>(s) / denom);
  return curve;
}

double fitness(MetricCache& cache, const dsl::Expr& e, double fraction, FitnessMode mode,
               AncNormalization normalization) {
  const Graph& g = cache.graph();
  const std::size_t l = removal_count(g.node_count(), fraction);
  const ScoreVector scores = evaluate(e, cache);
  const AncCurve curve = anc(g, top_l_by_score(scores, l), normalization);
  const double c = mode == FitnessMode::anc ? 1.0 - curve.value() : 1.0 - curve.terminal_ratio();
  return std::clamp(c, 0.0, 1.0);
}

double fitness(const Graph& g, const dsl::Expr& e, double fraction, FitnessMode mode) {
  MetricCache cache(g);
  return fitness(cache, e, fraction, mode);
}

RemovalList dismantle_adaptive(const Graph& g, const NextNodeFn& next, double fraction) {
  const std::size_t l = removal_count(g.node_count(), fraction);
  NodeMask mask(g.node_count());
  RemovalList removal;
  removal.reserve(l);
  while (removal.size() < l) {
    const NodeId v = next(g, mask);
    if (v >= g.node_count() || mask.removed(v)) {
      throw std::logic_error("strategy returned an invalid or already removed node");
    }
    mask.remove(v);
    removal.push_back(v);
  }
  return removal;
}

void write_anc_csv(std::ostream& out, const AncCurve& curve) {
  out << "k,sigma_ratio\n";
  for (std::size_t k = 0; k < curve.ratios.size(); ++k) {
    out << (k + 1) << ',' << dsl::format_number(curve.ratios[k]) << '\n';
  }
}

void write_removal_list(std::ostream& out, const Graph& g, std::span<const NodeId> removal) {
  for (NodeId v : removal) out << g.label(v) << '\n';
}

}  // namespace critnode
