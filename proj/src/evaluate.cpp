#include "critnode/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "critnode/centrality.hpp"
#include "critnode/connectivity.hpp"
#include "critnode/exact_sum.hpp"

namespace critnode {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double total(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, -kValueBound, kValueBound);
}

template <typename T>
std::vector<double> to_double(const std::vector<T>& v) {
  return std::vector<double>(v.begin(), v.end());
}

using MetricSource = std::function<std::shared_ptr<const std::vector<double>>(dsl::Metric, int)>;

void apply_unary(dsl::UnaryOp op, std::vector<double>& x) {
  using dsl::UnaryOp;
  switch (op) {
    case UnaryOp::neg:
      for (double& v : x) v = -v;
      return;
    case UnaryOp::abs:
      for (double& v : x) v = std::fabs(v);
      return;
    case UnaryOp::sqrt:
      for (double& v : x) v = v < 0.0 ? 0.0 : std::sqrt(v);
      return;
    case UnaryOp::log1p:
      for (double& v : x) v = v < 0.0 ? 0.0 : std::log1p(v);
      return;
    case UnaryOp::normalize: {
      auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      const double min = *lo;
      const double range = *hi - *lo;
      for (double& v : x) v = range > 0.0 ? (v - min) / range : 0.0;
      return;
    }
    case UnaryOp::rank: {
      // Ascending average rank of ties, scaled into [0, 1].
      const std::size_t n = x.size();
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
      std::vector<double> ranks(n);
      const double scale = static_cast<double>(std::max<std::size_t>(n - 1, 1));
      for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg / scale;
        i = j + 1;
      }
      x.swap(ranks);
      return;
    }
  }
}

std::vector<double> apply_aggregate(dsl::AggOp op, const Graph& g, const std::vector<double>& x) {
  std::vector<double> out(x.size(), 0.0);
  ExactSum acc;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto nb = g.neighbors(v);
    if (nb.empty()) continue;
    if (op == dsl::AggOp::nmax) {
      double best = x[nb.front()];
      for (NodeId u : nb) best = std::max(best, x[u]);
      out[v] = best;
      continue;
    }
    acc.clear();
    for (NodeId u : nb) acc.add(x[u]);
    out[v] = op == dsl::AggOp::nsum ? acc.value() : acc.value() / static_cast<double>(nb.size());
  }
  return out;
}

double apply_pow(double x, double c) {
  if (x == 0.0) return c > 0.0 ? 0.0 : (c == 0.0 ? 1.0 : 0.0);
  if (c == std::floor(c)) return std::pow(x, c);
  const double magnitude = std::pow(std::fabs(x), c);
  return x < 0.0 ? -magnitude : magnitude;
}

void apply_binary(dsl::BinaryOp op, std::vector<double>& a, const std::vector<double>& b) {
  using dsl::BinaryOp;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    switch (op) {
      case BinaryOp::add: a[i] = x + y; break;
      case BinaryOp::sub: a[i] = x - y; break;
      case BinaryOp::mul: a[i] = x * y; break;
      case BinaryOp::div: a[i] = y == 0.0 ? 0.0 : x / y; break;
      case BinaryOp::min: a[i] = std::min(x, y); break;
      case BinaryOp::max: a[i] = std::max(x, y); break;
      case BinaryOp::pow: a[i] = apply_pow(x, y); break;
    }
  }
}

std::vector<double> eval(const dsl::Node& node, const Graph& g, const MetricSource& metrics) {
  std::vector<double> out = std::visit(
      overloaded{
          [&](const dsl::Const& c) { return std::vector<double>(g.node_count(), c.value); },
          [&](const dsl::MetricRef& m) { return *metrics(m.metric, m.k); },
          [&](const dsl::Unary& u) {
            auto x = eval(*u.child, g, metrics);
            apply_unary(u.op, x);
            return x;
          },
          [&](const dsl::NeighborAgg& a) {
            return apply_aggregate(a.op, g, eval(*a.child, g, metrics));
          },
          [&](const dsl::Binary& b) {
            auto x = eval(*b.lhs, g, metrics);
            apply_binary(b.op, x, eval(*b.rhs, g, metrics));
            return x;
          },
      },
      node.data);
  for (double& v : out) v = total(v);
  return out;
}

void require_nonempty(const Graph& g) {
  if (g.node_count() == 0) throw std::invalid_argument("cannot score an empty graph");
}

}  // namespace

std::vector<double> compute_metric(const Graph& g, dsl::Metric metric, int k) {
  using dsl::Metric;
  switch (metric) {
    case Metric::degree: return to_double(degrees(g, NodeMask(g.node_count())));
    case Metric::coreness: return to_double(core_decomposition(g));
    case Metric::betweenness: return betweenness(g);
    case Metric::closeness: return harmonic_closeness(g);
    case Metric::pagerank: return pagerank(g);
    case Metric::eigenvector: return eigenvector_centrality(g);
    case Metric::clustering: return clustering_coefficients(g);
    case Metric::khop: return to_double(khop_counts(g, k));
  }
  throw std::logic_error("unhandled metric");
}

std::shared_ptr<const std::vector<double>> MetricCache::get(dsl::Metric metric, int k) {
  const std::pair<int, int> key{static_cast<int>(metric), metric == dsl::Metric::khop ? k : 0};
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    auto values = std::make_shared<const std::vector<double>>(compute_metric(*graph_, metric, k));
    it = entries_.emplace(key, std::move(values)).first;
  }
  return it->second;
}

ScoreVector evaluate(const dsl::Expr& e, MetricCache& cache) {
  require_nonempty(cache.graph());
  return eval(e.root(), cache.graph(),
              [&](dsl::Metric m, int k) { return cache.get(m, k); });
}

ScoreVector evaluate(const dsl::Expr& e, const Graph& g) {
  MetricCache cache(g);
  return evaluate(e, cache);
}

ScoreVector evaluate_uncached(const dsl::Expr& e, const Graph& g) {
  require_nonempty(g);
  return eval(e.root(), g, [&](dsl::Metric m, int k) {
    return std::make_shared<const std::vector<double>>(compute_metric(g, m, k));
  });
}

}  // namespace critnode
