#include "critnode/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "critnode/rng.hpp"

namespace critnode {

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges,
                        std::vector<std::string> labels) {
  if (labels.empty()) {
    labels.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != node_count) {
    throw std::invalid_argument("label count does not match node count");
  }

  std::vector<std::vector<NodeId>> adj(node_count);
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw std::out_of_range("edge endpoint out of range");
    }
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  Graph g;
  g.labels_ = std::move(labels);
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t v = 0; v < node_count; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.offsets_[v + 1] = g.offsets_[v] + list.size();
  }
  g.targets_.reserve(g.offsets_.back());
  for (auto& list : adj) g.targets_.insert(g.targets_.end(), list.begin(), list.end());
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::permuted(std::span<const NodeId> perm) const {
  if (perm.size() != node_count()) throw std::invalid_argument("permutation size mismatch");
  std::vector<Edge> mapped;
  mapped.reserve(edge_count());
  for (auto [u, v] : edges()) mapped.emplace_back(perm[u], perm[v]);
  std::vector<std::string> new_labels(node_count());
  for (NodeId v = 0; v < node_count(); ++v) new_labels[perm[v]] = labels_[v];
  return from_edges(node_count(), mapped, std::move(new_labels));
}

std::size_t NodeMask::surviving_count() const {
  return static_cast<std::size_t>(std::count(removed_.begin(), removed_.end(), 0));
}

Graph load_edge_list(std::istream& in) {
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::string> labels;
  std::vector<Edge> edges;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = index.try_emplace(token, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;

    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a >> b)) {
      throw GraphParseError(line_no, "expected two endpoints");
    }
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    edges.emplace_back(u, v);
  }
  const std::size_t n = labels.size();
  return Graph::from_edges(n, edges, std::move(labels));
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

Graph generate_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || n <= m) {
    throw std::invalid_argument("generate_ba requires n > m >= 1");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(m + (n - m - 1) * m);

  // Each endpoint occurrence is one entry, so uniform sampling from this
  // list is degree-proportional sampling.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * (m + (n - m - 1) * m));
  for (NodeId leaf = 1; leaf <= m; ++leaf) {
    edges.emplace_back(0, leaf);
    endpoints.push_back(0);
    endpoints.push_back(leaf);
  }

  std::vector<NodeId> targets;
  for (NodeId source = static_cast<NodeId>(m + 1); source < n; ++source) {
    targets.clear();
    while (targets.size() < m) {
      NodeId t = endpoints[rng.uniform_index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(source, t);
      endpoints.push_back(t);
      endpoints.push_back(source);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace critnode
