#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "critnode/centrality.hpp"
#include "critnode/connectivity.hpp"
#include "critnode/graph.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace critnode;
using fixtures::complete;
using fixtures::from_text;
using fixtures::path;
using fixtures::star;

namespace {

std::vector<std::size_t> sorted_sizes(const ComponentPartition& p) {
  auto s = p.component_sizes;
  std::sort(s.begin(), s.end());
  return s;
}

bool is_valid_graph(const Graph& g) {
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto nb = g.neighbors(v);
    if (!std::is_sorted(nb.begin(), nb.end())) return false;
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
    for (NodeId w : nb) {
      if (w == v || !g.has_edge(w, v)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("load_edge_list assigns labels by first appearance") {
  Graph g = from_text("a b\nb c");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.labels() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("load_edge_list merges duplicates and drops self-loops") {
  Graph g = from_text("a b\nb a\na a");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("load_edge_list skips comments, blank lines and extra columns") {
  Graph g = from_text("# header\n% konect style\n\n1 2 0.5 17\r\n  2 3\n");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(is_valid_graph(g));
}

TEST_CASE("load_edge_list reports the malformed line") {
  try {
    from_text("a b\nlonely\n");
    FAIL("expected a parse error");
  } catch (const GraphParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("empty input yields an empty graph") {
  Graph g = from_text("# nothing\n");
  CHECK(g.node_count() == 0);
  CHECK(pairwise_connectivity(g) == 0);
}

TEST_CASE("generate_ba edge counts follow the star-seeded construction") {
  // Star on m+1 nodes (m edges) plus m edges per later node.
  CHECK(generate_ba(4, 3, 1).edge_count() == 3);
  CHECK(generate_ba(5, 3, 1).edge_count() == 6);
  Graph big = generate_ba(1000, 3, 42);
  CHECK(big.node_count() == 1000);
  CHECK(big.edge_count() == 3 + 996 * 3);
  CHECK(is_valid_graph(big));
  CHECK(connected_components(big, NodeMask(1000)).component_sizes.size() == 1);
}

TEST_CASE("generate_ba is deterministic and validates arguments") {
  CHECK(generate_ba(10, 3, 1).edges() == generate_ba(10, 3, 1).edges());
  CHECK(generate_ba(200, 3, 1).edges() != generate_ba(200, 3, 2).edges());
  CHECK_THROWS_AS(generate_ba(3, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_ba(5, 0, 1), std::invalid_argument);
}

TEST_CASE("connected components on small cases") {
  Graph tri_iso = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  CHECK(sorted_sizes(connected_components(tri_iso, NodeMask(4))) == std::vector<std::size_t>{1, 3});

  NodeMask mask(3);
  mask.remove(1);
  auto parts = connected_components(path(3), mask);
  CHECK(sorted_sizes(parts) == std::vector<std::size_t>{1, 1});
  CHECK(parts.component_id[1] == ComponentPartition::kRemoved);
}

TEST_CASE("pairwise connectivity on small cases") {
  CHECK(pairwise_connectivity(path(4)) == 6);
  Graph split = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {3, 4}});
  CHECK(pairwise_connectivity(split) == 4);
  NodeMask hub(5);
  hub.remove(0);
  CHECK(pairwise_connectivity(star(5), hub) == 0);
}

TEST_CASE("connectivity matches the reachability oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(12);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    NodeMask mask(n);
    for (NodeId v = 0; v < n; ++v)
      if (rng.bernoulli(0.25)) mask.remove(v);

    auto parts = connected_components(g, mask);
    std::map<std::size_t, int> hist;
    for (std::size_t s : parts.component_sizes) ++hist[s];
    CHECK(hist == oracle::component_size_histogram(g, mask));
    CHECK(std::accumulate(parts.component_sizes.begin(), parts.component_sizes.end(),
                          std::size_t{0}) == mask.surviving_count());
    CHECK(pairwise_connectivity(g, mask) == oracle::reachable_pairs(g, mask));

    // Monotone under one more removal.
    for (NodeId v = 0; v < n; ++v) {
      if (mask.removed(v)) continue;
      NodeMask more = mask;
      more.remove(v);
      CHECK(pairwise_connectivity(g, more) <= pairwise_connectivity(g, mask));
    }
    NodeMask all(n);
    for (NodeId v = 0; v < n; ++v) all.remove(v);
    CHECK(pairwise_connectivity(g, all) == 0);
  }
}

TEST_CASE("degrees count surviving neighbors only") {
  CHECK(degrees(complete(3), NodeMask(3)) == std::vector<std::uint32_t>{2, 2, 2});
  CHECK(degrees(star(5), NodeMask(5))[0] == 4);
  NodeMask mask(3);
  mask.remove(2);
  CHECK(degrees(path(3), mask) == std::vector<std::uint32_t>{1, 1, 0});
}

TEST_CASE("core decomposition") {
  Graph tri_pendant = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  CHECK(core_decomposition(tri_pendant) == std::vector<std::uint32_t>{2, 2, 2, 1});
  CHECK(core_decomposition(path(5)) == std::vector<std::uint32_t>(5, 1));

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(12);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    CHECK(core_decomposition(g) == oracle::coreness(g));
  }
}

TEST_CASE("core decomposition ignores masked nodes") {
  Graph k4 = complete(4);
  NodeMask mask(4);
  mask.remove(3);
  CHECK(core_decomposition(k4, mask) == std::vector<std::uint32_t>{2, 2, 2, 0});
}

TEST_CASE("betweenness") {
  CHECK(betweenness(path(3)) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(betweenness(complete(4)) == std::vector<double>(4, 0.0));

  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    auto got = betweenness(g);
    auto want = oracle::betweenness(g);
    for (std::size_t v = 0; v < n; ++v) CHECK(got[v] == doctest::Approx(want[v]).epsilon(1e-9));
  }
}

TEST_CASE("harmonic closeness") {
  auto h = harmonic_closeness(path(3));
  CHECK(h[0] == 1.5);
  CHECK(h[1] == 2.0);
  CHECK(h[2] == 1.5);
  Graph two_edges = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK(harmonic_closeness(two_edges) == std::vector<double>(4, 1.0));
  CHECK(harmonic_closeness(Graph::from_edges(1, std::vector<Edge>{})) == std::vector<double>{0.0});

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    auto got = harmonic_closeness(g);
    auto want = oracle::harmonic(g);
    for (std::size_t v = 0; v < n; ++v) CHECK(got[v] == doctest::Approx(want[v]).epsilon(1e-9));
  }
}

TEST_CASE("khop counts") {
  CHECK(khop_counts(path(3), 1) == std::vector<std::uint32_t>{1, 2, 1});
  CHECK(khop_counts(path(3), 2) == std::vector<std::uint32_t>{2, 2, 2});
  CHECK(khop_counts(path(6), 5) == std::vector<std::uint32_t>(6, 5));
  CHECK_THROWS_AS(khop_counts(path(3), 0), std::invalid_argument);

  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    const int k = 1 + static_cast<int>(rng.uniform_index(4));
    CHECK(khop_counts(g, k) == oracle::khop(g, k));
  }
}

TEST_CASE("pagerank") {
  auto k3 = pagerank(complete(3));
  for (double x : k3) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pagerank(Graph::from_edges(1, std::vector<Edge>{})) == std::vector<double>{1.0});

  auto s = pagerank(star(5));
  for (NodeId leaf = 1; leaf < 5; ++leaf) {
    CHECK(s[0] > s[leaf]);
    CHECK(s[leaf] == s[1]);
  }
  CHECK_THROWS_AS(pagerank(star(5), PageRankOptions{1.0, 1e-9, 100}), std::invalid_argument);

  // Dangling mass redistributed, so the total stays 1.
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(30);
    Graph g = oracle::random_graph(rng, n, rng.uniform01() * 0.3);
    auto pr = pagerank(g);
    CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("eigenvector centrality") {
  auto k3 = eigenvector_centrality(complete(3));
  CHECK(k3[0] == k3[1]);
  CHECK(k3[1] == k3[2]);

  auto s = eigenvector_centrality(star(5));
  for (NodeId leaf = 1; leaf < 5; ++leaf) {
    CHECK(s[0] > s[leaf]);
    CHECK(s[leaf] == s[1]);
  }
  // Leading eigenvector of the star: hub / leaf = sqrt(4).
  CHECK(s[0] / s[1] == doctest::Approx(2.0).epsilon(1e-6));

  Graph empty = Graph::from_edges(4, std::vector<Edge>{});
  CHECK(eigenvector_centrality(empty) == std::vector<double>(4, 0.5));

  Rng rng(6);
  Graph g = oracle::random_graph(rng, 20, 0.3);
  for (double x : eigenvector_centrality(g)) CHECK(x >= 0.0);
}

TEST_CASE("clustering coefficients") {
  CHECK(clustering_coefficients(complete(3)) == std::vector<double>(3, 1.0));
  CHECK(clustering_coefficients(star(5)) == std::vector<double>(5, 0.0));
  // K4 minus edge {2,3}: nodes 0 and 1 see triangles {0,1,2} and {0,1,3}.
  Graph k4m = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  auto c = clustering_coefficients(k4m);
  CHECK(c[0] == doctest::Approx(2.0 / 3.0));
  CHECK(c[1] == doctest::Approx(2.0 / 3.0));
  CHECK(c[2] == 1.0);
}

TEST_CASE("centralities are deterministic and exactly permutation-equivariant") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    Graph g = oracle::random_graph(rng, n, rng.uniform01() * 0.4);
    auto perm = fixtures::random_permutation(rng, n);
    Graph h = g.permuted(perm);

    auto check = [&](const std::vector<double>& a, const std::vector<double>& b) {
      for (NodeId v = 0; v < n; ++v) CHECK(a[v] == b[perm[v]]);
    };
    check(betweenness(g), betweenness(h));
    check(harmonic_closeness(g), harmonic_closeness(h));
    check(pagerank(g), pagerank(h));
    check(eigenvector_centrality(g), eigenvector_centrality(h));
    check(clustering_coefficients(g), clustering_coefficients(h));
    CHECK(betweenness(g) == betweenness(g));
    CHECK(pagerank(g) == pagerank(g));
  }
}
