#include <doctest.h>

#include <sstream>

#include "critnode/dismantle.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace critnode;

TEST_CASE("top_l_by_score orders by score then index") {
  const std::vector<double> s1{0.1, 0.9, 0.5};
  CHECK(top_l_by_score(s1, 2) == RemovalList{1, 2});
  const std::vector<double> s2{0.5, 0.5, 0.5};
  CHECK(top_l_by_score(s2, 2) == RemovalList{0, 1});
  CHECK(top_l_by_score(s1, 3) == RemovalList{1, 2, 0});
  CHECK_THROWS_AS(top_l_by_score(s1, 0), std::out_of_range);
  CHECK_THROWS_AS(top_l_by_score(s1, 4), std::out_of_range);
}

TEST_CASE("removal_count rounds half up and clamps") {
  CHECK(removal_count(198, 0.2) == 40);
  CHECK(removal_count(1000, 0.2) == 200);
  CHECK(removal_count(5, 0.2) == 1);
  CHECK(removal_count(4, 0.25) == 1);
  CHECK(removal_count(5, 0.5) == 3);
  CHECK(removal_count(3, 0.01) == 1);
  CHECK(removal_count(3, 0.99) == 2);
  CHECK_THROWS_AS(removal_count(10, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(removal_count(10, 0.0), std::invalid_argument);
}

TEST_CASE("anc on a three-node path") {
  Graph p3 = fixtures::path(3);
  CHECK(anc(p3, RemovalList{1}).value() == 0.0);
  CHECK(anc(p3, RemovalList{0}).value() == doctest::Approx(1.0 / 3.0));
  AncCurve two = anc(p3, RemovalList{0, 1});
  CHECK(two.sigma0 == 3);
  CHECK(two.ratios == std::vector<double>{1.0 / 3.0, 0.0});
  CHECK(two.value() == doctest::Approx(1.0 / 6.0));
  // Normalizing by node count instead of removal count.
  CHECK(anc(p3, RemovalList{0, 1}, AncNormalization::node_count).value() ==
        doctest::Approx(1.0 / 9.0));
}

TEST_CASE("anc errors") {
  Graph edgeless = Graph::from_edges(3, std::vector<Edge>{});
  CHECK_THROWS_AS(anc(edgeless, RemovalList{0}), UndefinedConnectivityError);
  CHECK_THROWS_AS(anc(fixtures::path(3), RemovalList{}), std::invalid_argument);
  CHECK_THROWS_AS(anc(fixtures::path(3), RemovalList{1, 1}), std::invalid_argument);
}

TEST_CASE("anc matches the per-step recount oracle") {
  Rng rng(31);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 2 + rng.uniform_index(11);
    Graph g = oracle::random_graph(rng, n, rng.uniform01());
    if (g.edge_count() == 0) continue;
    auto order = fixtures::random_permutation(rng, n);
    order.resize(1 + rng.uniform_index(n));
    AncCurve curve = anc(g, order);
    auto want = oracle::anc_ratios(g, order);
    CHECK(curve.ratios == want);
    for (std::size_t k = 1; k < curve.ratios.size(); ++k) {
      CHECK(curve.ratios[k] <= curve.ratios[k - 1]);
    }
    for (double r : curve.ratios) CHECK((r >= 0.0 && r <= 1.0));
    ++checked;
  }
}

TEST_CASE("fitness examples") {
  CHECK(fitness(fixtures::star(5), dsl::parse("degree"), 0.2) == 1.0);
  CHECK(fitness(fixtures::star(5), dsl::parse("degree"), 0.2, FitnessMode::terminal) == 1.0);
  CHECK(fitness(fixtures::complete(4), dsl::parse("pagerank"), 0.25) == 0.5);
  CHECK(fitness(fixtures::complete(4), dsl::parse("0"), 0.25, FitnessMode::terminal) == 0.5);
}

TEST_CASE("fitness is invariant under strictly increasing score transforms") {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = oracle::random_graph(rng, 25, 0.15);
    if (g.edge_count() == 0) continue;
    auto e = dsl::random_expr(static_cast<std::uint64_t>(trial), 5);
    auto s = evaluate(e, g);
    // Scaling by a power of two is strictly increasing and exact in floating point.
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = 4.0 * s[i];
    const std::size_t l = removal_count(g.node_count(), 0.2);
    CHECK(top_l_by_score(s, l) == top_l_by_score(t, l));
    const double cf = fitness(g, e, 0.2);
    CHECK((cf >= 0.0 && cf <= 1.0));
  }
}

TEST_CASE("dismantle_adaptive removes exactly L distinct nodes") {
  Graph g = fixtures::path(10);
  auto first_alive = [](const Graph& graph, const NodeMask& mask) {
    for (NodeId v = 0; v < graph.node_count(); ++v)
      if (mask.alive(v)) return v;
    throw std::logic_error("none");
  };
  CHECK(dismantle_adaptive(g, first_alive, 0.3) == RemovalList{0, 1, 2});
  auto broken = [](const Graph&, const NodeMask&) { return NodeId{0}; };
  CHECK_THROWS_AS(dismantle_adaptive(g, broken, 0.3), std::logic_error);
}

TEST_CASE("csv and removal list export") {
  Graph g = fixtures::from_text("a b\nb c\n");
  AncCurve curve = anc(g, RemovalList{0, 1});
  std::ostringstream csv;
  write_anc_csv(csv, curve);
  CHECK(csv.str() == "k,sigma_ratio\n1,0.3333333333333333\n2,0\n");
  std::ostringstream labels;
  write_removal_list(labels, g, RemovalList{2, 0});
  CHECK(labels.str() == "c\na\n");
}
