#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace tilekit;

namespace {

void expect_well_formed(const KPartiteGraph& g) {
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v = 0; v < g.vertex_count(); ++v) {
      const VertexRef a = g.ref(u), b = g.ref(v);
      EXPECT_EQ(g.adjacent(a, b), g.adjacent(b, a));
      if (a.part == b.part) EXPECT_FALSE(g.adjacent(a, b));
    }
}

}  // namespace

TEST(Graph, SingleEdge) {
  const auto g = new_balanced(2, 1, {{{1, 1}, {2, 1}}});
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.adjacent({2, 1}, {1, 1}));
}

TEST(Graph, CompleteThreePartite) {
  const auto g = complete_multipartite(3, 3);
  EXPECT_EQ(g.edge_count(), 27u);
  EXPECT_EQ(min_bipartite_degree(g).first, 3);
  expect_well_formed(g);
}

TEST(Graph, DuplicateEdgesCollapse) {
  const auto g = new_balanced(2, 2, {{{1, 1}, {2, 2}}, {{2, 2}, {1, 1}}});
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(Graph, ConstructionErrors) {
  EXPECT_THROW(new_balanced(2, 2, {{{1, 1}, {1, 2}}}), ConstructionError);
  EXPECT_THROW(new_balanced(2, 2, {{{1, 1}, {2, 3}}}), ConstructionError);
  EXPECT_THROW(new_balanced(3, 2, {{{0, 1}, {2, 1}}}), ConstructionError);
  EXPECT_THROW(KPartiteGraph::Builder(1, 2), ConstructionError);
  EXPECT_THROW(new_balanced(2, 0, {}), ConstructionError);
  EXPECT_NO_THROW(KPartiteGraph::Builder(2, 0));  // empty auxiliary graphs
}

TEST(Graph, EdgelessDegree) { EXPECT_EQ(min_bipartite_degree(edgeless(3, 4)).first, 0); }

TEST(Graph, DegreeProfileMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_multipartite(3, 5, 0.6, seed);
    const auto [delta, prof] = min_bipartite_degree(g);
    EXPECT_EQ(delta, oracle::min_degree(g));
    EXPECT_EQ(prof.min(), delta);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        int m = g.n();
        for (int a = 1; a <= g.n(); ++a) m = std::min(m, g.degree({i, a}, j));
        EXPECT_EQ(prof.at(i, j), m);
      }
  }
}

TEST(Catlin, ThreeByThree) {
  const auto g = catlin_graph(3, 3);
  EXPECT_EQ(g.vertex_count(), 9);
  EXPECT_EQ(min_bipartite_degree(g).first, 2);
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) {
      int e = 0;
      for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) e += g.adjacent({i, a}, {j, b});
      EXPECT_EQ(e, 6);
    }
  expect_well_formed(g);
}

TEST(Catlin, BlowUpsAndFourParts) {
  EXPECT_EQ(min_bipartite_degree(catlin_graph(3, 6)).first, 4);
  const auto g = catlin_graph(4, 4);
  EXPECT_EQ(g.vertex_count(), 16);
  EXPECT_EQ(min_bipartite_degree(g).first, 3);
}

TEST(Catlin, DegreeIsExactlyTheThreshold) {
  for (int k = 3; k <= 5; ++k)
    for (int n = k; n <= 2 * k; n += k) EXPECT_EQ(oracle::min_degree(catlin_graph(k, n)), (k - 1) * n / k);
}

TEST(Catlin, RejectsBadParameters) {
  EXPECT_THROW(catlin_graph(2, 2), ParameterError);
  EXPECT_THROW(catlin_graph(3, 4), ParameterError);
}

TEST(BlowUp, Identity) {
  const auto g = random_multipartite(3, 4, 0.5, 3);
  const auto b = blow_up(g, 1);
  EXPECT_EQ(b.edges(), g.edges());
}

TEST(BlowUp, EdgeBecomesK22) {
  const auto b = blow_up(new_balanced(2, 1, {{{1, 1}, {2, 1}}}), 2);
  EXPECT_EQ(b.edge_count(), 4u);
}

TEST(BlowUp, ProvenanceAndDegreeScaling) {
  EXPECT_EQ(min_bipartite_degree(blow_up(catlin_graph(3, 3), 3)).first, 6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_multipartite(3, 3, 0.5, seed);
    const int t = 1 + static_cast<int>(seed % 3);
    const auto b = blow_up(g, t);
    EXPECT_EQ(oracle::min_degree(b), t * oracle::min_degree(g));
    // (i, j) becomes (i, (j-1)t+1 .. jt).
    for (const auto& [u, v] : g.edges())
      EXPECT_TRUE(b.adjacent({u.part, (u.index - 1) * t + t}, {v.part, (v.index - 1) * t + 1}));
    expect_well_formed(b);
  }
}

TEST(RandomGraph, FloorAndDeterminism) {
  EXPECT_EQ(random_min_degree_graph(3, 4, 4, 9).edges(), complete_multipartite(3, 4).edges());
  const auto g = random_min_degree_graph(3, 6, 4, 7);
  EXPECT_GE(min_bipartite_degree(g).first, 4);
  EXPECT_EQ(g.edges(), random_min_degree_graph(3, 6, 4, 7).edges());
  const auto z = random_min_degree_graph(2, 5, 0, 1);
  EXPECT_EQ(z.edge_count(), 0u);
  EXPECT_THROW(random_min_degree_graph(2, 3, 4, 1), ParameterError);
}

TEST(RandomGraph, MaximalUnderTheFloor) {
  // No remaining edge can be removed without breaking the floor.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int target = 2 + static_cast<int>(seed % 3);
    const auto g = random_min_degree_graph(3, 5, target, seed);
    EXPECT_GE(oracle::min_degree(g), target);
    for (const auto& [u, v] : g.edges())
      EXPECT_TRUE(g.degree(u, v.part) == target || g.degree(v, u.part) == target);
  }
}

TEST(Cliques, MatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int k = 2 + static_cast<int>(seed % 3), n = 2 + static_cast<int>(seed % 4);
    const auto g = random_multipartite(k, n, 0.6, seed);
    const auto got = enumerate_transversal_cliques(g);
    const std::set<std::vector<VertexRef>> as_set(got.begin(), got.end());
    EXPECT_EQ(as_set.size(), got.size());
    EXPECT_EQ(as_set, oracle::cliques(g));
    for (const auto& c : got) EXPECT_TRUE(is_transversal_clique(g, c));
  }
}

TEST(Cliques, CompleteCount) { EXPECT_EQ(enumerate_transversal_cliques(complete_multipartite(3, 3)).size(), 27u); }

TEST(Cliques, CatlinPatterns) {
  const auto g = catlin_graph(3, 3);
  const auto cs = enumerate_transversal_cliques(g);
  ASSERT_EQ(cs.size(), 8u);
  std::multiset<std::vector<int>> patterns;
  for (const auto& c : cs) {
    std::vector<int> p;
    for (const auto& v : c) p.push_back(v.index);
    patterns.insert(p);
  }
  EXPECT_EQ(patterns.count({2, 2, 2}), 1u);
  EXPECT_EQ(patterns.count({3, 3, 3}), 1u);
  for (const auto& p : patterns) {
    std::vector<int> s = p;
    std::sort(s.begin(), s.end());
    EXPECT_TRUE(s == std::vector<int>({2, 2, 2}) || s == std::vector<int>({3, 3, 3}) ||
                s == std::vector<int>({1, 2, 2}) || s == std::vector<int>({1, 3, 3}));
  }
  const auto through = cliques_through_vertex(g, {1, 1}, cs);
  ASSERT_EQ(through.size(), 2u);
  EXPECT_EQ(through[0][1].index, through[0][2].index);
  EXPECT_EQ(through[1][1].index, through[1][2].index);
}

TEST(Cliques, ThroughVertexCountsDoubleCount) {
  EXPECT_EQ(cliques_through_vertex(complete_multipartite(3, 3), {2, 2},
                                   enumerate_transversal_cliques(complete_multipartite(3, 3)))
                .size(),
            9u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_multipartite(3, 4, 0.7, seed);
    const auto all = enumerate_transversal_cliques(g);
    std::size_t total = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
      const auto through = cliques_through_vertex(g, g.ref(v), all);
      total += through.size();
      // Order preserved.
      EXPECT_TRUE(std::is_sorted(through.begin(), through.end()));
    }
    EXPECT_EQ(total, 3 * all.size());
  }
}

TEST(Cliques, EdgelessAndCap) {
  EXPECT_TRUE(enumerate_transversal_cliques(edgeless(3, 3)).empty());
  EXPECT_THROW(enumerate_transversal_cliques(complete_multipartite(3, 4), 10), CapacityError);
}

TEST(GraphJson, RoundTripAndEitherOrientation) {
  const auto g = random_multipartite(3, 4, 0.5, 11);
  EXPECT_EQ(graph_from_json(to_json(g)).edges(), g.edges());
  const auto j = Json::parse(R"({"k":2,"n":2,"edges":[[[2,1],[1,2]]]})");
  EXPECT_TRUE(graph_from_json(j).adjacent({1, 2}, {2, 1}));
  EXPECT_THROW(graph_from_json(Json::parse(R"({"k":2,"n":2,"edges":[[[1,1],[1,2]]]})")), ConstructionError);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"k":2})")), ConstructionError);
}
