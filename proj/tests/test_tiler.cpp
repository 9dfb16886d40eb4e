#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace tilekit;

TEST(PerfectTiling, CompleteAndCatlin) {
  const auto g = complete_multipartite(3, 3);
  const auto t = perfect_clique_tiling(g);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->tiles.size(), 3u);
  EXPECT_TRUE(verify_tiling(g, *t, 1).ok);

  EXPECT_FALSE(perfect_clique_tiling(catlin_graph(3, 3)));
  const auto c6 = catlin_graph(3, 6);
  const auto t6 = perfect_clique_tiling(c6);
  ASSERT_TRUE(t6);
  EXPECT_TRUE(verify_tiling(c6, *t6, 1).ok);
}

TEST(PerfectTiling, AgreesWithPermutationSearch) {
  int none = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const int k = 2 + static_cast<int>(seed % 3), n = 2 + static_cast<int>(seed % 4);
    const auto g = random_multipartite(k, n, 0.55, seed);
    const auto t = perfect_clique_tiling(g);
    EXPECT_EQ(t.has_value(), oracle::has_perfect_tiling(g)) << seed;
    if (t) EXPECT_TRUE(verify_tiling(g, *t, 1).ok);
    else ++none;
    // Heuristic branching gives the same existence answer.
    SearchOptions fast;
    fast.most_constrained = true;
    EXPECT_EQ(perfect_clique_tiling(g, fast).has_value(), t.has_value());
  }
  EXPECT_GT(none, 0);
}

TEST(PerfectTiling, DeterministicAndLexicographic) {
  const auto g = random_min_degree_graph(3, 6, 4, 2);
  const auto a = perfect_clique_tiling(g), b = perfect_clique_tiling(g);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->tiles, b->tiles);
  EXPECT_EQ(a->tiles.front().front(), (VertexRef{1, 1}));
}

TEST(PerfectTiling, CapsAreCapacityErrors) {
  SearchOptions small;
  small.max_vertices = 8;
  EXPECT_THROW(perfect_clique_tiling(complete_multipartite(3, 3), small), CapacityError);
  SearchOptions nodes;
  nodes.node_limit = 1;
  EXPECT_THROW(perfect_clique_tiling(catlin_graph(3, 3), nodes), CapacityError);
}

TEST(PerfectTiling, FractionalConsistency) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = random_multipartite(3, 4, 0.6, seed);
    const auto tau = fractional_tiling_number(g).tau;
    const auto t = perfect_clique_tiling(g);
    if (t) EXPECT_EQ(tau, Rational(4));
    if (tau < Rational(4)) EXPECT_FALSE(t);
  }
}

TEST(MultipartiteTiling, Shapes) {
  const auto g = complete_multipartite(3, 4);
  const auto t = perfect_multipartite_tiling(g, 2);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->tiles.size(), 2u);
  EXPECT_TRUE(verify_tiling(g, *t, 2).ok);
  EXPECT_EQ(perfect_multipartite_tiling(g, 1)->tiles, perfect_clique_tiling(g)->tiles);

  KPartiteGraph::Builder b(2, 4);
  for (int a = 1; a <= 4; ++a)
    for (int c = 1; c <= 4; ++c)
      if (a != c) b.add_edge({1, a}, {2, c});
  const auto m = std::move(b).build();
  const auto tm = perfect_multipartite_tiling(m, 2);
  ASSERT_TRUE(tm);
  EXPECT_TRUE(verify_tiling(m, *tm, 2).ok);
  EXPECT_THROW(perfect_multipartite_tiling(m, 0), ParameterError);
}

TEST(MultipartiteTiling, RemainderIsLeftUncovered) {
  const auto g = complete_multipartite(2, 5);
  const auto t = perfect_multipartite_tiling(g, 2);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->tiles.size(), 2u);
  EXPECT_TRUE(verify_tiling(g, *t, 2).ok);
}

TEST(Matching, Examples) {
  const auto k33 = complete_multipartite(2, 3);
  EXPECT_EQ(bipartite_perfect_matching(k33).matching->tiles.size(), 3u);

  const auto anti = new_balanced(2, 2, {{{1, 1}, {2, 2}}, {{1, 2}, {2, 1}}});
  const auto m = bipartite_perfect_matching(anti);
  ASSERT_TRUE(m.matching);
  EXPECT_TRUE(verify_tiling(anti, *m.matching, 1).ok);

  const auto star = new_balanced(2, 2, {{{1, 1}, {2, 1}}, {{1, 2}, {2, 1}}});
  const auto s = bipartite_perfect_matching(star);
  EXPECT_FALSE(s.matching);
  EXPECT_EQ(s.violator, (std::vector<VertexRef>{{1, 1}, {1, 2}}));
  EXPECT_EQ(s.violator_neighbors, (std::vector<VertexRef>{{2, 1}}));
  EXPECT_THROW(bipartite_perfect_matching(complete_multipartite(3, 2)), ParameterError);
}

TEST(Matching, AgreesWithHall) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(seed % 8);
    const auto g = random_multipartite(2, n, 0.35, seed);
    const auto m = bipartite_perfect_matching(g);
    EXPECT_EQ(m.matching.has_value(), oracle::hall_holds(g)) << seed;
    if (m.matching) {
      EXPECT_TRUE(verify_tiling(g, *m.matching, 1).ok);
    } else {
      EXPECT_LT(neighborhood(g, m.violator).size(), m.violator.size());
      EXPECT_EQ(neighborhood(g, m.violator), m.violator_neighbors);
    }
  }
}

TEST(BlowUpTiling, Examples) {
  const auto tri = complete_multipartite(3, 1);
  const auto tr = fractional_tiling_number(tri);
  const auto bt = tiling_from_fractional(tri, tr.cliques, tr.primal, 1);
  EXPECT_TRUE(bt.complete);
  EXPECT_EQ(bt.tiling.tiles.size(), 1u);

  const auto c = catlin_graph(3, 3);
  const auto cs = enumerate_transversal_cliques(c);
  std::vector<Rational> w;
  for (const auto& t : cs) w.push_back(t[0].index == t[1].index && t[1].index == t[2].index ? Rational(0) : Rational(1, 2));
  const auto pc = build_primal_tiling_lp(c, cs);
  const auto bc = tiling_from_fractional(c, cs, make_solution(pc, w), 2);
  EXPECT_EQ(bc.graph.vertex_count(), 18);
  EXPECT_EQ(bc.tiling.tiles.size(), 6u);
  EXPECT_TRUE(verify_tiling(bc.graph, bc.tiling, 1).ok);

  // 4-cycle with weight 1/2 per edge.
  const auto cyc = new_balanced(2, 2, {{{1, 1}, {2, 1}}, {{1, 1}, {2, 2}}, {{1, 2}, {2, 1}}, {{1, 2}, {2, 2}}});
  const auto cc = enumerate_transversal_cliques(cyc);
  const std::vector<Rational> half(cc.size(), Rational(1, 2));
  const auto b4 = tiling_from_fractional(cyc, cc, make_solution(build_primal_tiling_lp(cyc, cc), half), 2);
  EXPECT_EQ(b4.graph.vertex_count(), 8);
  EXPECT_EQ(b4.tiling.tiles.size(), 4u);
  EXPECT_TRUE(verify_tiling(b4.graph, b4.tiling, 1).ok);

  EXPECT_THROW(tiling_from_fractional(cyc, cc, make_solution(build_primal_tiling_lp(cyc, cc), half), 1),
               ParameterError);
}

TEST(BlowUpTiling, DeficiencyOnSuboptimalWeights) {
  const auto g = complete_multipartite(2, 2);
  const auto cs = enumerate_transversal_cliques(g);
  std::vector<Rational> w(cs.size());
  w[0] = Rational(1);
  const auto bt = tiling_from_fractional(g, cs, make_solution(build_primal_tiling_lp(g, cs), w), 1);
  EXPECT_FALSE(bt.complete);
  EXPECT_EQ(bt.deficiency, 1);
}

TEST(BlowUpTiling, RandomReducedGraphs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int k = 2 + static_cast<int>(seed % 2), l = 2 + static_cast<int>(seed % 3);
    const auto gr = random_min_degree_graph(k, l, ((k - 1) * l + k - 1) / k, seed);
    const auto tr = fractional_tiling_number(gr);
    const auto d = common_denominator(tr.primal);
    const auto bt = tiling_from_fractional(gr, tr.cliques, tr.primal, d);
    EXPECT_TRUE(bt.complete);
    EXPECT_EQ(static_cast<std::int64_t>(bt.tiling.tiles.size()), d * l);
    EXPECT_TRUE(verify_tiling(bt.graph, bt.tiling, 1).ok);
  }
}

TEST(VerifyTiling, ReportsDefects) {
  const auto g = new_balanced(2, 2, {{{1, 1}, {2, 1}}, {{1, 2}, {2, 2}}});
  Tiling missing{1, {{{1, 1}, {2, 1}}, {{1, 2}, {2, 1}}}};
  auto r = verify_tiling(g, missing, 1);
  EXPECT_FALSE(r.ok);
  Tiling bad_edge{1, {{{1, 1}, {2, 2}}, {{1, 2}, {2, 1}}}};
  r = verify_tiling(g, bad_edge, 1);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("(1,1)"), std::string::npos);
  Tiling overlap{1, {{{1, 1}, {2, 1}}, {{1, 1}, {2, 1}}}};
  r = verify_tiling(g, overlap, 1);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("(1,1)"), std::string::npos);
}

TEST(TilingJson, RoundTrip) {
  const auto t = *perfect_clique_tiling(complete_multipartite(3, 3));
  EXPECT_EQ(tiling_from_json(to_json(t)).tiles, t.tiles);
}
