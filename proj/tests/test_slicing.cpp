#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace tilekit;

namespace {

ClusterPartition blow_up_partition(const KPartiteGraph& h, int t) {
  ClusterPartition p;
  p.l = h.n();
  const auto g = blow_up(h, t);
  for (int v = 0; v < g.vertex_count(); ++v) p.cluster.push_back((g.ref(v).index - 1) / t + 1);
  return p;
}

}  // namespace

TEST(Azuma, SpotValues) {
  const auto b = azuma_slice_bound(Rational(3, 10), 20000, 5000, 4);
  EXPECT_EQ(b.aggregate_exponent, Rational(729, 16));
  EXPECT_EQ(b.single_exponent, Rational(9, 100) * Rational(5000 * 5000) / Rational(40000));
  EXPECT_NEAR(b.aggregate_bound, 5.2e-19, 0.1e-19);
  EXPECT_FALSE(b.vacuous);

  const auto v = azuma_slice_bound(Rational(1, 10), 2000, 500, 4);
  EXPECT_EQ(v.aggregate_exponent, Rational(9, 160));
  EXPECT_NEAR(v.aggregate_bound, 30.25, 0.01);
  EXPECT_TRUE(v.vacuous);
  EXPECT_THROW(azuma_slice_bound(Rational(0), 1, 1, 1), ParameterError);
}

TEST(Azuma, MatchesDoubleEvaluation) {
  for (int e = 1; e <= 6; ++e)
    for (std::int64_t lp : {100, 250, 1000}) {
      const Rational eps(e, 20);
      const auto b = azuma_slice_bound(eps, 4000, lp, 4000 / lp);
      const double want = oracle::aggregate_bound(e / 20.0, 4000, static_cast<double>(lp), 4000.0 / lp);
      EXPECT_NEAR(b.aggregate_bound / want, 1.0, 1e-12);
      EXPECT_NEAR(b.single_bound, std::exp(-(e / 20.0) * (e / 20.0) * lp * lp / 8000.0), 1e-15);
    }
}

TEST(Azuma, ClosingClaimAtOneMillion) {
  // L' = sqrt(L ln L) / (3 eps^2): aggregate = 8 (L/L') L^(-1/2) = 24 eps^2 / sqrt(ln L).
  const double l = 1e6, eps = 0.25;
  const auto lp = static_cast<std::int64_t>(std::sqrt(l * std::log(l)) / (3 * eps * eps));
  const auto b = azuma_slice_bound(Rational(1, 4), 1'000'000, lp, 1'000'000 / lp);
  EXPECT_LE(b.aggregate_bound, 0.5);
  EXPECT_NEAR(b.aggregate_bound, 24 * eps * eps / std::sqrt(std::log(l)), 0.01);
}

TEST(SlicingExperiment, SmallRunsAndErrors) {
  const auto rep = random_slicing_experiment(400, 200, Rational(1, 2), Rational(3, 10), 3, 1);
  EXPECT_EQ(rep.m, 2);
  EXPECT_EQ(rep.trials.size(), 3u);
  EXPECT_EQ(rep.trials[1].seed, 2u);
  EXPECT_EQ(rep.failed_trials, 0);
  const auto again = random_slicing_experiment(400, 200, Rational(1, 2), Rational(3, 10), 3, 1);
  EXPECT_EQ(detail::slicing_csv(rep), detail::slicing_csv(again));

  const auto whole = random_slicing_experiment(300, 300, Rational(1, 2), Rational(1, 5), 2, 5);
  EXPECT_EQ(whole.m, 1);
  EXPECT_EQ(whole.failed_trials, 0);

  const auto empty = random_slicing_experiment(200, 100, Rational(0), Rational(1, 5), 2, 5);
  EXPECT_EQ(empty.failed_trials, 0);
  for (const auto& t : empty.trials) EXPECT_EQ(t.kr_certified, 4);

  EXPECT_THROW(random_slicing_experiment(300, 200, Rational(1, 2), Rational(1, 5), 1, 1), ParameterError);
  EXPECT_THROW(random_slicing_experiment(300, 100, Rational(1, 2), Rational(1, 2), 1, 1), ParameterError);
}

TEST(SuperSlice, CompleteTuple) {
  const auto g = complete_multipartite(3, 12);
  const auto s = super_slice(g, Rational(1, 20), Rational(1, 2), 2);
  EXPECT_EQ(s.target, 2 * 6);  // 2 ceil((1 - 2/20) 12 / 2) = 2 ceil(5.4)
  for (const auto& sub : s.subsets) EXPECT_EQ(static_cast<int>(sub.size()), s.target);
  EXPECT_FALSE(s.violation);
}

TEST(SuperSlice, RandomTupleMeetsConclusionOnDegreeFloors) {
  const int lp = 200;
  const Rational eps(1, 20), d(1, 2);
  // Three clusters, pairwise random at density about 0.6.
  const auto g = random_multipartite(3, lp, 0.6, 17);
  const auto s = super_slice(g, eps, d, 1);
  EXPECT_FALSE(s.violation);
  const Rational delta = d - Rational(3) * eps;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const auto p = pair_of(g, s.subsets[i], s.subsets[j]);
      EXPECT_FALSE(degree_floor_violation(p, delta));
    }
}

TEST(SuperSlice, PlantedIsolatedVertexGoesFirst) {
  KPartiteGraph::Builder b(2, 12);
  for (int a = 1; a <= 12; ++a)
    for (int c = 1; c <= 12; ++c)
      if (a != 5) b.add_edge({1, a}, {2, c});
  const auto g = std::move(b).build();
  // Target ceil((1 - 1/12) 12) = 11 leaves no room to refill.
  const auto s = super_slice(g, Rational(1, 12), Rational(3, 5), 1);
  EXPECT_EQ(s.target, 11);
  EXPECT_EQ(s.discarded[0], 1);
  EXPECT_EQ(s.refilled[0], 0);
  EXPECT_EQ(std::count(s.subsets[0].begin(), s.subsets[0].end(), VertexRef{1, 5}), 0);
  // At eps' = 1/20 the target is all 12, so the dropped vertex comes back.
  const auto full = super_slice(g, Rational(1, 20), Rational(1, 2), 1);
  EXPECT_EQ(full.refilled[0], 1);
}

TEST(SuperSlice, HypothesisErrors) {
  const auto g = complete_multipartite(2, 10);
  EXPECT_THROW(super_slice(g, Rational(1, 5), Rational(1, 2), 1), ParameterError);
  EXPECT_THROW(super_slice(edgeless(2, 10), Rational(1, 100), Rational(1, 2), 1), PreconditionError);
}

TEST(ParameterChain, StandardAssignment) {
  for (int k : {2, 3, 4})
    for (int h : {1, 2}) {
      const auto c = ParameterChain::standard(Rational(1, 10), h, k, 50, 6, Rational(1, 100));
      EXPECT_TRUE(c.valid()) << k << h;
      EXPECT_EQ(c.d, Rational(1, 40));
      EXPECT_EQ(c.d_prime(), c.d - c.eps);
    }
  auto bad = ParameterChain::standard(Rational(1, 10), 1, 3, 50, 6);
  bad.eps_prime = bad.d;
  EXPECT_FALSE(bad.valid());
  EXPECT_THROW(bad.validate(), ParameterError);
  auto z = ParameterChain::standard(Rational(1, 10), 1, 3, 50, 6);
  z.zeta = Rational(1);
  const auto v = z.violations();
  EXPECT_NE(std::find(v.begin(), v.end(), "zeta <= 1/(12 h^2 k^2 M^2 D^2)"), v.end());
}

TEST(ReducedGraph, CompleteAndHalves) {
  const auto g = complete_multipartite(3, 8);
  ClusterPartition p;
  p.l = 2;
  for (int v = 0; v < g.vertex_count(); ++v) p.cluster.push_back(g.ref(v).index <= 4 ? 1 : 2);
  EXPECT_EQ(reduced_graph(g, p, Rational(1, 10), Rational(1, 2)).graph.edges(), complete_multipartite(3, 2).edges());

  KPartiteGraph::Builder b(3, 8);
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (int a = 1; a <= 8; ++a)
        for (int c = 1; c <= 8; ++c)
          if ((a <= 4) == (c <= 4)) b.add_edge({i, a}, {j, c});
  const auto r = reduced_graph(std::move(b).build(), p, Rational(1, 10), Rational(1, 2));
  EXPECT_EQ(r.graph.edge_count(), 6u);
  EXPECT_EQ(enumerate_transversal_cliques(r.graph).size(), 2u);
}

TEST(ReducedGraph, Errors) {
  const auto g = complete_multipartite(2, 4);
  ClusterPartition p;
  p.l = 2;
  for (int v = 0; v < g.vertex_count(); ++v) p.cluster.push_back(g.ref(v).index == 1 ? 1 : 2);
  EXPECT_THROW(reduced_graph(g, p, Rational(1, 10), Rational(1, 2)), ParameterError);
}

TEST(ReducedGraph, DegreeInheritance) {
  // G a blow-up of a dense H, partitioned by blow-up classes.
  const Rational gamma(1, 5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int k = 3, l = 10;
    const int target = static_cast<int>(to_int64(((Rational(k - 1, k) + gamma) * Rational(l)).ceil()));
    const auto h = random_min_degree_graph(k, l, target, seed);
    const auto g = blow_up(h, 5);
    ASSERT_GE(Rational(min_bipartite_degree(g).first), (Rational(k - 1, k) + gamma) * Rational(g.n()));
    const auto r = reduced_graph(g, blow_up_partition(h, 5), Rational(1, 100), Rational(1, 10));
    EXPECT_GE(Rational(min_bipartite_degree(r.graph).first), (Rational(k - 1, k) + gamma / Rational(2)) * Rational(l));
  }
}

TEST(GreedyEmbed, CompleteAndTooSmall) {
  const auto g = complete_multipartite(3, 5);
  std::vector<std::vector<VertexRef>> cl;
  for (int i = 1; i <= 3; ++i) cl.push_back(part_vertices(g, i));
  const auto e = greedy_embed_khk(g, cl, 2);
  ASSERT_TRUE(e.slots);
  EXPECT_TRUE(verify_embedding(g, *e.slots, 2));
  cl[1].resize(1);
  const auto none = greedy_embed_khk(g, cl, 2);
  EXPECT_FALSE(none.slots);
  EXPECT_EQ(none.stuck_cluster, 2);
}

TEST(GreedyEmbed, RandomClusters) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = random_multipartite(3, 200, 0.5, seed);
    std::vector<std::vector<VertexRef>> cl;
    for (int i = 1; i <= 3; ++i) cl.push_back(part_vertices(g, i));
    const auto e = greedy_embed_khk(g, cl, 2);
    if (e.slots && verify_embedding(g, *e.slots, 2)) ++ok;
  }
  EXPECT_EQ(ok, 100);
}
