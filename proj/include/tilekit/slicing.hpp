#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/random.hpp"
#include "tilekit/rational.hpp"
#include "tilekit/regularity.hpp"

namespace tilekit {

// ---------------------------------------------------------------------------
// Super-slicing a pairwise regular k-tuple of clusters.

// Vertices of part `part` (1-based) in index order.
inline std::vector<VertexRef> part_vertices(const KPartiteGraph& g, int part) {
  std::vector<VertexRef> out;
  for (int j = 1; j <= g.n(); ++j) out.push_back({part, j});
  return out;
}

// The pair between two vertex subsets of g (different parts).
inline BipartitePair pair_of(const KPartiteGraph& g, const std::vector<VertexRef>& a,
                             const std::vector<VertexRef>& b) {
  return BipartitePair::from_graph(g, a, b);
}

struct SuperSlice {
  std::vector<std::vector<VertexRef>> subsets;  // one per part, sorted
  int target = 0;                              // h * ceil((1 - (k-1) eps') L' / h)
  std::vector<int> discarded;                  // low-degree vertices dropped per part
  std::vector<int> refilled;                   // dropped vertices taken back to reach the target
  std::optional<std::string> violation;        // set when the regularity hypothesis visibly failed
};

// Clusters are the parts of g, each of size L' = g.n(). Drops every vertex
// with fewer than (d' - eps') L' neighbours in some other cluster, then keeps
// the first `target` survivors of each cluster. When fewer than `target`
// survive (possible only through the rounding to a multiple of h), the
// dropped vertices with the largest minimum degree are taken back.
inline SuperSlice super_slice(const KPartiteGraph& g, const Rational& eps_prime, const Rational& d_prime, int h) {
  const int k = g.k(), lp = g.n();
  if (k < 2) throw ParameterError("super_slice needs k >= 2 clusters");
  if (h < 1) throw ParameterError("super_slice needs h >= 1");
  if (eps_prime.sign() <= 0) throw ParameterError("super_slice needs eps' > 0");
  if (!(eps_prime < d_prime / Rational(2 * (k + 1))))
    throw ParameterError("super_slice needs eps' < d'/(2(k+1))");
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j)
      if (density(pair_of(g, part_vertices(g, i), part_vertices(g, j))) < d_prime)
        throw PreconditionError("clusters " + std::to_string(i) + " and " + std::to_string(j) +
                                " have density below d'");

  SuperSlice out;
  const Rational keep = (Rational(1) - Rational(k - 1) * eps_prime) * Rational(lp) / Rational(h);
  out.target = h * static_cast<int>(to_int64(keep.ceil()));
  const std::int64_t floor_deg = to_int64(((d_prime - eps_prime) * Rational(lp)).ceil());
  const Rational max_drop = Rational(k - 1) * eps_prime * Rational(lp);
  out.discarded.assign(k, 0);
  out.refilled.assign(k, 0);
  for (int i = 1; i <= k; ++i) {
    std::vector<VertexRef> kept;
    std::vector<std::pair<int, int>> dropped;  // (-min degree, index)
    for (int a = 1; a <= lp; ++a) {
      int worst = lp;
      for (int j = 1; j <= k; ++j)
        if (j != i) worst = std::min(worst, g.degree({i, a}, j));
      if (worst >= floor_deg) kept.push_back({i, a});
      else dropped.emplace_back(-worst, a);
    }
    out.discarded[i - 1] = static_cast<int>(dropped.size());
    if (Rational(static_cast<long>(dropped.size())) > max_drop && !out.violation)
      out.violation = "cluster " + std::to_string(i) + " has " + std::to_string(dropped.size()) +
                      " low-degree vertices, more than (k-1)eps'L'";
    std::sort(dropped.begin(), dropped.end());
    for (std::size_t t = 0; static_cast<int>(kept.size()) < out.target && t < dropped.size(); ++t) {
      kept.push_back({i, dropped[t].second});
      ++out.refilled[i - 1];
    }
    std::sort(kept.begin(), kept.end());
    if (static_cast<int>(kept.size()) > out.target) kept.resize(out.target);
    out.subsets.push_back(std::move(kept));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random slicing and its Appendix bounds.

struct AzumaBound {
  Rational single_exponent;     // eps^2 L'^2 / (2L)
  Rational aggregate_exponent;  // 9 eps^4 L'^2 / (2L), or min{eps^2, 9 eps^4} L'^2/(2L) when eps > 1/3
  double single_bound = 0;      // exp(-single_exponent)
  double aggregate_bound = 0;   // 8 m exp(-aggregate_exponent)
  bool vacuous = false;         // aggregate_bound >= 1
  bool eps_above_third = false;
};

// Exponents are exact; the exponentials are evaluated in double precision
// (relative error about 1e-15 for exponents below 700).
inline AzumaBound azuma_slice_bound(const Rational& eps, std::int64_t l, std::int64_t l_prime, std::int64_t m) {
  if (eps.sign() <= 0 || l <= 0 || l_prime <= 0 || m <= 0)
    throw ParameterError("azuma_slice_bound needs positive parameters");
  AzumaBound b;
  const Rational scale = Rational(l_prime).pow(2) / Rational(2 * l);
  b.single_exponent = eps.pow(2) * scale;
  b.eps_above_third = eps > Rational(1, 3);
  const Rational nine4 = Rational(9) * eps.pow(4);
  b.aggregate_exponent = (b.eps_above_third ? min(eps.pow(2), nine4) : nine4) * scale;
  b.single_bound = std::exp(-b.single_exponent.to_double());
  b.aggregate_bound = 8.0 * static_cast<double>(m) * std::exp(-b.aggregate_exponent.to_double());
  b.vacuous = b.aggregate_bound >= 1.0;
  return b;
}

struct SlicingTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  Rational parent_density;
  int failures = 0;             // slice pairs with fewer than (1 - 8 eps) L'^2 good pairs
  std::int64_t good_pair_min = 0;
  int kr_certified = 0;         // slice pairs certified by kr_certificate at eps
  int kr_vacuous = 0;           // ... of which the certified parameter was clamped to 1
  bool parent_certified = false;
};

struct SlicingReport {
  std::int64_t l = 0, l_prime = 0, m = 0;
  Rational d, eps;
  AzumaBound bound;
  Rational good_pair_threshold;  // (1 - 8 eps) L'^2
  std::vector<SlicingTrial> trials;
  int failed_trials = 0;
  double failure_rate = 0;
  std::vector<std::string> flags;
};

// Ordered pairs of A-slice vertices good in the B-slice: degrees above
// (d - 2 eps) L' and codegree below (d + 2 eps)^2 L', with d the density of
// the parent pair.
inline std::int64_t slice_good_pairs(const BipartitePair& slice, const Rational& parent_d, const Rational& eps) {
  return count_good_pairs(slice, parent_d, Rational(2) * eps).pairs;
}

// Per trial (seed + trial index): a random L x L pair at density d, a random
// equipartition of each side into m = L/L' blocks, and for each of the m^2
// block pairs the good-pair count against (1 - 8 eps) L'^2 and a
// good-pairs certificate at eps.
inline SlicingReport random_slicing_experiment(std::int64_t l, std::int64_t l_prime, const Rational& d,
                                               const Rational& eps, int trials, std::uint64_t seed) {
  if (l <= 0 || l_prime <= 0 || l % l_prime != 0) throw ParameterError("L' must divide L");
  if (l > 20000) throw CapacityError("random_slicing_experiment is capped at L = 20000");
  if (eps.sign() <= 0 || eps > Rational(1, 3)) throw ParameterError("slicing experiment needs 0 < eps <= 1/3");
  if (d.sign() < 0 || d > Rational(1)) throw ParameterError("density must lie in [0, 1]");
  if (trials < 0) throw ParameterError("trials must be nonnegative");
  SlicingReport r;
  r.l = l;
  r.l_prime = l_prime;
  r.m = l / l_prime;
  r.d = d;
  r.eps = eps;
  r.bound = azuma_slice_bound(eps, l, l_prime, r.m);
  r.good_pair_threshold = (Rational(1) - Rational(8) * eps) * Rational(l_prime).pow(2);
  if (!(d.sign() > 0 && d < Rational(1, 3))) r.flags.push_back("d outside (0, 1/3)");
  if (!(eps < d / Rational(4))) r.flags.push_back("eps >= d/4");
  if (r.good_pair_threshold.sign() <= 0) r.flags.push_back("good-pair threshold (1-8eps)L'^2 is not positive");
  if (r.bound.vacuous) r.flags.push_back("aggregate bound >= 1");

  const int n = static_cast<int>(l), b = static_cast<int>(l_prime), m = static_cast<int>(r.m);
  const double p = d.to_double();
  for (int t = 0; t < trials; ++t) {
    SlicingTrial tr;
    tr.trial = t;
    tr.seed = seed + static_cast<std::uint64_t>(t);
    Rng rng = make_rng(tr.seed);
    const BipartitePair parent = BipartitePair::random(n, n, p, rng);
    tr.parent_density = density(parent);
    if (Rational(n) * eps >= Rational(2)) tr.parent_certified = kr_certificate(parent, eps).has_value();
    std::vector<int> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = ys[i] = i;
    shuffle(xs, rng);
    shuffle(ys, rng);
    tr.good_pair_min = std::int64_t{b} * b;
    for (int i = 0; i < m; ++i) {
      std::vector<int> ai(xs.begin() + i * b, xs.begin() + (i + 1) * b);
      for (int j = 0; j < m; ++j) {
        std::vector<int> bj(ys.begin() + j * b, ys.begin() + (j + 1) * b);
        const BipartitePair slice = parent.sub(ai, bj);
        const std::int64_t good = slice_good_pairs(slice, tr.parent_density, eps);
        tr.good_pair_min = std::min(tr.good_pair_min, good);
        if (!(Rational(good) >= r.good_pair_threshold)) ++tr.failures;
        if (Rational(b) * eps >= Rational(2)) {
          if (auto c = kr_certificate(slice, eps)) {
            ++tr.kr_certified;
            tr.kr_vacuous += c->vacuous;
          }
        }
      }
    }
    if (tr.failures > 0) ++r.failed_trials;
    r.trials.push_back(tr);
  }
  r.failure_rate = trials == 0 ? 0.0 : static_cast<double>(r.failed_trials) / trials;
  return r;
}

// ---------------------------------------------------------------------------
// The constant chain gamma >> d >> eps' >> eps >> zeta.

struct ParameterChain {
  Rational gamma, d, eps_prime, eps, zeta;
  int h = 1, k = 2;
  std::int64_t m = 1;                    // Regularity Lemma cluster bound, user supplied
  std::int64_t big_d = 1;                // common denominator bound, user supplied
  std::optional<Rational> eps_blowup;    // Blow-up Lemma epsilon, user supplied

  Rational d_prime() const { return d - eps; }

  // d = gamma/4, eps' = min{eps_blowup^2, d/(12k^2)},
  // eps = min{eps'^5/16, d/(4(k+2))}, zeta = 1/(12 h^2 k^2 M^2 D^2).
  static ParameterChain standard(const Rational& gamma, int h, int k, std::int64_t m, std::int64_t big_d,
                                 std::optional<Rational> eps_blowup = std::nullopt) {
    ParameterChain c;
    c.gamma = gamma;
    c.h = h;
    c.k = k;
    c.m = m;
    c.big_d = big_d;
    c.eps_blowup = eps_blowup;
    c.d = gamma / Rational(4);
    c.eps_prime = c.d / Rational(12 * k * k);
    if (eps_blowup) c.eps_prime = min(c.eps_prime, eps_blowup->pow(2));
    c.eps = min(c.eps_prime.pow(5) / Rational(16), c.d / Rational(4 * (k + 2)));
    c.zeta = Rational(1) / (Rational(12) * Rational(h * h * k * k) * Rational(m).pow(2) * Rational(big_d).pow(2));
    return c;
  }

  // Every violated inequality, by name; empty when the chain is valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (k < 2) v.push_back("k >= 2");
    if (h < 1) v.push_back("h >= 1");
    if (m < 1) v.push_back("M >= 1");
    if (big_d < 1) v.push_back("D >= 1");
    if (!(gamma.sign() > 0 && gamma <= Rational(1))) v.push_back("0 < gamma <= 1");
    if (d != gamma / Rational(4)) v.push_back("d = gamma/4");
    if (eps_prime.sign() <= 0) v.push_back("eps' > 0");
    if (k >= 1 && eps_prime > d / Rational(12 * k * k)) v.push_back("eps' <= d/(12k^2)");
    if (eps_blowup && eps_prime > eps_blowup->pow(2)) v.push_back("eps' <= eps_blowup^2");
    if (eps.sign() <= 0) v.push_back("eps > 0");
    if (eps > eps_prime.pow(5) / Rational(16)) v.push_back("eps <= eps'^5/16");
    if (eps > d / Rational(4 * (k + 2))) v.push_back("eps <= d/(4(k+2))");
    if (zeta.sign() <= 0) v.push_back("zeta > 0");
    if (h >= 1 && k >= 1 && m >= 1 && big_d >= 1 &&
        zeta > Rational(1) / (Rational(12) * Rational(h * h * k * k) * Rational(m).pow(2) * Rational(big_d).pow(2)))
      v.push_back("zeta <= 1/(12 h^2 k^2 M^2 D^2)");
    // eps >> zeta is not checked: it holds only for the true Regularity
    // Lemma constant M(k, eps), which is astronomically large.
    if (!(gamma > d && d > eps_prime && eps_prime > eps)) v.push_back("gamma > d > eps' > eps");
    return v;
  }

  bool valid() const { return violations().empty(); }

  void validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "parameter chain violates:";
    for (const auto& s : v) msg += " [" + s + "]";
    throw ParameterError(msg);
  }
};

// ---------------------------------------------------------------------------
// Reduced graph of a clustered k-partite graph.

// cluster[id] for each dense vertex id of g: 0 for the leftover set, else
// 1..l within the vertex's part.
struct ClusterPartition {
  int l = 0;
  std::vector<int> cluster;
};

struct ReducedGraph {
  KPartiteGraph graph;           // k parts, l cluster-vertices each
  int cluster_size = 0;
  int dense_uncertified = 0;     // pairs above d that could not be certified regular
};

inline std::vector<std::vector<std::vector<VertexRef>>> cluster_members(const KPartiteGraph& g,
                                                                        const ClusterPartition& p) {
  if (p.l < 1) throw ParameterError("partition needs at least one cluster per part");
  if (static_cast<int>(p.cluster.size()) != g.vertex_count())
    throw ParameterError("partition must label every vertex");
  std::vector<std::vector<std::vector<VertexRef>>> members(g.k(), std::vector<std::vector<VertexRef>>(p.l));
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int c = p.cluster[v];
    if (c < 0 || c > p.l) throw ParameterError("cluster label out of range at vertex " + g.ref(v).to_string());
    if (c > 0) members[g.ref(v).part - 1][c - 1].push_back(g.ref(v));
  }
  return members;
}

// Edge between clusters iff their density exceeds d and the pair is
// certified eps-regular: trivially (density 0 or 1), exactly when clusters
// have at most 14 vertices, else through the good-pairs rule at eps^5/16.
inline ReducedGraph reduced_graph(const KPartiteGraph& g, const ClusterPartition& p, const Rational& eps,
                                  const Rational& d) {
  const auto members = cluster_members(g, p);
  const int size = static_cast<int>(members[0][0].size());
  for (const auto& part : members)
    for (const auto& c : part)
      if (static_cast<int>(c.size()) != size) throw ParameterError("clusters are not balanced");
  if (size == 0) throw ParameterError("clusters are empty");
  ReducedGraph out;
  out.cluster_size = size;
  KPartiteGraph::Builder b(g.k(), p.l);
  const Radical reps = Radical::exact(eps);
  const Rational kr_eps = eps.pow(5) / Rational(16);
  for (int i = 0; i < g.k(); ++i)
    for (int j = i + 1; j < g.k(); ++j)
      for (int a = 0; a < p.l; ++a)
        for (int c = 0; c < p.l; ++c) {
          const BipartitePair pr = pair_of(g, members[i][a], members[j][c]);
          if (!(density(pr) > d)) continue;
          bool ok = false;
          if (trivial_certificate(pr)) {
            ok = true;
          } else if (size <= kExactRegularityCap) {
            ok = is_regular_exact(pr, reps);
          } else if (kr_eps < Rational(1) && Rational(size) * kr_eps >= Rational(2)) {
            ok = kr_certificate(pr, kr_eps).has_value();
          }
          if (ok) b.add_edge({i + 1, a + 1}, {j + 1, c + 1});
          else ++out.dense_uncertified;
        }
  out.graph = std::move(b).build();
  return out;
}

// ---------------------------------------------------------------------------
// Greedy K_h^k embedding.

struct Embedding {
  std::optional<std::vector<std::vector<VertexRef>>> slots;  // h chosen vertices per cluster
  int stuck_cluster = 0;  // 1-based cluster whose candidates ran out
  int stuck_slot = 0;     // 1-based slot within it
};

// clusters[i] lies in part i+1 of g. Fills h slots per cluster one vertex at
// a time. Each step picks the cluster with the fewest spare candidates and,
// within it, the vertex whose choice leaves the largest minimum spare count
// over the other clusters (ties: smallest index).
inline Embedding greedy_embed_khk(const KPartiteGraph& g, const std::vector<std::vector<VertexRef>>& clusters, int h) {
  const int k = g.k();
  if (static_cast<int>(clusters.size()) != k) throw ParameterError("greedy_embed_khk needs one cluster per part");
  if (h < 1) throw ParameterError("greedy_embed_khk needs h >= 1");
  std::vector<std::vector<std::uint64_t>> cand(k, std::vector<std::uint64_t>(g.words(), 0));
  for (int i = 0; i < k; ++i)
    for (const auto& v : clusters[i]) {
      if (v.part != i + 1 || !g.contains(v)) throw ParameterError("cluster " + std::to_string(i + 1) +
                                                                  " holds a vertex outside its part");
      bits::set(cand[i], v.index - 1);
    }
  std::vector<int> filled(k, 0);
  std::vector<std::vector<VertexRef>> chosen(k);
  Embedding out;
  for (int step = 0; step < h * k; ++step) {
    int pick = -1, best_spare = 0;
    for (int i = 0; i < k; ++i) {
      if (filled[i] == h) continue;
      const int spare = bits::count(cand[i]) - (h - filled[i]);
      if (pick < 0 || spare < best_spare) pick = i, best_spare = spare;
    }
    if (best_spare < 0) {
      out.stuck_cluster = pick + 1;
      out.stuck_slot = filled[pick] + 1;
      return out;
    }
    int best_v = -1, best_score = 0;
    bits::for_each(cand[pick], [&](int idx) {
      const VertexRef v{pick + 1, idx + 1};
      int score = std::numeric_limits<int>::max();
      for (int j = 0; j < k; ++j) {
        if (j == pick || filled[j] == h) continue;
        const int left = bits::count_and(cand[j], g.row(g.id(v), j)) - (h - filled[j]);
        score = std::min(score, left);
      }
      if (best_v < 0 || score > best_score) best_v = idx, best_score = score;
    });
    const VertexRef v{pick + 1, best_v + 1};
    chosen[pick].push_back(v);
    ++filled[pick];
    bits::reset(cand[pick], best_v);
    for (int j = 0; j < k; ++j) {
      if (j == pick) continue;
      const auto nb = g.row(g.id(v), j);
      for (std::size_t w = 0; w < cand[j].size(); ++w) cand[j][w] &= nb[w];
    }
  }
  for (auto& c : chosen) std::sort(c.begin(), c.end());
  out.slots = std::move(chosen);
  return out;
}

// The chosen vertices span a complete k-partite graph with h per part.
inline bool verify_embedding(const KPartiteGraph& g, const std::vector<std::vector<VertexRef>>& slots, int h) {
  if (static_cast<int>(slots.size()) != g.k()) return false;
  for (int i = 0; i < g.k(); ++i) {
    if (static_cast<int>(slots[i].size()) != h) return false;
    for (const auto& v : slots[i])
      if (v.part != i + 1) return false;
    for (int j = i + 1; j < g.k(); ++j)
      for (const auto& u : slots[i])
        for (const auto& w : slots[j])
          if (!g.adjacent(u, w)) return false;
  }
  return true;
}

}  // namespace tilekit
