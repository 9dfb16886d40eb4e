#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/fraclp.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/radical.hpp"
#include "tilekit/rational.hpp"
#include "tilekit/tiler.hpp"

namespace tilekit {

// A reduced graph whose vertex (i, j) is u_i^(j): the cluster of part i in
// column j. Every column {(1, j), ..., (k, j)} is a K_k; column 1 is the
// receptacle.
class ColumnStructure {
 public:
  ColumnStructure() = default;

  explicit ColumnStructure(KPartiteGraph g) : g_(std::move(g)) {
    if (g_.n() < 1) throw ParameterError("a column structure needs at least one column");
    for (int j = 1; j <= g_.n(); ++j) {
      Clique col;
      for (int i = 1; i <= g_.k(); ++i) col.push_back({i, j});
      if (!is_transversal_clique(g_, col))
        throw ConstructionError("column " + std::to_string(j) + " is not a K_k in the reduced graph");
    }
  }

  // Relabels g so that tile t of `tiling` becomes column t+1.
  static ColumnStructure from_tiling(const KPartiteGraph& g, const Tiling& tiling) {
    if (const auto check = verify_tiling(g, tiling, 1); !check.ok)
      throw ConstructionError("not a perfect K_k-tiling: " + check.reason);
    std::vector<int> column(g.vertex_count());
    for (std::size_t t = 0; t < tiling.tiles.size(); ++t)
      for (const auto& v : tiling.tiles[t]) column[g.id(v)] = static_cast<int>(t) + 1;
    KPartiteGraph::Builder b(g.k(), g.n());
    for (const auto& [u, v] : g.edges())
      b.add_edge({u.part, column[g.id(u)]}, {v.part, column[g.id(v)]});
    return ColumnStructure(std::move(b).build());
  }

  // Columns from an exact perfect-tiling search; fails if there is none.
  static ColumnStructure from_graph(const KPartiteGraph& g, const SearchOptions& opt = {}) {
    auto t = perfect_clique_tiling(g, opt);
    if (!t) throw PreconditionError("reduced graph has no perfect K_k-tiling");
    return from_tiling(g, *t);
  }

  const KPartiteGraph& graph() const { return g_; }
  int k() const { return g_.k(); }
  int columns() const { return g_.n(); }
  static VertexRef cluster(int part, int column) { return {part, column}; }

 private:
  KPartiteGraph g_;
};

struct ReachPair {
  Clique t1, t2;  // sorted by part
};

// Empty when (t1, t2) meets the reachability conclusion for (i, j).
inline std::optional<std::string> verify_reach(const ColumnStructure& cs, int i, int j, const ReachPair& r) {
  const auto& g = cs.graph();
  const VertexRef a{i, 1}, b{i, j};
  if (!is_transversal_clique(g, r.t1)) return "T1 is not a K_k";
  if (!is_transversal_clique(g, r.t2)) return "T2 is not a K_k";
  std::vector<VertexRef> s1(r.t1), s2(r.t2), sym, uni;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  std::set_symmetric_difference(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(sym));
  std::vector<VertexRef> expect{a, b};
  std::sort(expect.begin(), expect.end());
  if (sym != expect) return "symmetric difference is not {u_i^(1), u_i^(j)}";
  std::set_union(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(uni));
  for (const auto& v : uni)
    if ((v.index == 1 || v.index == j) && !(v == a || v == b))
      return "uses " + v.to_string() + " from column 1 or column " + std::to_string(j);
  return std::nullopt;
}

// Two K_k's differing exactly in u_i^(1) versus u_i^(j) and otherwise
// avoiding columns 1 and j. The shared vertices are picked greedily in part
// order, each the lowest-index common neighbour of everything chosen so far.
inline ReachPair reach(const ColumnStructure& cs, int i, int j) {
  const auto& g = cs.graph();
  const int k = g.k(), l = g.n();
  if (i < 1 || i > k) throw ParameterError("part out of range");
  if (j < 2 || j > l) throw ParameterError("column must lie in 2..l'");
  const int delta = min_bipartite_degree(g).first;
  if (Rational(delta) < Rational(k - 1, k) * Rational(l) + Rational(2))
    throw PreconditionError("reach needs min bipartite degree >= (k-1)l'/k + 2; got " + std::to_string(delta));
  const VertexRef a{i, 1}, b{i, j};
  std::vector<VertexRef> shared;
  for (int t = 1; t <= k; ++t) {
    if (t == i) continue;
    std::optional<VertexRef> pick;
    for (int c = 2; c <= l && !pick; ++c) {
      if (c == j) continue;
      const VertexRef w{t, c};
      if (!g.adjacent(w, a) || !g.adjacent(w, b)) continue;
      if (std::all_of(shared.begin(), shared.end(), [&](const VertexRef& x) { return g.adjacent(w, x); })) pick = w;
    }
    if (!pick)
      throw InvariantError("reach: no common neighbour left in part " + std::to_string(t) + " for i=" +
                           std::to_string(i) + ", j=" + std::to_string(j));
    shared.push_back(*pick);
  }
  ReachPair r;
  r.t1 = shared;
  r.t1.push_back(a);
  r.t2 = shared;
  r.t2.push_back(b);
  std::sort(r.t1.begin(), r.t1.end());
  std::sort(r.t2.begin(), r.t2.end());
  if (auto bad = verify_reach(cs, i, j, r)) throw InvariantError("reach output fails verification: " + *bad);
  return r;
}

// Counts per cluster (i, j), 1-based, and per-part leftover sizes, with the
// parameters of the balancing step.
class ClusterLedger {
 public:
  struct Counts {
    std::int64_t red = 0, blue = 0, uncolored = 0;
    std::int64_t total() const { return red + blue + uncolored; }
    std::int64_t non_red() const { return blue + uncolored; }
  };
  struct Params {
    std::int64_t l_prime = 0;  // original cluster size L'
    std::int64_t n = 0;        // vertices per part of the host graph
    int h = 1;
    Rational d_prime, zeta, eps_prime, gamma;
    std::int64_t d0 = 1;       // starting value for the removal quantum's D_0
  };

  ClusterLedger() = default;
  ClusterLedger(int k, int columns, Params p) : k_(k), l_(columns), p_(std::move(p)) {
    if (k < 2 || columns < 1) throw ParameterError("ledger needs k >= 2 and at least one column");
    if (p_.l_prime < 1 || p_.h < 1 || p_.d0 < 1) throw ParameterError("ledger needs L', h, D_0 >= 1");
    cells_.assign(static_cast<std::size_t>(k) * columns, Counts{});
    leftover_.assign(k, 0);
  }

  int k() const { return k_; }
  int columns() const { return l_; }
  const Params& params() const { return p_; }

  Counts& at(int part, int column) { return cells_[index(part, column)]; }
  const Counts& at(int part, int column) const { return cells_[index(part, column)]; }
  std::int64_t& leftover(int part) { return leftover_.at(part - 1); }
  std::int64_t leftover(int part) const { return leftover_.at(part - 1); }

  // Empty when every count is nonnegative.
  std::optional<std::string> check() const {
    for (int i = 1; i <= k_; ++i) {
      if (leftover(i) < 0) return "negative leftover in part " + std::to_string(i);
      for (int j = 1; j <= l_; ++j) {
        const auto& c = at(i, j);
        if (c.red < 0 || c.blue < 0 || c.uncolored < 0)
          return "negative count at cluster (" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
    return std::nullopt;
  }

 private:
  std::size_t index(int part, int column) const {
    if (part < 1 || part > k_ || column < 1 || column > l_) throw ParameterError("cluster index out of range");
    return static_cast<std::size_t>(part - 1) * l_ + (column - 1);
  }

  int k_ = 0, l_ = 0;
  Params p_;
  std::vector<Counts> cells_;
  std::vector<std::int64_t> leftover_;
};

// Vertex sets of the clusters of a host graph: clusters[i-1][j-1] is the
// cluster of part i in column j.
using VertexClusters = std::vector<std::vector<std::vector<VertexRef>>>;

// v (in part i) has at least (d'/2) L' neighbours in every other cluster of
// column j.
inline bool belongs(const KPartiteGraph& g, VertexRef v, const VertexClusters& clusters, int j,
                    const ClusterLedger& ledger) {
  const Rational need = ledger.params().d_prime / Rational(2) * Rational(ledger.params().l_prime);
  for (int q = 1; q <= g.k(); ++q) {
    if (q == v.part) continue;
    const auto& c = clusters.at(q - 1).at(j - 1);
    long deg = 0;
    for (const auto& u : c) deg += g.adjacent(v, u);
    if (Rational(deg) < need) return false;
  }
  return true;
}

// Per-cluster intake cap k eps' n / ((1/k + gamma/2) l').
inline Rational leftover_cap(int k, int columns, const ClusterLedger::Params& p) {
  return Rational(k) * p.eps_prime * Rational(p.n) /
         ((Rational(1, k) + p.gamma / Rational(2)) * Rational(columns));
}

// Sends each leftover vertex to the first non-receptacle column it belongs
// in whose intake for its part is still below the cap. Updates the ledger:
// the receiving cluster gains an uncolored vertex and the part's leftover
// shrinks by one.
inline std::map<VertexRef, int> assign_leftover(const KPartiteGraph& g, const ColumnStructure& cs,
                                                const VertexClusters& clusters,
                                                const std::vector<std::vector<VertexRef>>& leftover,
                                                ClusterLedger& ledger) {
  const int k = cs.k(), l = cs.columns();
  const auto& p = ledger.params();
  const Rational cap = leftover_cap(k, l, p);
  if (cap > Rational(k * k) * p.eps_prime * Rational(p.l_prime))
    throw PreconditionError("intake cap " + cap.to_string() + " exceeds k^2 eps' L'");
  const Rational need_cols = (Rational(1, k) + p.gamma / Rational(2)) * Rational(l);
  for (const auto& part : leftover)
    for (const auto& v : part) {
      int count = 0;
      for (int j = 2; j <= l; ++j) count += belongs(g, v, clusters, j, ledger);
      if (Rational(count) < need_cols)
        throw PreconditionError("leftover vertex " + v.to_string() + " belongs in only " + std::to_string(count) +
                                " non-receptacle columns, needs " + need_cols.to_string());
    }
  std::map<VertexRef, int> out;
  std::vector<std::vector<long>> intake(k, std::vector<long>(l + 1, 0));
  for (const auto& part : leftover)
    for (const auto& v : part) {
      int dest = 0;
      for (int j = 2; j <= l && dest == 0; ++j)
        if (Rational(intake[v.part - 1][j]) < cap && belongs(g, v, clusters, j, ledger)) dest = j;
      if (dest == 0) throw InvariantError("leftover vertex " + v.to_string() + " found no column below the cap");
      ++intake[v.part - 1][dest];
      out[v] = dest;
      ++ledger.at(v.part, dest).uncolored;
      --ledger.leftover(v.part);
    }
  return out;
}

// The removal quantum h D_0 ceil(zeta L' / D_0) and the non-red target
// h ceil((1 - d'/4) L' / h).
inline std::int64_t removal_quantum(const ClusterLedger::Params& p, std::int64_t d0) {
  return p.h * d0 * to_int64((p.zeta * Rational(p.l_prime) / Rational(d0)).ceil());
}
inline std::int64_t non_red_target(const ClusterLedger::Params& p) {
  const Rational x = (Rational(1) - p.d_prime / Rational(4)) * Rational(p.l_prime) / Rational(p.h);
  return p.h * to_int64(x.ceil());
}

struct AuxiliaryGraph {
  KPartiteGraph graph;                        // A_r
  std::vector<std::vector<int>> multiplicity;  // [part-1][column-1]; column 1 stays 0
  std::vector<VertexRef> origin;              // A_r dense id -> cluster (i, j)
  std::int64_t quantum = 0;
  std::int64_t target = 0;
  std::int64_t d0 = 1;
  int part_size = 0;
  bool degree_ratio_ok = false;
  Rational min_degree_ratio;
  bool within_size_bound = false;  // part size <= (l'-1)(d'/4 + k^2 eps')/(h zeta)
};

// Blow-up of the reduced graph minus column 1. Cluster (i, j) gets
// (nu - target)/quantum - 1 copies, rounded down or up so all parts have
// floor(sum of the exact values) copies: in each part the clusters with the
// largest fractional parts round up, ties to the lower column.
inline AuxiliaryGraph build_auxiliary_graph(const ColumnStructure& cs, const ClusterLedger& ledger,
                                            std::int64_t d0 = 0) {
  const int k = cs.k(), l = cs.columns();
  const auto& p = ledger.params();
  if (ledger.k() != k || ledger.columns() != l) throw ParameterError("ledger does not match the column structure");
  if (d0 == 0) d0 = p.d0;
  AuxiliaryGraph a;
  a.d0 = d0;
  a.quantum = removal_quantum(p, d0);
  a.target = non_red_target(p);
  const Radical root_zeta = Radical::root(p.zeta, 2);
  const Rational lp(p.l_prime);
  const Rational upper = (Rational(1) + Rational(k * k) * p.eps_prime) * lp;
  std::optional<std::int64_t> common_sum;
  for (int i = 1; i <= k; ++i) {
    std::int64_t sum = 0;
    for (int j = 2; j <= l; ++j) {
      const std::int64_t nu = ledger.at(i, j).non_red();
      // (1 - sqrt(zeta)) L' <= nu  <=>  sqrt(zeta) L' >= L' - nu
      if (!(root_zeta.scaled(lp) >= lp - Rational(nu)) || Rational(nu) > upper)
        throw ParameterError("nu(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(nu) +
                             " outside [(1-sqrt(zeta))L', (1+k^2 eps')L']");
      sum += nu;
    }
    if (common_sum && *common_sum != sum)
      throw ParameterError("non-red totals differ across parts (" + std::to_string(*common_sum) + " vs " +
                           std::to_string(sum) + ")");
    common_sum = sum;
  }

  a.multiplicity.assign(k, std::vector<int>(l, 0));
  std::optional<std::int64_t> size;
  for (int i = 1; i <= k; ++i) {
    std::vector<Rational> exact(l + 1);
    Rational total;
    std::int64_t floors = 0;
    std::vector<std::pair<Rational, int>> fractions;  // (-fraction, column)
    for (int j = 2; j <= l; ++j) {
      exact[j] = Rational(ledger.at(i, j).non_red() - a.target, a.quantum) - Rational(1);
      total += exact[j];
      const std::int64_t f = to_int64(exact[j].floor());
      floors += f;
      a.multiplicity[i - 1][j - 1] = static_cast<int>(f);
      const Rational frac = exact[j] - Rational(f);
      if (frac.sign() > 0) fractions.emplace_back(-frac, j);
    }
    const std::int64_t want = to_int64(total.floor());
    std::sort(fractions.begin(), fractions.end());
    for (std::int64_t up = 0; up < want - floors; ++up) ++a.multiplicity[i - 1][fractions.at(up).second - 1];
    for (int j = 2; j <= l; ++j)
      if (a.multiplicity[i - 1][j - 1] < 0)
        throw ParameterError("cluster (" + std::to_string(i) + "," + std::to_string(j) +
                             ") has too few non-red vertices for one removal quantum");
    if (size && *size != want) throw InvariantError("auxiliary part sizes differ");
    size = want;
  }
  a.part_size = static_cast<int>(*size);

  std::vector<std::vector<int>> first(k, std::vector<int>(l + 1, 0));  // first A_r index of (i, j)
  for (int i = 0; i < k; ++i) {
    int next = 1;
    for (int j = 2; j <= l; ++j) {
      first[i][j] = next;
      next += a.multiplicity[i][j - 1];
    }
  }
  KPartiteGraph::Builder b(k, a.part_size);
  a.origin.assign(static_cast<std::size_t>(k) * a.part_size, {});
  for (int i = 1; i <= k; ++i)
    for (int j = 2; j <= l; ++j)
      for (int c = 0; c < a.multiplicity[i - 1][j - 1]; ++c)
        a.origin[static_cast<std::size_t>(i - 1) * a.part_size + first[i - 1][j] + c - 1] = {i, j};
  const auto& gr = cs.graph();
  for (int i = 1; i <= k; ++i)
    for (int i2 = i + 1; i2 <= k; ++i2)
      for (int j = 2; j <= l; ++j)
        for (int j2 = 2; j2 <= l; ++j2) {
          if (!gr.adjacent({i, j}, {i2, j2})) continue;
          for (int c = 0; c < a.multiplicity[i - 1][j - 1]; ++c)
            for (int c2 = 0; c2 < a.multiplicity[i2 - 1][j2 - 1]; ++c2)
              b.add_edge({i, first[i - 1][j] + c}, {i2, first[i2 - 1][j2] + c2});
        }
  a.graph = std::move(b).build();

  a.min_degree_ratio = Rational(1);
  if (a.part_size > 0) {
    const int delta = min_bipartite_degree(a.graph).first;
    a.min_degree_ratio = Rational(delta, a.part_size);
  }
  a.degree_ratio_ok = a.min_degree_ratio >= Rational(k - 1, k);
  a.within_size_bound = Rational(a.part_size) * Rational(p.h) * p.zeta <=
                        Rational(l - 1) * (p.d_prime / Rational(4) + Rational(k * k) * p.eps_prime);
  return a;
}

struct BalancePlan {
  AuxiliaryGraph aux;
  Rational tau;
  std::int64_t lp_denominator = 1;  // D_0' of the optimum found on A_r
  std::size_t tiles = 0;            // K_k's in the perfect tiling of A_r(D_0)
  std::vector<std::vector<std::int64_t>> removed;  // [part-1][column-1], vertices in removed K_h^k copies
  std::vector<std::vector<std::int64_t>> topped_up;  // moved to the leftover set
  std::vector<std::int64_t> new_leftover;           // per part, after balancing
  std::int64_t target = 0;
  Rational leftover_bound;  // 3 h zeta n
  ClusterLedger ledger;     // ledger after the plan
};

// Balances the non-red counts of the non-receptacle clusters. D_0 starts at
// the ledger's value and is replaced by lcm(D_0, D_0') until the common
// denominator D_0' of the LP optimum on A_r divides it, so the optimum
// read at D_0 is integral.
inline BalancePlan balance_columns(const ColumnStructure& cs, const ClusterLedger& ledger, int max_rounds = 16) {
  const int k = cs.k(), l = cs.columns();
  const auto& p = ledger.params();
  BalancePlan plan;
  std::int64_t d0 = p.d0;
  for (int round = 0;; ++round) {
    if (round == max_rounds) throw InvariantError("D_0 did not stabilize");
    plan.aux = build_auxiliary_graph(cs, ledger, d0);
    if (!plan.aux.degree_ratio_ok)
      throw PreconditionError("auxiliary graph degree ratio " + plan.aux.min_degree_ratio.to_string() +
                              " below (k-1)/k");
    if (plan.aux.part_size == 0) {
      plan.tau = Rational(0);
      break;
    }
    const TauResult tr = fractional_tiling_number(plan.aux.graph);
    plan.tau = tr.tau;
    if (tr.tau != Rational(plan.aux.part_size))
      throw PreconditionError("fractional tiling number of A_r is " + tr.tau.to_string() + ", below " +
                              std::to_string(plan.aux.part_size));
    plan.lp_denominator = common_denominator(tr.primal);
    const std::int64_t next = to_int64(lcm(mpz_class(static_cast<long>(d0)), mpz_class(static_cast<long>(plan.lp_denominator))));
    if (next != d0) {
      d0 = next;
      continue;
    }
    const BlowUpTiling bt = tiling_from_fractional(plan.aux.graph, tr.cliques, tr.primal, d0);
    if (!bt.complete) throw InvariantError("blow-up tiling of A_r is not perfect");
    plan.tiles = bt.tiling.tiles.size();
    break;
  }

  const std::int64_t q = plan.aux.quantum;
  plan.target = plan.aux.target;
  plan.ledger = ledger;
  plan.removed.assign(k, std::vector<std::int64_t>(l, 0));
  plan.topped_up.assign(k, std::vector<std::int64_t>(l, 0));
  plan.new_leftover.assign(k, 0);
  plan.leftover_bound = Rational(3 * p.h) * p.zeta * Rational(p.n);
  for (int i = 1; i <= k; ++i) {
    for (int j = 2; j <= l; ++j) {
      // Each A_r copy of (i, j) is covered D_0 times in the blow-up tiling,
      // and each cover removes h ceil(zeta L'/D_0) vertices: q per copy.
      const std::int64_t removed = static_cast<std::int64_t>(plan.aux.multiplicity[i - 1][j - 1]) * q;
      auto& c = plan.ledger.at(i, j);
      const std::int64_t extra = c.non_red() - removed - plan.target;
      if (extra < 0) throw InvariantError("cluster (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") falls below the non-red target");
      if (c.uncolored < removed + extra)
        throw PreconditionError("cluster (" + std::to_string(i) + "," + std::to_string(j) +
                                ") has too few uncolored vertices to remove");
      c.uncolored -= removed + extra;
      plan.removed[i - 1][j - 1] = removed;
      plan.topped_up[i - 1][j - 1] = extra;
      plan.ledger.leftover(i) += extra;
      if (c.non_red() != plan.target) throw InvariantError("non-red count missed the target");
    }
    plan.new_leftover[i - 1] = plan.ledger.leftover(i);
    if (Rational(plan.new_leftover[i - 1]) > plan.leftover_bound)
      throw InvariantError("new leftover of part " + std::to_string(i) + " is " +
                           std::to_string(plan.new_leftover[i - 1]) + " > 3 h zeta n = " +
                           plan.leftover_bound.to_string());
  }
  if (auto bad = plan.ledger.check()) throw InvariantError(*bad);
  return plan;
}

// Non-red vertices to drop from each receptacle cluster: n - h floor(n/h).
inline std::int64_t receptacle_remainder(std::int64_t n, std::int64_t h) {
  if (n < 1 || h < 1) throw ParameterError("receptacle_remainder needs n, h >= 1");
  return n - h * (n / h);
}

}  // namespace tilekit
