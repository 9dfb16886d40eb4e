#pragma once

#include <string>
#include <vector>

#include "tilekit/cliques.hpp"
#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/lp.hpp"
#include "tilekit/rational.hpp"

namespace tilekit {

// max sum w(T)  s.t.  sum_{T ∋ v} w(T) <= 1 for every vertex v, w >= 0.
// Column t is cliques[t]; row r is the vertex with dense id r.
inline LinearProgram build_primal_tiling_lp(const KPartiteGraph& g, const std::vector<Clique>& cliques) {
  LinearProgram lp;
  lp.sense = Sense::maximize;
  lp.objective.assign(cliques.size(), Rational(1));
  lp.rows.assign(g.vertex_count(), {});
  lp.rhs.assign(g.vertex_count(), Rational(1));
  for (std::size_t t = 0; t < cliques.size(); ++t)
    for (const auto& v : cliques[t]) lp.rows[g.id(v)].push_back({static_cast<int>(t), Rational(1)});
  return lp;
}

// min sum x(v)  s.t.  sum_{v ∈ T} x(v) >= 1 for every clique T, x >= 0.
inline LinearProgram build_dual_tiling_lp(const KPartiteGraph& g, const std::vector<Clique>& cliques) {
  LinearProgram lp;
  lp.sense = Sense::minimize;
  lp.objective.assign(g.vertex_count(), Rational(1));
  lp.rhs.assign(cliques.size(), Rational(1));
  lp.rows.reserve(cliques.size());
  for (const auto& c : cliques) {
    std::vector<Term> row;
    for (const auto& v : c) row.push_back({g.id(v), Rational(1)});
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

struct TauResult {
  Rational tau;
  std::vector<Clique> cliques;
  LinearProgram primal_lp;
  LPSolution primal;
  LinearProgram dual_lp;
  LPSolution dual;
};

// Solves both programs independently and insists on exact strong duality.
inline TauResult fractional_tiling_number(const KPartiteGraph& g, std::size_t clique_cap = kDefaultCliqueCap) {
  TauResult r;
  r.cliques = enumerate_transversal_cliques(g, clique_cap);
  r.primal_lp = build_primal_tiling_lp(g, r.cliques);
  r.dual_lp = build_dual_tiling_lp(g, r.cliques);
  r.primal = solve_exact(r.primal_lp);
  r.dual = solve_exact(r.dual_lp);
  if (r.primal.status != LPStatus::optimal || r.dual.status != LPStatus::optimal)
    throw InvariantError("tiling LP not solved to optimality");
  if (r.primal.objective != r.dual.objective)
    throw InvariantError("strong duality failed: primal " + r.primal.objective.to_string() + " vs dual " +
                         r.dual.objective.to_string());
  r.tau = r.primal.objective;
  return r;
}

// Load sum_{T ∋ v} w(T) for every vertex, by dense id.
inline std::vector<Rational> vertex_loads(const KPartiteGraph& g, const std::vector<Clique>& cliques,
                                          const LPSolution& primal) {
  std::vector<Rational> load(g.vertex_count());
  for (std::size_t t = 0; t < cliques.size(); ++t) {
    if (primal.values[t].is_zero()) continue;
    for (const auto& v : cliques[t]) load[g.id(v)] += primal.values[t];
  }
  return load;
}

// Vertices whose load is strictly below 1.
inline std::vector<VertexRef> slack_vertices(const KPartiteGraph& g, const std::vector<Clique>& cliques,
                                             const LPSolution& primal) {
  std::vector<VertexRef> out;
  const auto load = vertex_loads(g, cliques, primal);
  for (int v = 0; v < g.vertex_count(); ++v)
    if (load[v] < Rational(1)) out.push_back(g.ref(v));
  return out;
}

// Least D with D*x integral for every value x of sol.
inline std::int64_t common_denominator(const std::vector<Rational>& values) {
  mpz_class d = 1;
  for (const auto& v : values) d = lcm(d, v.den());
  return to_int64(d);
}
inline std::int64_t common_denominator(const LPSolution& sol) { return common_denominator(sol.values); }

// Slack vertices at which the dual optimum is nonzero. The inductive step
// wants a dual optimum vanishing on slack vertices; a simplex vertex need
// not have that, so this only reports.
inline std::vector<VertexRef> dual_nonzero_on_slack(const KPartiteGraph& g, const std::vector<VertexRef>& slack,
                                                    const LPSolution& dual) {
  std::vector<VertexRef> out;
  for (const auto& v : slack)
    if (!dual.values[g.id(v)].is_zero()) out.push_back(v);
  return out;
}

struct InductiveWitness {
  KPartiteGraph graph;          // (k-1)-partite on n' vertices per part
  std::vector<VertexRef> origin;  // by dense id of `graph`, the vertex of G it came from
  int n_prime = 0;
  Rational dual_mass;  // sum of the dual values over the chosen vertices
};

// The (k-1)-partite graph induced on the first n' = ceil((k-1)n/k)
// neighbours of z in every part other than z's own.
inline InductiveWitness inductive_witness(const KPartiteGraph& g, int part, VertexRef z, const LPSolution& dual) {
  const int k = g.k(), n = g.n();
  if (k < 3) throw PreconditionError("inductive_witness needs k >= 3");
  if (!g.contains(z) || z.part != part) throw ParameterError("z must be a vertex of part " + std::to_string(part));
  const int n_prime = ((k - 1) * n + k - 1) / k;

  std::vector<std::vector<VertexRef>> chosen;
  for (int q = 1; q <= k; ++q) {
    if (q == part) continue;
    auto nb = g.neighbors(z, q);
    if (static_cast<int>(nb.size()) < n_prime)
      throw PreconditionError("z=" + z.to_string() + " has " + std::to_string(nb.size()) + " neighbours in part " +
                              std::to_string(q) + ", needs " + std::to_string(n_prime));
    nb.resize(n_prime);
    chosen.push_back(std::move(nb));
  }

  InductiveWitness w;
  w.n_prime = n_prime;
  KPartiteGraph::Builder b(k - 1, n_prime);
  for (int p = 0; p < k - 1; ++p)
    for (int q = p + 1; q < k - 1; ++q)
      for (int a = 0; a < n_prime; ++a)
        for (int c = 0; c < n_prime; ++c)
          if (g.adjacent(chosen[p][a], chosen[q][c])) b.add_edge({p + 1, a + 1}, {q + 1, c + 1});
  w.graph = std::move(b).build();
  for (const auto& part_vertices : chosen)
    for (const auto& v : part_vertices) {
      w.origin.push_back(v);
      if (!dual.values.empty()) w.dual_mass += dual.values[g.id(v)];
    }
  return w;
}

struct DualityReport {
  bool equal = false;
  Rational primal_value;
  Rational dual_value;
  Rational gap;  // dual - primal
  std::vector<std::string> slackness_violations;

  bool ok() const { return equal && slackness_violations.empty(); }
};

// Checks an LP pair built as (lp, dual_of(lp)) or as the two tiling
// programs. Both solutions must be feasible; an infeasible one raises a
// VerificationError naming the violated constraint.
inline DualityReport verify_duality(const LinearProgram& primal_lp, const LPSolution& primal,
                                    const LinearProgram& dual_lp, const LPSolution& dual) {
  if (auto v = find_violation(primal_lp, primal.values)) throw VerificationError("primal infeasible: " + *v);
  if (auto v = find_violation(dual_lp, dual.values)) throw VerificationError("dual infeasible: " + *v);
  if (primal_lp.column_count() != dual_lp.row_count() || primal_lp.row_count() != dual_lp.column_count())
    throw ParameterError("verify_duality: programs are not transposes of each other");

  DualityReport r;
  r.primal_value = objective_value(primal_lp, primal.values);
  r.dual_value = objective_value(dual_lp, dual.values);
  r.gap = r.dual_value - r.primal_value;
  r.equal = r.gap.is_zero();
  for (int j = 0; j < primal_lp.column_count(); ++j)
    if (primal.values[j].sign() > 0 && dual_lp.row_value(j, dual.values) != dual_lp.rhs[j])
      r.slackness_violations.push_back("primal variable " + std::to_string(j) + " > 0 but dual row " +
                                       std::to_string(j) + " is not tight");
  for (int i = 0; i < dual_lp.column_count(); ++i)
    if (dual.values[i].sign() > 0 && primal_lp.row_value(i, primal.values) != primal_lp.rhs[i])
      r.slackness_violations.push_back("dual variable " + std::to_string(i) + " > 0 but primal row " +
                                       std::to_string(i) + " is not tight");
  return r;
}

}  // namespace tilekit
