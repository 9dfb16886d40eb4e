#pragma once

// Brute-force reference implementations. Each one shares no code path with
// the library routine it checks beyond the graph and number types.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "tilekit/tilekit.hpp"

namespace oracle {

using namespace tilekit;

// Every tuple (one vertex per part), kept when all pairs are adjacent.
inline std::set<std::vector<VertexRef>> cliques(const KPartiteGraph& g) {
  std::set<std::vector<VertexRef>> out;
  const int k = g.k(), n = g.n();
  std::vector<int> idx(k, 1);
  while (true) {
    std::vector<VertexRef> t;
    for (int p = 0; p < k; ++p) t.push_back({p + 1, idx[p]});
    bool ok = true;
    for (int a = 0; a < k && ok; ++a)
      for (int b = a + 1; b < k && ok; ++b) ok = g.adjacent(t[a], t[b]);
    if (ok) out.insert(t);
    int p = k - 1;
    while (p >= 0 && idx[p] == n) idx[p--] = 1;
    if (p < 0) break;
    ++idx[p];
  }
  return out;
}

// Minimum bipartite degree straight from adjacency queries.
inline int min_degree(const KPartiteGraph& g) {
  int best = g.n();
  for (int i = 1; i <= g.k(); ++i)
    for (int j = 1; j <= g.k(); ++j) {
      if (i == j) continue;
      for (int a = 1; a <= g.n(); ++a) {
        int d = 0;
        for (int b = 1; b <= g.n(); ++b) d += g.adjacent({i, a}, {j, b});
        best = std::min(best, d);
      }
    }
  return best;
}

// Perfect K_k-tiling by trying every (k-1)-tuple of permutations: vertex a
// of part 1 goes with sigma_p(a) of part p.
inline bool has_perfect_tiling(const KPartiteGraph& g) {
  const int k = g.k(), n = g.n();
  std::vector<std::vector<int>> sigma(k, std::vector<int>(n));
  for (auto& s : sigma) std::iota(s.begin(), s.end(), 1);
  auto rec = [&](auto&& self, int p) -> bool {
    if (p == k) {
      for (int a = 0; a < n; ++a)
        for (int x = 0; x < k; ++x)
          for (int y = x + 1; y < k; ++y)
            if (!g.adjacent({x + 1, sigma[x][a]}, {y + 1, sigma[y][a]})) return false;
      return true;
    }
    std::sort(sigma[p].begin(), sigma[p].end());
    do {
      // Prune against part 1 early.
      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        for (int x = 0; x < p && ok; ++x) ok = g.adjacent({x + 1, sigma[x][a]}, {p + 1, sigma[p][a]});
      if (ok && self(self, p + 1)) return true;
    } while (std::next_permutation(sigma[p].begin(), sigma[p].end()));
    return false;
  };
  return rec(rec, 1);
}

// Hall's condition over every subset of part 1.
inline bool hall_holds(const KPartiteGraph& g) {
  const int n = g.n();
  for (unsigned s = 1; s < (1u << n); ++s) {
    std::set<int> nb;
    for (int a = 0; a < n; ++a)
      if (s >> a & 1)
        for (int b = 1; b <= n; ++b)
          if (g.adjacent({1, a + 1}, {2, b})) nb.insert(b);
    if (static_cast<int>(nb.size()) < std::popcount(s)) return false;
  }
  return true;
}

// Gaussian elimination over the rationals; nothing if singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m, std::vector<Rational> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c].is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c].is_zero()) continue;
      const Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) r[i] /= m[i][i];
  return r;
}

// Optimum of a bounded LP by enumerating every basic solution: choose n
// of the m + n constraints (rows and x >= 0) to be tight, solve, keep the
// feasible ones. Nothing when no basic solution is feasible.
inline std::optional<Rational> lp_optimum(const LinearProgram& lp) {
  const int n = lp.column_count(), m = lp.row_count();
  std::vector<std::vector<Rational>> dense(m, std::vector<Rational>(n));
  for (int i = 0; i < m; ++i)
    for (const auto& t : lp.rows[i]) dense[i][t.column] += t.coef;
  const bool maximize = lp.sense == Sense::maximize;
  std::optional<Rational> best;
  std::vector<int> pick(n);
  auto visit = [&] {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (int c : pick) {
      if (c < m) {
        a.push_back(dense[c]);
        b.push_back(lp.rhs[c]);
      } else {
        std::vector<Rational> e(n);
        e[c - m] = Rational(1);
        a.push_back(e);
        b.push_back(Rational(0));
      }
    }
    auto x = solve_square(a, b);
    if (!x) return;
    for (const auto& v : *x)
      if (v.sign() < 0) return;
    for (int i = 0; i < m; ++i) {
      Rational s;
      for (int j = 0; j < n; ++j) s += dense[i][j] * (*x)[j];
      if (maximize ? s > lp.rhs[i] : s < lp.rhs[i]) return;
    }
    Rational val;
    for (int j = 0; j < n; ++j) val += lp.objective[j] * (*x)[j];
    if (!best || (maximize ? val > *best : val < *best)) best = val;
  };
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == n) {
      visit();
      return;
    }
    for (int c = start; c < m + n; ++c) {
      pick[pos] = c;
      self(self, pos + 1, c + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Exhaustive epsilon-regularity over all 2^a * 2^b subpairs, with
// Rational epsilon: |X| >= eps|A|, |Y| >= eps|B| qualify.
inline bool regular(const BipartitePair& p, const Rational& eps) {
  const int a = p.a(), b = p.b();
  const Rational d = density(p);
  for (unsigned xs = 1; xs < (1u << a); ++xs) {
    if (Rational(std::popcount(xs)) < eps * Rational(a)) continue;
    for (unsigned ys = 1; ys < (1u << b); ++ys) {
      if (Rational(std::popcount(ys)) < eps * Rational(b)) continue;
      long e = 0;
      for (int x = 0; x < a; ++x)
        if (xs >> x & 1)
          for (int y = 0; y < b; ++y) e += (ys >> y & 1) && p.adjacent(x, y);
      Rational diff = Rational(e, std::popcount(xs) * std::popcount(ys)) - d;
      if (diff.sign() < 0) diff = -diff;
      if (diff > eps) return false;
    }
  }
  return true;
}

// Ordered good pairs counted with Rational comparisons throughout.
inline long good_pairs(const BipartitePair& p, const Rational& d, const Rational& eps) {
  const Rational yb(p.b());
  long count = 0;
  for (int x = 0; x < p.a(); ++x)
    for (int x2 = 0; x2 < p.a(); ++x2) {
      int dx = 0, dx2 = 0, co = 0;
      for (int y = 0; y < p.b(); ++y) {
        dx += p.adjacent(x, y);
        dx2 += p.adjacent(x2, y);
        co += p.adjacent(x, y) && p.adjacent(x2, y);
      }
      if (Rational(dx) > (d - eps) * yb && Rational(dx2) > (d - eps) * yb && Rational(co) < (d + eps) * (d + eps) * yb)
        ++count;
    }
  return count;
}

// Appendix bounds evaluated directly in double precision.
inline double aggregate_bound(double eps, double l, double lp, double m) {
  return 8 * m * std::exp(-9 * std::pow(eps, 4) * lp * lp / (2 * l));
}

}  // namespace oracle
