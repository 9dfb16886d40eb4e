#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/random.hpp"

namespace tilekit {

// A vertex of a k-partite graph: part in [1..k], index in [1..n].
struct VertexRef {
  int part = 1;
  int index = 1;

  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
  std::string to_string() const { return "(" + std::to_string(part) + "," + std::to_string(index) + ")"; }
};

using Edge = std::pair<VertexRef, VertexRef>;

namespace bits {

inline std::size_t words_for(int n) { return (static_cast<std::size_t>(n) + 63) / 64; }
inline bool test(std::span<const std::uint64_t> s, int i) { return (s[i >> 6] >> (i & 63)) & 1u; }
inline void set(std::span<std::uint64_t> s, int i) { s[i >> 6] |= std::uint64_t{1} << (i & 63); }
inline void reset(std::span<std::uint64_t> s, int i) { s[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

inline int count(std::span<const std::uint64_t> s) {
  int c = 0;
  for (auto w : s) c += std::popcount(w);
  return c;
}

inline int count_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

inline bool none(std::span<const std::uint64_t> s) {
  return std::all_of(s.begin(), s.end(), [](std::uint64_t w) { return w == 0; });
}

// Calls f(i) for every set bit in increasing order.
template <class F>
void for_each(std::span<const std::uint64_t> s, F&& f) {
  for (std::size_t w = 0; w < s.size(); ++w) {
    std::uint64_t word = s[w];
    while (word) {
      const int b = std::countr_zero(word);
      f(static_cast<int>(w * 64 + b));
      word &= word - 1;
    }
  }
}

inline int first(std::span<const std::uint64_t> s) {
  for (std::size_t w = 0; w < s.size(); ++w)
    if (s[w]) return static_cast<int>(w * 64 + std::countr_zero(s[w]));
  return -1;
}

}  // namespace bits

// Balanced k-partite graph with n vertices per part. Immutable once built;
// use KPartiteGraph::Builder to construct one.
//
// Adjacency is stored per vertex and per part as an n-bit set, so the
// neighbourhood of v inside part q is a contiguous span of words.
class KPartiteGraph {
 public:
  class Builder;

  KPartiteGraph() = default;

  int k() const { return k_; }
  int n() const { return n_; }
  int vertex_count() const { return k_ * n_; }
  std::size_t words() const { return words_; }

  // Dense 0-based vertex id: (part-1)*n + (index-1).
  int id(VertexRef v) const { return (v.part - 1) * n_ + (v.index - 1); }
  VertexRef ref(int id) const { return {id / n_ + 1, id % n_ + 1}; }
  bool contains(VertexRef v) const { return v.part >= 1 && v.part <= k_ && v.index >= 1 && v.index <= n_; }

  // Neighbours of vertex `id` inside part `part0` (0-based part), bit j = index j+1.
  std::span<const std::uint64_t> row(int id, int part0) const {
    return {adj_.data() + (static_cast<std::size_t>(id) * k_ + part0) * words_, words_};
  }

  bool adjacent(VertexRef u, VertexRef v) const {
    if (u.part == v.part) return false;
    return bits::test(row(id(u), v.part - 1), v.index - 1);
  }

  int degree(VertexRef v, int part) const { return bits::count(row(id(v), part - 1)); }

  std::vector<VertexRef> neighbors(VertexRef v, int part) const {
    std::vector<VertexRef> out;
    bits::for_each(row(id(v), part - 1), [&](int j) { out.push_back({part, j + 1}); });
    return out;
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (int v = 0; v < vertex_count(); ++v)
      for (int q = 0; q < k_; ++q) total += bits::count(row(v, q));
    return total / 2;
  }

  // Every edge once, (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int u = 0; u < vertex_count(); ++u) {
      const VertexRef ru = ref(u);
      for (int q = ru.part; q < k_; ++q)
        bits::for_each(row(u, q), [&](int j) { out.emplace_back(ru, VertexRef{q + 1, j + 1}); });
    }
    return out;
  }

  friend bool operator==(const KPartiteGraph& a, const KPartiteGraph& b) {
    return a.k_ == b.k_ && a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  KPartiteGraph(int k, int n) : k_(k), n_(n), words_(bits::words_for(n)) {
    adj_.assign(static_cast<std::size_t>(k) * n * k * words_, 0);
  }

  std::span<std::uint64_t> row_mut(int id, int part0) {
    return {adj_.data() + (static_cast<std::size_t>(id) * k_ + part0) * words_, words_};
  }

  int k_ = 0;
  int n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> adj_;
};

class KPartiteGraph::Builder {
 public:
  // n = 0 is allowed here so that degenerate derived graphs (an auxiliary
  // graph with no vertices, say) stay representable.
  Builder(int k, int n) : g_(check(k, n)) {}

  int k() const { return g_.k_; }
  int n() const { return g_.n_; }

  Builder& add_edge(VertexRef u, VertexRef v) {
    if (!g_.contains(u) || !g_.contains(v))
      throw ConstructionError("vertex out of range in edge " + u.to_string() + "-" + v.to_string());
    if (u.part == v.part) throw ConstructionError("same-part edge " + u.to_string() + "-" + v.to_string());
    bits::set(g_.row_mut(g_.id(u), v.part - 1), v.index - 1);
    bits::set(g_.row_mut(g_.id(v), u.part - 1), u.index - 1);
    return *this;
  }

  Builder& remove_edge(VertexRef u, VertexRef v) {
    bits::reset(g_.row_mut(g_.id(u), v.part - 1), v.index - 1);
    bits::reset(g_.row_mut(g_.id(v), u.part - 1), u.index - 1);
    return *this;
  }

  bool adjacent(VertexRef u, VertexRef v) const { return g_.adjacent(u, v); }
  int degree(VertexRef v, int part) const { return g_.degree(v, part); }

  KPartiteGraph build() && { return std::move(g_); }

 private:
  static KPartiteGraph check(int k, int n) {
    if (k < 2) throw ConstructionError("k must be at least 2, got " + std::to_string(k));
    if (n < 0) throw ConstructionError("n must be nonnegative, got " + std::to_string(n));
    if (static_cast<long long>(k) * n > 100000) throw CapacityError("k*n exceeds the in-memory cap of 1e5");
    return KPartiteGraph(k, n);
  }

  KPartiteGraph g_;
};

// Per ordered part pair (i, j), the minimum over v in V_i of deg(v, V_j).
class DegreeProfile {
 public:
  DegreeProfile() = default;
  explicit DegreeProfile(int k) : k_(k), entries_(static_cast<std::size_t>(k) * k, 0) {}

  int k() const { return k_; }
  int at(int i, int j) const { return entries_[static_cast<std::size_t>(i - 1) * k_ + (j - 1)]; }
  int& at(int i, int j) { return entries_[static_cast<std::size_t>(i - 1) * k_ + (j - 1)]; }

  int min() const {
    int m = std::numeric_limits<int>::max();
    for (int i = 1; i <= k_; ++i)
      for (int j = 1; j <= k_; ++j)
        if (i != j) m = std::min(m, at(i, j));
    return m;
  }

 private:
  int k_ = 0;
  std::vector<int> entries_;
};

inline KPartiteGraph new_balanced(int k, int n, const std::vector<Edge>& edges) {
  if (n < 1) throw ConstructionError("n must be at least 1, got " + std::to_string(n));
  KPartiteGraph::Builder b(k, n);
  for (const auto& [u, v] : edges) b.add_edge(u, v);
  return std::move(b).build();
}

inline KPartiteGraph complete_multipartite(int k, int n) {
  KPartiteGraph::Builder b(k, n);
  for (int p = 1; p <= k; ++p)
    for (int q = p + 1; q <= k; ++q)
      for (int a = 1; a <= n; ++a)
        for (int c = 1; c <= n; ++c) b.add_edge({p, a}, {q, c});
  return std::move(b).build();
}

inline KPartiteGraph edgeless(int k, int n) { return KPartiteGraph::Builder(k, n).build(); }

// Minimum bipartite degree over all natural bipartite subgraphs, with the
// full per-pair profile. For n = 0 the minimum is reported as 0.
inline std::pair<int, DegreeProfile> min_bipartite_degree(const KPartiteGraph& g) {
  DegreeProfile profile(g.k());
  for (int i = 1; i <= g.k(); ++i) {
    for (int j = 1; j <= g.k(); ++j) {
      if (i == j) continue;
      int m = g.n();
      for (int a = 1; a <= g.n(); ++a) m = std::min(m, g.degree({i, a}, j));
      profile.at(i, j) = m;
    }
  }
  return {g.n() == 0 ? 0 : profile.min(), profile};
}

// Vertex (i, j) becomes (i, (j-1)t+1 .. jt); every edge becomes K_{t,t}.
inline KPartiteGraph blow_up(const KPartiteGraph& g, int t) {
  if (t < 1) throw ParameterError("blow-up factor must be at least 1");
  KPartiteGraph::Builder b(g.k(), g.n() * t);
  for (const auto& [u, v] : g.edges())
    for (int x = 0; x < t; ++x)
      for (int y = 0; y < t; ++y)
        b.add_edge({u.part, (u.index - 1) * t + x + 1}, {v.part, (v.index - 1) * t + y + 1});
  return std::move(b).build();
}

// Gamma_k(n): k-partite, vertices h_{ij} of Gamma_k(k) adjacent across parts
// iff their columns are equal and in {k-1, k}, or differ with at least one
// of them in {1..k-2}; then every vertex is blown up by n/k.
inline KPartiteGraph catlin_graph(int k, int n) {
  if (k < 3) throw ParameterError("catlin_graph needs k >= 3, got " + std::to_string(k));
  if (n < 1 || n % k != 0) throw ParameterError("catlin_graph needs n divisible by k, got n=" + std::to_string(n));
  KPartiteGraph::Builder b(k, k);
  for (int i = 1; i <= k; ++i)
    for (int i2 = i + 1; i2 <= k; ++i2)
      for (int j = 1; j <= k; ++j)
        for (int j2 = 1; j2 <= k; ++j2) {
          const bool same_top = j == j2 && j >= k - 1;
          const bool mixed = j != j2 && (j <= k - 2 || j2 <= k - 2);
          if (same_top || mixed) b.add_edge({i, j}, {i2, j2});
        }
  return blow_up(std::move(b).build(), n / k);
}

// Every cross pair is an edge independently with probability p.
inline KPartiteGraph random_multipartite(int k, int n, double p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  KPartiteGraph::Builder b(k, n);
  for (int i = 1; i <= k; ++i)
    for (int i2 = i + 1; i2 <= k; ++i2)
      for (int a = 1; a <= n; ++a)
        for (int c = 1; c <= n; ++c)
          if (bernoulli(rng, p)) b.add_edge({i, a}, {i2, c});
  return std::move(b).build();
}

// Starts from the complete multipartite graph and deletes cross edges in a
// seeded random order whenever the deletion keeps both endpoint degrees
// (towards the other endpoint's part) at or above `target`. One pass
// suffices: degrees only decrease, so a skipped edge never becomes
// deletable later.
inline KPartiteGraph random_min_degree_graph(int k, int n, int target, std::uint64_t seed,
                                             std::size_t deletion_budget = std::numeric_limits<std::size_t>::max()) {
  if (target < 0 || target > n) throw ParameterError("target minimum bipartite degree must lie in [0, n]");
  KPartiteGraph::Builder b(k, n);
  std::vector<Edge> candidates;
  for (int i = 1; i <= k; ++i)
    for (int i2 = i + 1; i2 <= k; ++i2)
      for (int a = 1; a <= n; ++a)
        for (int c = 1; c <= n; ++c) {
          b.add_edge({i, a}, {i2, c});
          candidates.emplace_back(VertexRef{i, a}, VertexRef{i2, c});
        }
  Rng rng = make_rng(seed);
  shuffle(candidates, rng);
  std::size_t deleted = 0;
  for (const auto& [u, v] : candidates) {
    if (deleted >= deletion_budget) break;
    if (b.degree(u, v.part) > target && b.degree(v, u.part) > target) {
      b.remove_edge(u, v);
      ++deleted;
    }
  }
  return std::move(b).build();
}

}  // namespace tilekit
