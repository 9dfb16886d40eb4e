#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tilekit/cliques.hpp"
#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/lp.hpp"

namespace tilekit {

// Vertex-disjoint copies of K_h^k (h = 1 gives K_k). Each tile is sorted by
// (part, index).
struct Tiling {
  int h = 1;
  std::vector<std::vector<VertexRef>> tiles;
};

struct SearchOptions {
  int max_vertices = 36;
  bool most_constrained = false;  // branch on the uncovered vertex with fewest options
  std::uint64_t node_limit = 0;   // 0: unlimited
  double timeout_seconds = 0;     // 0: none
};

namespace detail {

class SearchBudget {
 public:
  explicit SearchBudget(const SearchOptions& opt) : opt_(opt), start_(std::chrono::steady_clock::now()) {}

  void tick() {
    ++nodes_;
    if (opt_.node_limit && nodes_ > opt_.node_limit)
      throw CapacityError("tiling search exceeded node limit " + std::to_string(opt_.node_limit));
    if (opt_.timeout_seconds > 0 && (nodes_ & 1023) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > opt_.timeout_seconds) throw CapacityError("tiling search timed out");
    }
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  SearchOptions opt_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

// A perfect K_k-tiling (n disjoint transversal cliques), or nothing if the
// exhausted search tree contains none.
inline std::optional<Tiling> perfect_clique_tiling(const KPartiteGraph& g, const SearchOptions& opt = {}) {
  if (g.vertex_count() > opt.max_vertices)
    throw CapacityError("perfect_clique_tiling: " + std::to_string(g.vertex_count()) + " vertices exceeds cap " +
                        std::to_string(opt.max_vertices));
  Tiling result;
  if (g.n() == 0) return result;
  const auto cliques = enumerate_transversal_cliques(g);
  const int nv = g.vertex_count();
  std::vector<std::vector<int>> through(nv);
  for (std::size_t t = 0; t < cliques.size(); ++t)
    for (const auto& v : cliques[t]) through[g.id(v)].push_back(static_cast<int>(t));

  std::vector<char> covered(nv, 0);
  std::vector<int> chosen;
  detail::SearchBudget budget(opt);

  auto available = [&](int t) {
    for (const auto& v : cliques[t])
      if (covered[g.id(v)]) return false;
    return true;
  };
  auto set_cover = [&](int t, char value) {
    for (const auto& v : cliques[t]) covered[g.id(v)] = value;
  };

  auto rec = [&](auto&& self) -> bool {
    budget.tick();
    int pick = -1;
    if (opt.most_constrained) {
      int best = -1;
      for (int v = 0; v < nv; ++v) {
        if (covered[v]) continue;
        int options = 0;
        for (int t : through[v]) options += available(t);
        if (pick < 0 || options < best) {
          pick = v;
          best = options;
        }
        if (best == 0) break;
      }
    } else {
      for (int v = 0; v < nv && pick < 0; ++v)
        if (!covered[v]) pick = v;
    }
    if (pick < 0) return true;
    for (int t : through[pick]) {
      if (!available(t)) continue;
      set_cover(t, 1);
      chosen.push_back(t);
      if (self(self)) return true;
      chosen.pop_back();
      set_cover(t, 0);
    }
    return false;
  };
  if (!rec(rec)) return std::nullopt;
  std::sort(chosen.begin(), chosen.end());
  for (int t : chosen) result.tiles.push_back(cliques[t]);
  return result;
}

namespace detail {

class MultipartiteSearch {
 public:
  MultipartiteSearch(const KPartiteGraph& g, int h, const SearchOptions& opt)
      : g_(g), h_(h), needed_(g.n() / h), skips_left_(g.n() - h * (g.n() / h)), used_(g.vertex_count(), 0),
        budget_(opt) {}

  std::optional<Tiling> run() {
    if (!next_tile()) return std::nullopt;
    Tiling t;
    t.h = h_;
    t.tiles = tiles_;
    return t;
  }

 private:
  // Opens a tile at the least free part-1 vertex, or leaves that vertex out.
  bool next_tile() {
    budget_.tick();
    if (static_cast<int>(tiles_.size()) == needed_) return true;
    int first = 0;
    for (int idx = 1; idx <= g_.n() && first == 0; ++idx)
      if (!used_[g_.id({1, idx})]) first = idx;
    if (first == 0) return false;
    const VertexRef v{1, first};
    used_[g_.id(v)] = 1;
    current_.push_back(v);
    if (fill(1, 1, first)) return true;
    current_.pop_back();
    if (skips_left_ > 0) {
      --skips_left_;
      if (next_tile()) return true;
      ++skips_left_;
    }
    used_[g_.id(v)] = 0;
    return false;
  }

  // Adds vertices of `part` with index above `from` until it holds h.
  bool fill(int part, int placed, int from) {
    budget_.tick();
    if (placed == h_) {
      if (part < g_.k()) return fill(part + 1, 0, 0);
      tiles_.push_back(current_);
      std::vector<VertexRef> saved;
      saved.swap(current_);
      if (next_tile()) return true;
      current_.swap(saved);
      tiles_.pop_back();
      return false;
    }
    for (int idx = from + 1; idx <= g_.n() - (h_ - placed - 1); ++idx) {
      const VertexRef v{part, idx};
      if (used_[g_.id(v)] || !compatible(v)) continue;
      used_[g_.id(v)] = 1;
      current_.push_back(v);
      if (fill(part, placed + 1, idx)) return true;
      current_.pop_back();
      used_[g_.id(v)] = 0;
    }
    return false;
  }

  bool compatible(VertexRef v) const {
    for (const auto& u : current_)
      if (u.part != v.part && !g_.adjacent(u, v)) return false;
    return true;
  }

  const KPartiteGraph& g_;
  int h_, needed_, skips_left_;
  std::vector<char> used_;
  std::vector<VertexRef> current_;
  std::vector<std::vector<VertexRef>> tiles_;
  SearchBudget budget_;
};

}  // namespace detail

// floor(n/h) disjoint copies of K_h^k, or nothing if none exist.
//
// Tiles are canonical: h-subsets sorted within each part, tiles ordered by
// their smallest part-1 vertex. The search walks part-1 vertices in order;
// each is either left out (at most n - h*floor(n/h) of them) or opens the
// next tile.
inline std::optional<Tiling> perfect_multipartite_tiling(const KPartiteGraph& g, int h,
                                                         const SearchOptions& opt = {}) {
  if (h < 1) throw ParameterError("h must be at least 1");
  if (h == 1) return perfect_clique_tiling(g, opt);
  const int tiled = h * g.k() * (g.n() / h);
  if (tiled > opt.max_vertices)
    throw CapacityError("perfect_multipartite_tiling: " + std::to_string(tiled) + " tiled vertices exceeds cap " +
                        std::to_string(opt.max_vertices));
  return detail::MultipartiteSearch(g, h, opt).run();
}

struct MatchingResult {
  std::optional<Tiling> matching;
  // When there is no perfect matching: S in part 1 with |N(S)| < |S|.
  std::vector<VertexRef> violator;
  std::vector<VertexRef> violator_neighbors;
};

// Augmenting-path search (Kuhn) from part-1 vertices in index order.
inline MatchingResult bipartite_perfect_matching(const KPartiteGraph& g) {
  if (g.k() != 2) throw ParameterError("bipartite_perfect_matching needs k = 2, got " + std::to_string(g.k()));
  const int n = g.n();
  std::vector<int> match_left(n, -1), match_right(n, -1);
  std::vector<char> seen_left, seen_right;

  auto augment = [&](auto&& self, int a) -> bool {
    seen_left[a] = 1;
    auto row = g.row(g.id({1, a + 1}), 1);
    int found = -1;
    bits::for_each(row, [&](int b) {
      if (found >= 0 || seen_right[b]) return;
      seen_right[b] = 1;
      if (match_right[b] < 0 || self(self, match_right[b])) found = b;
    });
    if (found < 0) return false;
    match_left[a] = found;
    match_right[found] = a;
    return true;
  };

  MatchingResult r;
  for (int a = 0; a < n; ++a) {
    seen_left.assign(n, 0);
    seen_right.assign(n, 0);
    if (augment(augment, a)) continue;
    // The alternating tree from a: its part-1 vertices have exactly the
    // reached part-2 vertices as neighbours, all matched back into it.
    for (int x = 0; x < n; ++x)
      if (seen_left[x]) r.violator.push_back({1, x + 1});
    for (int y = 0; y < n; ++y)
      if (seen_right[y]) r.violator_neighbors.push_back({2, y + 1});
    return r;
  }
  Tiling t;
  for (int a = 0; a < n; ++a) t.tiles.push_back({{1, a + 1}, {2, match_left[a] + 1}});
  r.matching = std::move(t);
  return r;
}

// |N(S)| for a set S inside one part, counted in the other part of a
// bipartite graph.
inline std::vector<VertexRef> neighborhood(const KPartiteGraph& g, const std::vector<VertexRef>& s) {
  std::vector<VertexRef> out;
  for (int q = 1; q <= g.k(); ++q)
    for (int j = 1; j <= g.n(); ++j) {
      const VertexRef y{q, j};
      if (std::any_of(s.begin(), s.end(), [&](const VertexRef& x) { return g.adjacent(x, y); })) out.push_back(y);
    }
  return out;
}

struct BlowUpTiling {
  KPartiteGraph graph;
  Tiling tiling;
  bool complete = false;
  std::int64_t deficiency = 0;  // D*l minus the number of tiles produced
};

// Reads a fractional tiling w of gr as an integral tiling of the D-blow-up:
// clique T claims D*w(T) fresh copies from each of its vertex classes.
inline BlowUpTiling tiling_from_fractional(const KPartiteGraph& gr, const std::vector<Clique>& cliques,
                                           const LPSolution& primal, std::int64_t d) {
  if (d < 1) throw ParameterError("D must be at least 1");
  if (primal.values.size() != cliques.size()) throw ParameterError("solution does not match the clique list");
  BlowUpTiling out;
  out.graph = blow_up(gr, static_cast<int>(d));
  std::vector<std::int64_t> next(gr.vertex_count(), 0);
  for (std::size_t t = 0; t < cliques.size(); ++t) {
    const Rational copies = primal.values[t] * Rational(static_cast<long>(d));
    if (!copies.is_integer())
      throw ParameterError("D*w(T) = " + copies.to_string() + " is not integral for clique " + std::to_string(t));
    const std::int64_t c = to_int64(copies.num());
    for (std::int64_t x = 0; x < c; ++x) {
      std::vector<VertexRef> tile;
      for (const auto& v : cliques[t]) {
        std::int64_t& used = next[gr.id(v)];
        if (used >= d) throw InvariantError("vertex class of " + v.to_string() + " overflowed; weights exceed 1");
        tile.push_back({v.part, static_cast<int>((v.index - 1) * d + used + 1)});
        ++used;
      }
      out.tiling.tiles.push_back(std::move(tile));
    }
  }
  out.deficiency = d * gr.n() - static_cast<std::int64_t>(out.tiling.tiles.size());
  out.complete = out.deficiency == 0;
  return out;
}

struct TilingCheck {
  bool ok = false;
  std::string reason;
};

// Disjoint tiles, each complete k-partite with h vertices per part, and
// exactly floor(n/h) of them.
inline TilingCheck verify_tiling(const KPartiteGraph& g, const Tiling& t, int h) {
  auto fail = [](std::string why) { return TilingCheck{false, std::move(why)}; };
  if (h < 1) return fail("h must be positive");
  const std::size_t expected = g.n() / h;
  if (t.tiles.size() != expected)
    return fail("expected " + std::to_string(expected) + " tiles, found " + std::to_string(t.tiles.size()));
  std::vector<char> seen(g.vertex_count(), 0);
  for (std::size_t i = 0; i < t.tiles.size(); ++i) {
    const auto& tile = t.tiles[i];
    std::vector<int> per_part(g.k() + 1, 0);
    for (const auto& v : tile) {
      if (!g.contains(v)) return fail("tile " + std::to_string(i) + " has out-of-range vertex " + v.to_string());
      if (seen[g.id(v)]) return fail("vertex " + v.to_string() + " appears in more than one tile");
      seen[g.id(v)] = 1;
      ++per_part[v.part];
    }
    for (int p = 1; p <= g.k(); ++p)
      if (per_part[p] != h)
        return fail("tile " + std::to_string(i) + " has " + std::to_string(per_part[p]) + " vertices in part " +
                    std::to_string(p));
    for (std::size_t a = 0; a < tile.size(); ++a)
      for (std::size_t b = a + 1; b < tile.size(); ++b)
        if (tile[a].part != tile[b].part && !g.adjacent(tile[a], tile[b]))
          return fail("tile " + std::to_string(i) + " misses edge " + tile[a].to_string() + "-" + tile[b].to_string());
  }
  return {true, ""};
}

}  // namespace tilekit
