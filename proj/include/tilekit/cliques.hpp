#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"

namespace tilekit {

// One vertex per part, sorted by part.
using Clique = std::vector<VertexRef>;

inline constexpr std::size_t kDefaultCliqueCap = 5'000'000;

// Every transversal K_k of g exactly once, in lexicographic order.
inline std::vector<Clique> enumerate_transversal_cliques(const KPartiteGraph& g,
                                                         std::size_t cap = kDefaultCliqueCap) {
  const int k = g.k();
  const std::size_t w = g.words();
  std::vector<Clique> out;
  if (g.n() == 0) return out;

  // cand[d] holds, for each part q >= d, the vertices of q adjacent to all
  // vertices chosen at depths < d.
  std::vector<std::vector<std::uint64_t>> cand(k + 1, std::vector<std::uint64_t>(k * w, 0));
  for (int q = 0; q < k; ++q)
    for (int j = 0; j < g.n(); ++j) bits::set({cand[0].data() + q * w, w}, j);

  Clique current(k);
  auto rec = [&](auto&& self, int d) -> void {
    if (d == k) {
      if (out.size() >= cap)
        throw CapacityError("clique enumeration exceeded cap of " + std::to_string(cap));
      out.push_back(current);
      return;
    }
    std::span<const std::uint64_t> here{cand[d].data() + d * w, w};
    bits::for_each(here, [&](int j) {
      const int v = d * g.n() + j;
      bool alive = true;
      for (int q = d + 1; q < k && alive; ++q) {
        auto row = g.row(v, q);
        std::uint64_t any = 0;
        for (std::size_t x = 0; x < w; ++x) {
          const std::uint64_t word = cand[d][q * w + x] & row[x];
          cand[d + 1][q * w + x] = word;
          any |= word;
        }
        alive = any != 0;
      }
      if (!alive) return;
      current[d] = {d + 1, j + 1};
      self(self, d + 1);
    });
  };
  rec(rec, 0);
  return out;
}

// The cliques of all_cliques containing v, order preserved.
inline std::vector<Clique> cliques_through_vertex(const KPartiteGraph& g, VertexRef v,
                                                  const std::vector<Clique>& all_cliques) {
  std::vector<Clique> out;
  if (!g.contains(v)) return out;
  for (const auto& c : all_cliques)
    if (c[v.part - 1] == v) out.push_back(c);
  return out;
}

inline bool is_transversal_clique(const KPartiteGraph& g, const Clique& c) {
  if (static_cast<int>(c.size()) != g.k()) return false;
  for (int p = 0; p < g.k(); ++p)
    if (c[p].part != p + 1 || !g.contains(c[p])) return false;
  for (int p = 0; p < g.k(); ++p)
    for (int q = p + 1; q < g.k(); ++q)
      if (!g.adjacent(c[p], c[q])) return false;
  return true;
}

}  // namespace tilekit
