#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/radical.hpp"
#include "tilekit/random.hpp"
#include "tilekit/rational.hpp"

namespace tilekit {

// Bipartite pair (A, B) held as a bit matrix: rows over B for each a in A,
// and the transpose for each b in B. Vertices are 0-based positions.
class BipartitePair {
 public:
  BipartitePair() = default;
  BipartitePair(int a, int b) : a_(a), b_(b), wa_(bits::words_for(a)), wb_(bits::words_for(b)) {
    if (a < 1 || b < 1) throw ParameterError("a bipartite pair needs nonempty sides");
    rows_.assign(static_cast<std::size_t>(a) * wb_, 0);
    cols_.assign(static_cast<std::size_t>(b) * wa_, 0);
  }

  // The pair (A, B) inside g; A and B must be nonempty and disjoint.
  static BipartitePair from_graph(const KPartiteGraph& g, const std::vector<VertexRef>& a,
                                  const std::vector<VertexRef>& b) {
    BipartitePair p(static_cast<int>(a.size()), static_cast<int>(b.size()));
    for (const auto& x : a)
      if (std::find(b.begin(), b.end(), x) != b.end()) throw ParameterError("pair sides overlap at " + x.to_string());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (g.adjacent(a[i], b[j])) p.add_edge(static_cast<int>(i), static_cast<int>(j));
    return p;
  }

  // Every edge present independently with probability p.
  static BipartitePair random(int a, int b, double p, Rng& rng) {
    BipartitePair pair(a, b);
    for (int x = 0; x < a; ++x)
      for (int y = 0; y < b; ++y)
        if (bernoulli(rng, p)) pair.add_edge(x, y);
    return pair;
  }

  static BipartitePair complete(int a, int b) {
    BipartitePair p(a, b);
    for (int x = 0; x < a; ++x)
      for (int y = 0; y < b; ++y) p.add_edge(x, y);
    return p;
  }

  int a() const { return a_; }
  int b() const { return b_; }

  void add_edge(int x, int y) {
    bits::set(row_mut(x), y);
    bits::set(col_mut(y), x);
  }
  void remove_edge(int x, int y) {
    bits::reset(row_mut(x), y);
    bits::reset(col_mut(y), x);
  }
  bool adjacent(int x, int y) const { return bits::test(row(x), y); }

  std::span<const std::uint64_t> row(int x) const { return {rows_.data() + static_cast<std::size_t>(x) * wb_, wb_}; }
  std::span<const std::uint64_t> col(int y) const { return {cols_.data() + static_cast<std::size_t>(y) * wa_, wa_}; }

  int deg_a(int x) const { return bits::count(row(x)); }  // neighbours of x in B
  int deg_b(int y) const { return bits::count(col(y)); }  // neighbours of y in A
  int codegree_a(int x, int x2) const { return bits::count_and(row(x), row(x2)); }

  std::int64_t edge_count() const {
    std::int64_t e = 0;
    for (int x = 0; x < a_; ++x) e += deg_a(x);
    return e;
  }

  BipartitePair transposed() const {
    BipartitePair t(b_, a_);
    t.rows_ = cols_;
    t.cols_ = rows_;
    return t;
  }

  // The pair induced on positions xs of A and ys of B, in the given order.
  BipartitePair sub(const std::vector<int>& xs, const std::vector<int>& ys) const {
    BipartitePair s(static_cast<int>(xs.size()), static_cast<int>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j)
        if (adjacent(xs[i], ys[j])) s.add_edge(static_cast<int>(i), static_cast<int>(j));
    return s;
  }

  friend bool operator==(const BipartitePair& p, const BipartitePair& q) {
    return p.a_ == q.a_ && p.b_ == q.b_ && p.rows_ == q.rows_;
  }

 private:
  std::span<std::uint64_t> row_mut(int x) { return {rows_.data() + static_cast<std::size_t>(x) * wb_, wb_}; }
  std::span<std::uint64_t> col_mut(int y) { return {cols_.data() + static_cast<std::size_t>(y) * wa_, wa_}; }

  int a_ = 0, b_ = 0;
  std::size_t wa_ = 0, wb_ = 0;
  std::vector<std::uint64_t> rows_, cols_;
};

// e(A, B) / (|A| |B|), exactly.
inline Rational density(const BipartitePair& p) {
  return Rational(mpz_class(static_cast<long>(p.edge_count())), mpz_class(static_cast<long>(p.a()) * p.b()));
}

inline constexpr int kExactRegularityCap = 14;

enum class CertificateKind { exact_exhaustive, kr_good_pairs, slicing_derived, by_construction };

inline std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::exact_exhaustive: return "exact-exhaustive";
    case CertificateKind::kr_good_pairs: return "kr-good-pairs";
    case CertificateKind::slicing_derived: return "slicing-derived";
    case CertificateKind::by_construction: return "by-construction";
  }
  return "?";
}

// Evidence that a pair is epsilon-regular. epsilon is a Radical because the
// good-pairs rule certifies (16 eps)^(1/5). When that value is at least 1
// the certificate is vacuous (every pair is 1-regular); epsilon is then
// clamped to 1 and `vacuous` is set.
struct RegularityCertificate {
  CertificateKind kind = CertificateKind::exact_exhaustive;
  Radical epsilon = Radical::exact(Rational(1));
  bool vacuous = false;
  // Density of the certified pair lies in [density - radius, density + radius].
  std::optional<Rational> density;
  Radical density_radius = Radical::exact(Rational(0));
  // Good-pairs rule: counted ordered pairs, the bound they beat, and
  // whether the refined (1 - 5 eps) bound was used.
  std::int64_t good_pairs = 0;
  Rational good_pair_bound;
  bool refined = false;
  Rational source_epsilon;  // eps fed to the counting rule
  // Slicing: the parent's epsilon and alpha.
  std::optional<Radical> parent_epsilon;
  Rational alpha;
};

// X, Y (0-based positions) whose density breaks a bound.
struct SubpairWitness {
  std::vector<int> x, y;
  Rational density;
};

namespace detail {

// Smallest size s >= 1 with s >= eps * total, or total + 1 if none.
inline int min_qualifying_size(const Radical& eps, int total) {
  for (int s = 1; s <= total; ++s)
    if (eps <= Rational(s, total)) return s;
  return total + 1;
}

// Checks lo(s,t) <= e(X,Y) <= hi(s,t) for every X with |X| >= min_x and
// Y with |Y| = t >= min_y. For fixed X the extreme e(X,Y) over |Y| = t come
// from the t largest or smallest values of deg_X(y), so only X is
// enumerated. Requires |A| <= 14 and |B| <= 14.
template <class Lo, class Hi>
std::optional<SubpairWitness> exhaustive_scan(const BipartitePair& p, int min_x, int min_y, Lo&& lo, Hi&& hi) {
  const int a = p.a(), b = p.b();
  if (a > kExactRegularityCap || b > kExactRegularityCap)
    throw CapacityError("exact regularity check is capped at " + std::to_string(kExactRegularityCap) +
                        " vertices per side (got " + std::to_string(a) + "x" + std::to_string(b) +
                        "); use kr_certificate");
  if (min_x > a || min_y > b) return std::nullopt;
  std::vector<std::uint64_t> colmask(b);
  for (int y = 0; y < b; ++y) colmask[y] = p.col(y)[0];
  std::vector<std::int64_t> lo_tab((a + 1) * (b + 1)), hi_tab((a + 1) * (b + 1));
  for (int s = min_x; s <= a; ++s)
    for (int t = min_y; t <= b; ++t) {
      lo_tab[s * (b + 1) + t] = lo(s, t);
      hi_tab[s * (b + 1) + t] = hi(s, t);
    }
  std::vector<std::pair<int, int>> deg(b);
  std::vector<int> prefix(b + 1);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << a); ++mask) {
    const int s = std::popcount(mask);
    if (s < min_x) continue;
    for (int y = 0; y < b; ++y) deg[y] = {-std::popcount(colmask[y] & mask), y};
    std::sort(deg.begin(), deg.end());
    prefix[0] = 0;
    for (int y = 0; y < b; ++y) prefix[y + 1] = prefix[y] - deg[y].first;
    for (int t = min_y; t <= b; ++t) {
      const std::int64_t top = prefix[t];
      const std::int64_t bottom = prefix[b] - prefix[b - t];
      const bool high = top > hi_tab[s * (b + 1) + t];
      const bool low = bottom < lo_tab[s * (b + 1) + t];
      if (!high && !low) continue;
      SubpairWitness w;
      for (int x = 0; x < a; ++x)
        if ((mask >> x) & 1) w.x.push_back(x);
      for (int i = 0; i < t; ++i) w.y.push_back(high ? deg[i].second : deg[b - 1 - i].second);
      std::sort(w.y.begin(), w.y.end());
      w.density = Rational(high ? top : bottom, static_cast<long>(s) * t);
      return w;
    }
  }
  return std::nullopt;
}

// Largest e in [0, st] with pred(e) true, for pred true on a prefix; -1 if none.
template <class Pred>
std::int64_t last_true(std::int64_t st, Pred&& pred) {
  std::int64_t lo = 0, hi = st;
  if (!pred(0)) return -1;
  while (lo < hi) {
    const std::int64_t mid = (lo + hi + 1) / 2;
    if (pred(mid)) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

// A witness against epsilon-regularity, or nothing if the pair is
// epsilon-regular: all X, Y with |X| >= eps|A|, |Y| >= eps|B| satisfy
// |d(X,Y) - d(A,B)| <= eps.
inline std::optional<SubpairWitness> find_irregular_subpair(const BipartitePair& p, const Radical& eps) {
  const Rational d = density(p);
  const int min_x = detail::min_qualifying_size(eps, p.a());
  const int min_y = detail::min_qualifying_size(eps, p.b());
  auto hi = [&](int s, int t) {
    const std::int64_t st = static_cast<std::int64_t>(s) * t;
    return detail::last_true(st, [&](std::int64_t e) { return eps >= Rational(e, st) - d; });
  };
  auto lo = [&](int s, int t) {
    const std::int64_t st = static_cast<std::int64_t>(s) * t;
    // d - e/st <= eps holds on a suffix of e; find its first element.
    const std::int64_t last_bad = detail::last_true(st, [&](std::int64_t e) { return !(eps >= d - Rational(e, st)); });
    return last_bad + 1;
  };
  return detail::exhaustive_scan(p, min_x, min_y, lo, hi);
}

inline bool is_regular_exact(const BipartitePair& p, const Radical& eps) { return !find_irregular_subpair(p, eps); }
inline bool is_regular_exact(const BipartitePair& p, const Rational& eps) {
  return is_regular_exact(p, Radical::exact(eps));
}

// The density clause of super-regularity: d(X,Y) >= delta whenever
// |X| >= eps|A| and |Y| >= eps|B|.
inline std::optional<SubpairWitness> find_sparse_subpair(const BipartitePair& p, const Radical& eps,
                                                         const Rational& delta) {
  const int min_x = detail::min_qualifying_size(eps, p.a());
  const int min_y = detail::min_qualifying_size(eps, p.b());
  auto hi = [](int s, int t) { return static_cast<std::int64_t>(s) * t; };
  auto lo = [&](int s, int t) {
    const std::int64_t st = static_cast<std::int64_t>(s) * t;
    const Rational need = delta * Rational(st);
    if (need.sign() <= 0) return std::int64_t{0};
    return to_int64(need.ceil());
  };
  return detail::exhaustive_scan(p, min_x, min_y, lo, hi);
}

// First vertex under the degree floor of super-regularity, if any:
// deg_B(a) >= delta|B| for all a and deg_A(b) >= delta|A| for all b.
inline std::optional<std::string> degree_floor_violation(const BipartitePair& p, const Rational& delta) {
  for (int x = 0; x < p.a(); ++x)
    if (Rational(p.deg_a(x)) < delta * Rational(p.b()))
      return "A-vertex " + std::to_string(x) + " has degree " + std::to_string(p.deg_a(x)) + " < " +
             (delta * Rational(p.b())).to_string();
  for (int y = 0; y < p.b(); ++y)
    if (Rational(p.deg_b(y)) < delta * Rational(p.a()))
      return "B-vertex " + std::to_string(y) + " has degree " + std::to_string(p.deg_b(y)) + " < " +
             (delta * Rational(p.a())).to_string();
  return std::nullopt;
}

struct SuperRegularity {
  bool holds = false;
  std::string method;  // "exact" or "certificate"
  std::string reason;
};

// Exact when both sides are at most 14; otherwise the density clause
// follows from a certificate of eps_c-regularity when eps_c <= eps and
// density - radius - eps_c >= delta. Without such a certificate the
// question is undecidable here and a CapacityError is raised.
inline SuperRegularity check_super_regular(const BipartitePair& p, const Radical& eps, const Rational& delta,
                                           const RegularityCertificate* cert = nullptr) {
  SuperRegularity r;
  if (auto v = degree_floor_violation(p, delta)) {
    r.method = "degree-floor";
    r.reason = *v;
    return r;
  }
  if (p.a() <= kExactRegularityCap && p.b() <= kExactRegularityCap) {
    r.method = "exact";
    if (auto w = find_sparse_subpair(p, eps, delta)) {
      r.reason = "subpair of size " + std::to_string(w->x.size()) + "x" + std::to_string(w->y.size()) +
                 " has density " + w->density.to_string();
      return r;
    }
    r.holds = true;
    return r;
  }
  if (cert == nullptr || !cert->density)
    throw CapacityError("super-regularity of a " + std::to_string(p.a()) + "x" + std::to_string(p.b()) +
                        " pair needs a regularity certificate");
  r.method = "certificate";
  // A certificate for eps_c <= eps covers every qualifying subpair:
  // d(X,Y) >= d(A,B) - eps_c >= (density - radius) - eps_c.
  if (cert->epsilon > eps) {
    r.reason = "certificate epsilon " + cert->epsilon.to_string() + " exceeds " + eps.to_string();
    return r;
  }
  const Rational floor_density = density(p);
  // Needs floor_density - eps_c >= delta, i.e. eps_c <= floor_density - delta.
  if (!(cert->epsilon <= floor_density - delta)) {
    r.reason = "density margin " + (floor_density - delta).to_string() + " below certificate epsilon " +
               cert->epsilon.to_string();
    return r;
  }
  r.holds = true;
  return r;
}

inline bool is_super_regular(const BipartitePair& p, const Radical& eps, const Rational& delta,
                             const RegularityCertificate* cert = nullptr) {
  return check_super_regular(p, eps, delta, cert).holds;
}
inline bool is_super_regular(const BipartitePair& p, const Rational& eps, const Rational& delta) {
  return is_super_regular(p, Radical::exact(eps), delta);
}

struct GoodPairCount {
  std::int64_t pairs = 0;         // ordered pairs (x, x') with x = x' allowed
  std::int64_t degree_cutoff = 0;  // good degree: deg > (d - eps)|Y|, i.e. deg >= cutoff
  std::int64_t codegree_cutoff = 0;  // good codegree: codeg < (d + eps)^2 |Y|, i.e. codeg <= cutoff
};

// Ordered pairs of A-vertices that are good in B at density d and slack
// eps: both degrees above (d - eps)|B| and codegree below (d + eps)^2|B|.
inline GoodPairCount count_good_pairs(const BipartitePair& p, const Rational& d, const Rational& eps) {
  GoodPairCount c;
  const Rational yb(p.b());
  c.degree_cutoff = to_int64(((d - eps) * yb).floor()) + 1;
  c.codegree_cutoff = to_int64(((d + eps).pow(2) * yb).ceil()) - 1;
  std::vector<int> good;
  for (int x = 0; x < p.a(); ++x)
    if (p.deg_a(x) >= c.degree_cutoff) good.push_back(x);
  for (std::size_t i = 0; i < good.size(); ++i) {
    if (p.codegree_a(good[i], good[i]) <= c.codegree_cutoff) ++c.pairs;
    for (std::size_t j = i + 1; j < good.size(); ++j)
      if (p.codegree_a(good[i], good[j]) <= c.codegree_cutoff) c.pairs += 2;
  }
  return c;
}

// Good-pairs criterion with X = A, Y = B. Returns a certificate of
// (16 eps)^(1/5)-regularity when the count clears (1 - 4.5 eps)|X|^2, or
// (1 - 5 eps)|X|^2 when eps <= 1/9 and 4 eps <= d <= 1 - 4 eps. Nothing
// means "not certified", never "irregular".
inline std::optional<RegularityCertificate> kr_certificate(const BipartitePair& p, const Rational& eps) {
  if (eps.sign() <= 0 || eps >= Rational(1)) throw ParameterError("kr_certificate needs 0 < eps < 1");
  if (Rational(p.a()) * eps < Rational(2))
    throw PreconditionError("kr_certificate needs |X| >= 2/eps; |X| = " + std::to_string(p.a()) + ", eps = " +
                            eps.to_string());
  const Rational d = density(p);
  const GoodPairCount c = count_good_pairs(p, d, eps);
  const Rational x2(static_cast<long>(p.a()) * p.a());
  const Rational plain = (Rational(1) - Rational(9, 2) * eps) * x2;
  const bool refinable = eps <= Rational(1, 9) && Rational(4) * eps <= d && d <= Rational(1) - Rational(4) * eps;
  const Rational refined = (Rational(1) - Rational(5) * eps) * x2;

  RegularityCertificate cert;
  cert.kind = CertificateKind::kr_good_pairs;
  cert.good_pairs = c.pairs;
  cert.source_epsilon = eps;
  cert.density = d;
  const Rational count(static_cast<long>(c.pairs));
  if (count > plain) {
    cert.good_pair_bound = plain;
  } else if (refinable && count > refined) {
    cert.good_pair_bound = refined;
    cert.refined = true;
  } else {
    return std::nullopt;
  }
  const Radical param = Radical::root(Rational(16) * eps, 5);
  cert.vacuous = param >= Rational(1);
  cert.epsilon = cert.vacuous ? Radical::exact(Rational(1)) : param;
  return cert;
}

// Complete and empty pairs are epsilon-regular for every epsilon.
inline std::optional<RegularityCertificate> trivial_certificate(const BipartitePair& p) {
  const Rational d = density(p);
  if (d != Rational(0) && d != Rational(1)) return std::nullopt;
  RegularityCertificate cert;
  cert.kind = CertificateKind::by_construction;
  cert.epsilon = Radical::exact(Rational(0));
  cert.density = d;
  return cert;
}

// Smallest-effort certificate of eps-regularity: trivial, then exact at
// small sizes. Nothing if neither applies or the exact check fails.
inline std::optional<RegularityCertificate> certify_exact(const BipartitePair& p, const Radical& eps) {
  if (auto t = trivial_certificate(p)) return t;
  if (p.a() > kExactRegularityCap || p.b() > kExactRegularityCap) return std::nullopt;
  if (!is_regular_exact(p, eps)) return std::nullopt;
  RegularityCertificate cert;
  cert.kind = CertificateKind::exact_exhaustive;
  cert.epsilon = eps;
  cert.density = density(p);
  return cert;
}

// Slicing rule: sub-pairs with |A'| >= alpha|A| and |B'| >= alpha|B| of an
// eps-regular pair of density d are max{2 eps, eps/alpha}-regular with
// density in [d - eps, d + eps], provided 0 < eps < alpha < 1 and
// d, 1 - d >= max{2 eps, eps/alpha}.
inline RegularityCertificate slice_certificate(const RegularityCertificate& parent, const Rational& alpha,
                                               const Rational& d) {
  const Radical& eps = parent.epsilon;
  if (!(eps > Rational(0))) throw ParameterError("slicing needs eps > 0");
  if (!(alpha > Rational(0)) || !(alpha < Rational(1))) throw ParameterError("slicing needs 0 < alpha < 1");
  if (!(eps < alpha)) throw ParameterError("slicing needs eps < alpha (eps = " + eps.to_string() +
                                           ", alpha = " + alpha.to_string() + ")");
  const Radical eps0 = max(eps.scaled(Rational(2)), eps.scaled(Rational(1) / alpha));
  if (!(eps0 <= d)) throw ParameterError("slicing needs d >= max{2eps, eps/alpha} = " + eps0.to_string());
  if (!(eps0 <= Rational(1) - d))
    throw ParameterError("slicing needs 1 - d >= max{2eps, eps/alpha} = " + eps0.to_string());
  RegularityCertificate cert;
  cert.kind = CertificateKind::slicing_derived;
  cert.epsilon = eps0;
  cert.density = d;
  cert.density_radius = eps;
  cert.parent_epsilon = eps;
  cert.alpha = alpha;
  return cert;
}

// Checks the slicing rule's conclusion on a concrete sub-pair: density in
// the window and eps0-regularity (exactly, so sizes are capped at 14).
inline bool slice_conclusion_holds(const BipartitePair& sub, const RegularityCertificate& derived) {
  const Rational ds = density(sub);
  const Rational& d = *derived.density;
  if (ds > d && !(derived.density_radius >= ds - d)) return false;
  if (ds < d && !(derived.density_radius >= d - ds)) return false;
  return is_regular_exact(sub, derived.epsilon);
}

struct AugmentCheck {
  bool holds = false;
  Rational eps0, delta0;
  std::string reason;  // why the conclusion failed, if it did
};

// After adding vertices to an (eps1, delta1)-super-regular pair (A, B):
// `after` must contain `before` as its leading |A| rows and |B| columns.
// Checks every hypothesis (throwing PreconditionError naming the failed
// clause) and then the conclusion: (eps1 + eps2, min{delta1, delta2} /
// (1 + eps2)^2)-super-regularity, decided exactly.
inline AugmentCheck augment_super_regular_check(const BipartitePair& before, const BipartitePair& after,
                                                const Rational& eps1, const Rational& delta1, const Rational& eps2,
                                                const Rational& delta2) {
  const int a = before.a(), b = before.b();
  if (after.a() < a || after.b() < b) throw PreconditionError("augmented pair is smaller than the original");
  for (int x = 0; x < a; ++x)
    for (int y = 0; y < b; ++y)
      if (before.adjacent(x, y) != after.adjacent(x, y))
        throw PreconditionError("augmented pair does not contain the original pair at (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
  if (Rational(after.a() - a) > eps2 * Rational(a))
    throw PreconditionError("more than eps2|A| vertices added to A");
  if (Rational(after.b() - b) > eps2 * Rational(b))
    throw PreconditionError("more than eps2|B| vertices added to B");
  for (int x = a; x < after.a(); ++x) {
    int deg = 0;
    for (int y = 0; y < b; ++y) deg += after.adjacent(x, y);
    if (Rational(deg) < delta2 * Rational(b))
      throw PreconditionError("added A-vertex " + std::to_string(x) + " has " + std::to_string(deg) +
                              " neighbours in B, below delta2|B|");
  }
  for (int y = b; y < after.b(); ++y) {
    int deg = 0;
    for (int x = 0; x < a; ++x) deg += after.adjacent(x, y);
    if (Rational(deg) < delta2 * Rational(a))
      throw PreconditionError("added B-vertex " + std::to_string(y) + " has " + std::to_string(deg) +
                              " neighbours in A, below delta2|A|");
  }
  const auto base = check_super_regular(before, Radical::exact(eps1), delta1);
  if (!base.holds) throw PreconditionError("original pair is not (eps1, delta1)-super-regular: " + base.reason);

  AugmentCheck r;
  r.eps0 = eps1 + eps2;
  r.delta0 = min(delta1, delta2) / (Rational(1) + eps2).pow(2);
  const auto concl = check_super_regular(after, Radical::exact(r.eps0), r.delta0);
  r.holds = concl.holds;
  r.reason = concl.reason;
  return r;
}

}  // namespace tilekit
