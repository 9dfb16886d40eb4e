#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/rational.hpp"
#include "tilekit/small_rational.hpp"

namespace tilekit {

enum class Sense { maximize, minimize };

struct Term {
  int column = 0;
  Rational coef;
};

// Rows read "sum <= rhs" for maximize and "sum >= rhs" for minimize; every
// variable is implicitly nonnegative. Rows are sparse.
struct LinearProgram {
  Sense sense = Sense::maximize;
  std::vector<Rational> objective;
  std::vector<std::vector<Term>> rows;
  std::vector<Rational> rhs;

  int column_count() const { return static_cast<int>(objective.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }

  void validate() const {
    if (rows.size() != rhs.size()) throw ParameterError("LP: row count and rhs length differ");
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& t : rows[i])
        if (t.column < 0 || t.column >= column_count())
          throw ParameterError("LP: row " + std::to_string(i) + " references column " + std::to_string(t.column));
  }

  Rational row_value(int i, const std::vector<Rational>& x) const {
    Rational s;
    for (const auto& t : rows[i]) s += t.coef * x[t.column];
    return s;
  }
};

enum class LPStatus { optimal, infeasible, unbounded, feasible };

inline std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::feasible: return "feasible";
  }
  return "?";
}

// Labels in `basis`: 0..cols-1 are structural variables, cols+i is the
// slack of row i.
struct LPSolution {
  LPStatus status = LPStatus::feasible;
  std::vector<Rational> values;
  Rational objective;
  std::vector<int> basis;
  std::vector<int> tight_rows;
  // Optimal: a dual solution y >= 0 whose value b.y equals the objective.
  std::vector<Rational> row_duals;
  // Infeasible: y >= 0 with y.A >= 0 and y.b < 0 (maximize), or
  // y.A <= 0 and y.b > 0 (minimize).
  std::vector<Rational> farkas;
  // Unbounded: a direction r >= 0 improving the objective along which
  // `values` stays feasible.
  std::vector<Rational> ray;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  std::size_t max_pivots = 5'000'000;
  // Run the primal simplex (feasible origin) or the dual simplex (origin
  // dual feasible) in revised form, holding an explicit inverse instead of
  // the full tableau. The revised forms make exactly the same Bland choices
  // as the tableau, so results are identical; they are just cheaper when
  // one dimension is much larger than the other.
  bool revised = true;
};

namespace detail {

// Dictionary-form simplex for  max c.x  s.t.  A x <= b, x >= 0:
//   x_B(i) = b_i - sum_j a_ij x_N(j),   z = z0 + sum_j d_j x_N(j).
// Entering and leaving choices follow Bland's smallest-label rule in
// every phase, so the method terminates without perturbation.
template <class Q>
class Dictionary {
 public:
  Dictionary(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.column_count();
    m_ = lp.row_count();
    width_ = n_;
    const bool flip = lp.sense == Sense::minimize;
    a_.assign(static_cast<std::size_t>(m_) * n_, Q(0));
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : lp.rows[i]) at(i, t.column) += from_mpq<Q>(flip ? mpq_class(-t.coef.raw()) : t.coef.raw());
      b_[i] = from_mpq<Q>(flip ? mpq_class(-lp.rhs[i].raw()) : lp.rhs[i].raw());
    }
    c_.resize(n_);
    for (int j = 0; j < n_; ++j) c_[j] = from_mpq<Q>(flip ? mpq_class(-lp.objective[j].raw()) : lp.objective[j].raw());
    d_ = c_;
    nonbasic_.resize(n_);
    basic_.resize(m_);
    for (int j = 0; j < n_; ++j) nonbasic_[j] = j;
    for (int i = 0; i < m_; ++i) basic_[i] = n_ + i;
  }

  LPSolution run(Sense sense) {
    bool feasible = true;
    for (const auto& v : b_) feasible = feasible && sgn(v) >= 0;
    bool dual_feasible = true;
    for (const auto& v : d_) dual_feasible = dual_feasible && sgn(v) <= 0;

    if (!feasible && dual_feasible) {
      if (auto row = dual_simplex()) return infeasible(*row);
    } else if (!feasible) {
      if (!phase_one()) return farkas_from_phase_one();
    }
    if (auto entering = primal_simplex()) return unbounded(*entering, sense);
    return optimal(sense);
  }

 private:
  Q& at(int i, int j) { return a_[static_cast<std::size_t>(i) * width_ + j]; }

  void count_pivot() {
    if (++pivots_ > opt_.max_pivots)
      throw InvariantError("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
  }

  void pivot(int r, int s) {
    count_pivot();
    Q* row = &a_[static_cast<std::size_t>(r) * width_];
    const Q inv = Q(1) / row[s];
    nz_.clear();
    for (int j = 0; j < cols(); ++j) {
      if (j == s || sgn(row[j]) == 0) continue;
      row[j] *= inv;
      nz_.push_back(j);
    }
    row[s] = inv;
    b_[r] *= inv;

    Q f, tmp;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      Q* other = &a_[static_cast<std::size_t>(i) * width_];
      if (sgn(other[s]) == 0) continue;
      f = other[s];
      for (int j : nz_) {
        tmp = f * row[j];
        other[j] -= tmp;
      }
      other[s] = -f * inv;
      tmp = f * b_[r];
      b_[i] -= tmp;
    }
    if (sgn(d_[s]) != 0) {
      f = d_[s];
      for (int j : nz_) {
        tmp = f * row[j];
        d_[j] -= tmp;
      }
      d_[s] = -f * inv;
      z0_ += f * b_[r];
    }
    std::swap(basic_[r], nonbasic_[s]);
  }

  int cols() const { return static_cast<int>(nonbasic_.size()); }
  bool is_slack(int label) const { return label >= n_ && label < n_ + m_; }

  // Returns the entering position on unboundedness, nothing at optimum.
  std::optional<int> primal_simplex() {
    for (;;) {
      int s = -1;
      for (int j = 0; j < cols(); ++j)
        if (sgn(d_[j]) > 0 && (s < 0 || nonbasic_[j] < nonbasic_[s])) s = j;
      if (s < 0) return std::nullopt;
      int r = -1;
      Q best, ratio;
      for (int i = 0; i < m_; ++i) {
        const Q& a = at(i, s);
        if (sgn(a) <= 0) continue;
        ratio = b_[i] / a;
        if (r < 0 || ratio < best || (ratio == best && basic_[i] < basic_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r < 0) return s;
      pivot(r, s);
    }
  }

  // Requires d <= 0. Returns an infeasible row if one is found.
  std::optional<int> dual_simplex() {
    for (;;) {
      int r = -1;
      for (int i = 0; i < m_; ++i)
        if (sgn(b_[i]) < 0 && (r < 0 || basic_[i] < basic_[r])) r = i;
      if (r < 0) return std::nullopt;
      int s = -1;
      Q best, ratio;
      for (int j = 0; j < cols(); ++j) {
        const Q& a = at(r, j);
        if (sgn(a) >= 0) continue;
        ratio = d_[j] / a;
        if (s < 0 || ratio < best || (ratio == best && nonbasic_[j] < nonbasic_[s])) {
          s = j;
          best = ratio;
        }
      }
      if (s < 0) return r;
      pivot(r, s);
    }
  }

  // Auxiliary problem max -x0 s.t. A x - x0 <= b. Returns false when the
  // original problem is infeasible; aux_duals_ then holds a Farkas vector.
  bool phase_one() {
    const int aux = n_ + m_;
    // Widen every row by one column for x0.
    std::vector<Q> wide(static_cast<std::size_t>(m_) * (width_ + 1));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < width_; ++j) wide[static_cast<std::size_t>(i) * (width_ + 1) + j] = at(i, j);
      wide[static_cast<std::size_t>(i) * (width_ + 1) + width_] = -1;
    }
    a_.swap(wide);
    ++width_;
    nonbasic_.push_back(aux);
    const int s0 = cols() - 1;
    d_.assign(cols(), Q(0));
    d_[s0] = -1;
    z0_ = 0;

    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (b_[i] < b_[r] || (b_[i] == b_[r] && basic_[i] < basic_[r])) r = i;
    pivot(r, s0);
    primal_simplex();

    if (sgn(z0_) < 0) {
      aux_duals_.assign(m_, Q(0));
      for (int j = 0; j < cols(); ++j)
        if (nonbasic_[j] >= n_ && nonbasic_[j] < aux) aux_duals_[nonbasic_[j] - n_] = -d_[j];
      return false;
    }

    // Drive x0 out of the basis if it stayed there at level zero.
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] != aux) continue;
      int s = -1;
      for (int j = 0; j < cols(); ++j)
        if (sgn(at(i, j)) != 0 && (s < 0 || nonbasic_[j] < nonbasic_[s])) s = j;
      // An all-zero row is redundant; x0 then stays basic at zero and the
      // row never takes part in a pivot again.
      if (s >= 0) pivot(i, s);
      break;
    }
    // Drop the x0 column.
    int pos = -1;
    for (int j = 0; j < cols(); ++j)
      if (nonbasic_[j] == aux) pos = j;
    if (pos >= 0) {
      std::vector<Q> narrow(static_cast<std::size_t>(m_) * (width_ - 1));
      for (int i = 0; i < m_; ++i) {
        int out = 0;
        for (int j = 0; j < width_; ++j)
          if (j != pos) narrow[static_cast<std::size_t>(i) * (width_ - 1) + out++] = at(i, j);
      }
      a_.swap(narrow);
      --width_;
      nonbasic_.erase(nonbasic_.begin() + pos);
    }

    // Re-express the true objective over the current nonbasic variables.
    d_.assign(cols(), Q(0));
    z0_ = 0;
    for (int j = 0; j < cols(); ++j)
      if (nonbasic_[j] < n_) d_[j] = c_[nonbasic_[j]];
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= n_) continue;
      const Q& cb = c_[basic_[i]];
      if (sgn(cb) == 0) continue;
      z0_ += cb * b_[i];
      for (int j = 0; j < cols(); ++j) d_[j] -= cb * at(i, j);
    }
    return true;
  }

  std::vector<Rational> structural_values() const {
    std::vector<Rational> x(n_, Rational(0));
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = Rational(to_mpq(b_[i]));
    return x;
  }

  LPSolution base(LPStatus status) const {
    LPSolution s;
    s.status = status;
    s.basis = basic_;
    s.pivots = pivots_;
    return s;
  }

  LPSolution optimal(Sense sense) {
    LPSolution s = base(LPStatus::optimal);
    s.values = structural_values();
    s.objective = Rational(to_mpq(sense == Sense::minimize ? Q(-z0_) : z0_));
    s.row_duals.assign(m_, Rational(0));
    for (int j = 0; j < cols(); ++j)
      if (is_slack(nonbasic_[j])) s.row_duals[nonbasic_[j] - n_] = Rational(to_mpq(-d_[j]));
    return s;
  }

  LPSolution infeasible(int r) {
    LPSolution s = base(LPStatus::infeasible);
    s.farkas.assign(m_, Rational(0));
    if (is_slack(basic_[r])) s.farkas[basic_[r] - n_] = Rational(1);
    for (int j = 0; j < cols(); ++j)
      if (is_slack(nonbasic_[j])) s.farkas[nonbasic_[j] - n_] = Rational(to_mpq(at(r, j)));
    return s;
  }

  LPSolution farkas_from_phase_one() {
    LPSolution s = base(LPStatus::infeasible);
    for (auto& v : aux_duals_) s.farkas.emplace_back(to_mpq(v));
    return s;
  }

  LPSolution unbounded(int entering, Sense sense) {
    LPSolution s = base(LPStatus::unbounded);
    s.values = structural_values();
    s.ray.assign(n_, Rational(0));
    if (nonbasic_[entering] < n_) s.ray[nonbasic_[entering]] = Rational(1);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) s.ray[basic_[i]] = Rational(to_mpq(-at(i, entering)));
    Rational z;
    for (int j = 0; j < n_; ++j) z += Rational(to_mpq(c_[j])) * s.values[j];
    s.objective = sense == Sense::minimize ? -z : z;
    return s;
  }

  SimplexOptions opt_;
  int n_ = 0, m_ = 0;
  int width_ = 0;
  std::vector<Q> a_, b_, c_, d_;
  Q z0_{0};
  std::vector<int> basic_, nonbasic_, nz_;
  std::vector<Q> aux_duals_;
  std::size_t pivots_ = 0;

};

// Revised primal simplex for max c.x, Ax <= b, x >= 0 with b >= 0. Keeps
// B^{-1} (m x m) and prices columns on demand. Decisions match
// Dictionary::primal_simplex exactly: smallest-label entering variable
// with positive reduced cost, minimum ratio with smallest-label ties.
template <class Q>
class RevisedPrimal {
 public:
  RevisedPrimal(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.column_count();
    m_ = lp.row_count();
    const bool flip = lp.sense == Sense::minimize;
    cols_.assign(n_, {});
    for (int i = 0; i < m_; ++i)
      for (const auto& t : lp.rows[i]) add_entry(i, t.column, from_mpq<Q>(flip ? mpq_class(-t.coef.raw()) : t.coef.raw()));
    c_.resize(n_);
    for (int j = 0; j < n_; ++j) c_[j] = from_mpq<Q>(flip ? mpq_class(-lp.objective[j].raw()) : lp.objective[j].raw());
    xb_.resize(m_);
    for (int i = 0; i < m_; ++i) xb_[i] = from_mpq<Q>(flip ? mpq_class(-lp.rhs[i].raw()) : lp.rhs[i].raw());
    binv_.assign(static_cast<std::size_t>(m_) * m_, Q(0));
    for (int i = 0; i < m_; ++i) inv(i, i) = Q(1);
    basic_.resize(m_);
    row_of_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      row_of_[n_ + i] = i;
    }
  }

  LPSolution run(Sense sense) {
    std::vector<Q> y(m_), alpha(m_);
    for (;;) {
      // y = c_B^T B^{-1}
      std::fill(y.begin(), y.end(), Q(0));
      for (int i = 0; i < m_; ++i) {
        const Q cb = cost(basic_[i]);
        if (sgn(cb) == 0) continue;
        for (int k = 0; k < m_; ++k)
          if (sgn(inv(i, k)) != 0) y[k] += cb * inv(i, k);
      }
      int entering = -1;
      for (int label = 0; label < n_ + m_ && entering < 0; ++label) {
        if (row_of_[label] >= 0) continue;
        Q d;
        if (label < n_) {
          d = c_[label];
          for (const auto& [i, a] : cols_[label]) d -= y[i] * a;
        } else {
          d = -y[label - n_];
        }
        if (sgn(d) > 0) entering = label;
      }
      if (entering < 0) return optimal(sense, y);

      // alpha = B^{-1} A_entering
      std::fill(alpha.begin(), alpha.end(), Q(0));
      if (entering < n_) {
        for (const auto& [k, a] : cols_[entering])
          for (int i = 0; i < m_; ++i)
            if (sgn(inv(i, k)) != 0) alpha[i] += inv(i, k) * a;
      } else {
        for (int i = 0; i < m_; ++i) alpha[i] = inv(i, entering - n_);
      }
      int r = -1;
      Q best, ratio;
      for (int i = 0; i < m_; ++i) {
        if (sgn(alpha[i]) <= 0) continue;
        ratio = xb_[i] / alpha[i];
        if (r < 0 || ratio < best || (ratio == best && basic_[i] < basic_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r < 0) return unbounded(sense, entering, alpha);
      pivot(r, entering, alpha);
    }
  }

 private:
  Q& inv(int i, int k) { return binv_[static_cast<std::size_t>(i) * m_ + k]; }
  Q cost(int label) const { return label < n_ ? c_[label] : Q(0); }

  void add_entry(int row, int col, Q value) {
    for (auto& [i, a] : cols_[col])
      if (i == row) {
        a += value;
        return;
      }
    cols_[col].emplace_back(row, value);
  }

  void pivot(int r, int entering, const std::vector<Q>& alpha) {
    if (++pivots_ > opt_.max_pivots)
      throw InvariantError("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
    const Q p = Q(1) / alpha[r];
    nz_.clear();
    for (int k = 0; k < m_; ++k)
      if (sgn(inv(r, k)) != 0) {
        inv(r, k) *= p;
        nz_.push_back(k);
      }
    xb_[r] *= p;
    Q tmp;
    for (int i = 0; i < m_; ++i) {
      if (i == r || sgn(alpha[i]) == 0) continue;
      for (int k : nz_) {
        tmp = alpha[i] * inv(r, k);
        inv(i, k) -= tmp;
      }
      tmp = alpha[i] * xb_[r];
      xb_[i] -= tmp;
    }
    row_of_[basic_[r]] = -1;
    basic_[r] = entering;
    row_of_[entering] = r;
  }

  std::vector<Rational> structural_values() const {
    std::vector<Rational> x(n_, Rational(0));
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = Rational(to_mpq(xb_[i]));
    return x;
  }

  Rational true_objective(Sense sense, const std::vector<Rational>& x) const {
    Rational z;
    for (int j = 0; j < n_; ++j)
      if (!x[j].is_zero()) z += Rational(to_mpq(c_[j])) * x[j];
    return sense == Sense::minimize ? -z : z;
  }

  LPSolution optimal(Sense sense, const std::vector<Q>& y) const {
    LPSolution s;
    s.status = LPStatus::optimal;
    s.basis = basic_;
    s.pivots = pivots_;
    s.values = structural_values();
    s.objective = true_objective(sense, s.values);
    for (const auto& v : y) s.row_duals.emplace_back(to_mpq(v));
    return s;
  }

  LPSolution unbounded(Sense sense, int entering, const std::vector<Q>& alpha) const {
    LPSolution s;
    s.status = LPStatus::unbounded;
    s.basis = basic_;
    s.pivots = pivots_;
    s.values = structural_values();
    s.objective = true_objective(sense, s.values);
    s.ray.assign(n_, Rational(0));
    if (entering < n_) s.ray[entering] = Rational(1);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) s.ray[basic_[i]] = Rational(to_mpq(-alpha[i]));
    return s;
  }

  SimplexOptions opt_;
  int n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<int, Q>>> cols_;
  std::vector<Q> c_, xb_, binv_;
  std::vector<int> basic_, row_of_, nz_;
  std::size_t pivots_ = 0;
};

// Dual simplex for max c.x, Ax <= b, x >= 0 with c <= 0, kept in "row
// basis" form: the n tight constraints at the current vertex (x_j >= 0 or
// a row of A) and the inverse W of their n x n matrix. Only the leaving
// row of the dictionary is ever materialized. Decisions match
// Dictionary::dual_simplex exactly.
template <class Q>
class RevisedDual {
 public:
  RevisedDual(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.column_count();
    m_ = lp.row_count();
    const bool flip = lp.sense == Sense::minimize;
    rows_.assign(m_, {});
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : lp.rows[i]) {
        Q v = from_mpq<Q>(flip ? mpq_class(-t.coef.raw()) : t.coef.raw());
        auto it = std::find_if(rows_[i].begin(), rows_[i].end(), [&](const auto& e) { return e.first == t.column; });
        if (it == rows_[i].end()) rows_[i].emplace_back(t.column, v);
        else it->second += v;
      }
      b_[i] = from_mpq<Q>(flip ? mpq_class(-lp.rhs[i].raw()) : lp.rhs[i].raw());
    }
    c_.resize(n_);
    for (int j = 0; j < n_; ++j) c_[j] = from_mpq<Q>(flip ? mpq_class(-lp.objective[j].raw()) : lp.objective[j].raw());
    w_.assign(static_cast<std::size_t>(n_) * n_, Q(0));
    for (int j = 0; j < n_; ++j) w(j, j) = Q(-1);
    nonbasic_.resize(n_);
    for (int j = 0; j < n_; ++j) nonbasic_[j] = j;
    d_ = c_;
    basic_.resize(m_);
    row_of_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      row_of_[n_ + i] = i;
    }
  }

  static bool applies(const LinearProgram& lp) {
    const bool flip = lp.sense == Sense::minimize;
    for (const auto& c : lp.objective)
      if (flip ? c.sign() < 0 : c.sign() > 0) return false;
    return true;
  }

  LPSolution run(Sense sense) {
    std::vector<Q> x(n_), abar(n_), u(n_);
    for (;;) {
      // x = W h_N; only row constraints have nonzero right-hand sides.
      std::fill(x.begin(), x.end(), Q(0));
      for (int p = 0; p < n_; ++p) {
        if (nonbasic_[p] < n_) continue;
        const Q& h = b_[nonbasic_[p] - n_];
        if (sgn(h) == 0) continue;
        for (int j = 0; j < n_; ++j)
          if (sgn(w(j, p)) != 0) x[j] += w(j, p) * h;
      }
      // Smallest basic label whose slack is negative.
      int leaving = -1;
      for (int j = 0; j < n_ && leaving < 0; ++j)
        if (row_of_[j] >= 0 && sgn(x[j]) < 0) leaving = j;
      for (int i = 0; i < m_ && leaving < 0; ++i)
        if (row_of_[n_ + i] >= 0 && sgn(slack(i, x)) < 0) leaving = n_ + i;
      if (leaving < 0) return optimal(sense, x);

      // Dictionary row of the leaving label: abar = -g W.
      if (leaving < n_) {
        for (int p = 0; p < n_; ++p) abar[p] = w(leaving, p);
      } else {
        std::fill(abar.begin(), abar.end(), Q(0));
        for (const auto& [j, a] : rows_[leaving - n_])
          for (int p = 0; p < n_; ++p)
            if (sgn(w(j, p)) != 0) abar[p] -= a * w(j, p);
      }
      int s = -1;
      Q best, ratio;
      for (int p = 0; p < n_; ++p) {
        if (sgn(abar[p]) >= 0) continue;
        ratio = d_[p] / abar[p];
        if (s < 0 || ratio < best || (ratio == best && nonbasic_[p] < nonbasic_[s])) {
          s = p;
          best = ratio;
        }
      }
      if (s < 0) return infeasible(leaving, abar);
      pivot(leaving, s, abar, u);
    }
  }

 private:
  Q& w(int j, int p) { return w_[static_cast<std::size_t>(j) * n_ + p]; }

  Q slack(int i, const std::vector<Q>& x) const {
    Q v = b_[i];
    for (const auto& [j, a] : rows_[i])
      if (sgn(x[j]) != 0) v -= a * x[j];
    return v;
  }

  void pivot(int leaving, int s, const std::vector<Q>& abar, std::vector<Q>& u) {
    if (++pivots_ > opt_.max_pivots)
      throw InvariantError("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
    const Q inv = Q(1) / abar[s];
    for (int j = 0; j < n_; ++j) u[j] = w(j, s);
    Q f, tmp;
    for (int p = 0; p < n_; ++p) {
      if (p == s || sgn(abar[p]) == 0) continue;
      f = abar[p] * inv;
      for (int j = 0; j < n_; ++j)
        if (sgn(u[j]) != 0) {
          tmp = u[j] * f;
          w(j, p) -= tmp;
        }
      tmp = d_[s] * f;
      d_[p] -= tmp;
    }
    for (int j = 0; j < n_; ++j) w(j, s) = -u[j] * inv;
    d_[s] = -d_[s] * inv;

    const int entering = nonbasic_[s];
    const int r = row_of_[leaving];
    row_of_[leaving] = -1;
    basic_[r] = entering;
    row_of_[entering] = r;
    nonbasic_[s] = leaving;
  }

  LPSolution base(LPStatus status) const {
    LPSolution s;
    s.status = status;
    s.basis = basic_;
    s.pivots = pivots_;
    return s;
  }

  LPSolution optimal(Sense sense, const std::vector<Q>& x) const {
    LPSolution s = base(LPStatus::optimal);
    Rational z;
    for (int j = 0; j < n_; ++j) {
      s.values.emplace_back(to_mpq(x[j]));
      if (!s.values.back().is_zero()) z += Rational(to_mpq(c_[j])) * s.values.back();
    }
    s.objective = sense == Sense::minimize ? -z : z;
    s.row_duals.assign(m_, Rational(0));
    for (int p = 0; p < n_; ++p)
      if (nonbasic_[p] >= n_) s.row_duals[nonbasic_[p] - n_] = Rational(to_mpq(-d_[p]));
    return s;
  }

  LPSolution infeasible(int leaving, const std::vector<Q>& abar) const {
    LPSolution s = base(LPStatus::infeasible);
    s.farkas.assign(m_, Rational(0));
    if (leaving >= n_) s.farkas[leaving - n_] = Rational(1);
    for (int p = 0; p < n_; ++p)
      if (nonbasic_[p] >= n_) s.farkas[nonbasic_[p] - n_] = Rational(to_mpq(abar[p]));
    return s;
  }

  SimplexOptions opt_;
  int n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<int, Q>>> rows_;
  std::vector<Q> b_, c_, d_, w_;
  std::vector<int> nonbasic_, basic_, row_of_;
  std::size_t pivots_ = 0;
};

template <class Q>
LPSolution run_simplex(const LinearProgram& lp, const SimplexOptions& opt) {
  if (opt.revised) {
    const bool flip = lp.sense == Sense::minimize;
    bool origin_feasible = true;
    for (const auto& b : lp.rhs) origin_feasible = origin_feasible && (flip ? b.sign() <= 0 : b.sign() >= 0);
    if (origin_feasible) return RevisedPrimal<Q>(lp, opt).run(lp.sense);
    if (RevisedDual<Q>::applies(lp)) return RevisedDual<Q>(lp, opt).run(lp.sense);
  }
  return Dictionary<Q>(lp, opt).run(lp.sense);
}

}  // namespace detail

inline std::vector<int> tight_rows_of(const LinearProgram& lp, const std::vector<Rational>& x) {
  std::vector<int> out;
  for (int i = 0; i < lp.row_count(); ++i)
    if (lp.row_value(i, x) == lp.rhs[i]) out.push_back(i);
  return out;
}

// Exact optimum (or a certificate of infeasibility or unboundedness).
inline LPSolution solve_exact(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  lp.validate();
  LPSolution s;
  try {
    s = detail::run_simplex<detail::SmallQ>(lp, opt);
  } catch (const detail::SmallOverflow&) {
    // Same pivot sequence, unbounded precision.
    s = detail::run_simplex<mpq_class>(lp, opt);
  }
  if (s.status != LPStatus::infeasible) s.tight_rows = tight_rows_of(lp, s.values);
  return s;
}

// Describes the first violated constraint of x, or nothing if x is feasible.
inline std::optional<std::string> find_violation(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != lp.column_count())
    return "value vector has " + std::to_string(x.size()) + " entries, LP has " +
           std::to_string(lp.column_count()) + " columns";
  for (int j = 0; j < lp.column_count(); ++j)
    if (x[j].sign() < 0) return "variable " + std::to_string(j) + " is negative (" + x[j].to_string() + ")";
  for (int i = 0; i < lp.row_count(); ++i) {
    const Rational v = lp.row_value(i, x);
    const bool ok = lp.sense == Sense::maximize ? v <= lp.rhs[i] : v >= lp.rhs[i];
    if (!ok)
      return "row " + std::to_string(i) + " has value " + v.to_string() +
             (lp.sense == Sense::maximize ? " > " : " < ") + lp.rhs[i].to_string();
  }
  return std::nullopt;
}

inline Rational objective_value(const LinearProgram& lp, const std::vector<Rational>& x) {
  Rational z;
  for (int j = 0; j < lp.column_count(); ++j) z += lp.objective[j] * x[j];
  return z;
}

// Wraps a candidate point as a solution; status "feasible" if it satisfies
// every constraint. Throws VerificationError otherwise.
inline LPSolution make_solution(const LinearProgram& lp, std::vector<Rational> x) {
  if (auto v = find_violation(lp, x)) throw VerificationError(*v);
  LPSolution s;
  s.status = LPStatus::feasible;
  s.objective = objective_value(lp, x);
  s.tight_rows = tight_rows_of(lp, x);
  s.values = std::move(x);
  return s;
}

// The LP dual: max c.x, Ax <= b  <->  min b.y, A^T y >= c (and symmetrically).
inline LinearProgram dual_of(const LinearProgram& lp) {
  LinearProgram d;
  d.sense = lp.sense == Sense::maximize ? Sense::minimize : Sense::maximize;
  d.objective = lp.rhs;
  d.rows.assign(lp.column_count(), {});
  for (int i = 0; i < lp.row_count(); ++i)
    for (const auto& t : lp.rows[i]) d.rows[t.column].push_back({i, t.coef});
  d.rhs = lp.objective;
  return d;
}

// Checks a Farkas certificate of infeasibility.
inline bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& y) {
  if (static_cast<int>(y.size()) != lp.row_count()) return false;
  std::vector<Rational> ya(lp.column_count());
  Rational yb;
  for (int i = 0; i < lp.row_count(); ++i) {
    if (y[i].sign() < 0) return false;
    for (const auto& t : lp.rows[i]) ya[t.column] += y[i] * t.coef;
    yb += y[i] * lp.rhs[i];
  }
  const int dir = lp.sense == Sense::maximize ? 1 : -1;
  for (const auto& v : ya)
    if (v.sign() * dir < 0) return false;
  return yb.sign() * dir < 0;
}

// Checks that `ray` is an improving recession direction at a feasible point.
inline bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& x, const std::vector<Rational>& ray) {
  if (find_violation(lp, x)) return false;
  if (static_cast<int>(ray.size()) != lp.column_count()) return false;
  const int dir = lp.sense == Sense::maximize ? 1 : -1;
  for (const auto& r : ray)
    if (r.sign() < 0) return false;
  for (int i = 0; i < lp.row_count(); ++i)
    if (lp.row_value(i, ray).sign() * dir > 0) return false;
  return objective_value(lp, ray).sign() * dir > 0;
}

}  // namespace tilekit
