#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>

namespace tilekit::detail {

// Thrown by SmallQ when a result leaves the 64-bit range.
struct SmallOverflow {};

inline std::uint64_t binary_gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0) return b;
  if (b == 0) return a;
  const int shift = __builtin_ctzll(a | b);
  a >>= __builtin_ctzll(a);
  do {
    b >>= __builtin_ctzll(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

// Reduced fraction with 64-bit numerator and denominator. Every operation
// either returns the exact result or throws SmallOverflow; it never rounds.
// The simplex runs on this type first and restarts on mpq_class if any
// intermediate value grows too large.
class SmallQ {
 public:
  SmallQ() = default;
  SmallQ(long v) : n_(v) { guard(v); }  // NOLINT(google-explicit-constructor)

  static SmallQ from(const mpq_class& q) {
    if (!mpz_fits_slong_p(q.get_num_mpz_t()) || !mpz_fits_slong_p(q.get_den_mpz_t())) throw SmallOverflow{};
    SmallQ r;
    r.n_ = q.get_num().get_si();
    r.d_ = q.get_den().get_si();
    guard(r.n_);
    return r;
  }

  mpq_class to_mpq() const {
    mpq_class q(n_, d_);
    q.canonicalize();
    return q;
  }

  friend int sgn(const SmallQ& q) { return (q.n_ > 0) - (q.n_ < 0); }

  friend SmallQ operator*(const SmallQ& a, const SmallQ& b) {
    if (a.n_ == 0 || b.n_ == 0) return SmallQ();
    SmallQ r;
    if (a.d_ == 1 && b.d_ == 1) {
      if (__builtin_mul_overflow(a.n_, b.n_, &r.n_)) throw SmallOverflow{};
      guard(r.n_);
      return r;
    }
    const std::int64_t g1 = static_cast<std::int64_t>(binary_gcd(uabs(a.n_), static_cast<std::uint64_t>(b.d_)));
    const std::int64_t g2 = static_cast<std::int64_t>(binary_gcd(uabs(b.n_), static_cast<std::uint64_t>(a.d_)));
    if (__builtin_mul_overflow(a.n_ / g1, b.n_ / g2, &r.n_)) throw SmallOverflow{};
    if (__builtin_mul_overflow(a.d_ / g2, b.d_ / g1, &r.d_)) throw SmallOverflow{};
    guard(r.n_);
    return r;
  }

  friend SmallQ operator+(const SmallQ& a, const SmallQ& b) {
    if (a.n_ == 0) return b;
    if (b.n_ == 0) return a;
    if (a.d_ == 1 && b.d_ == 1) {
      SmallQ r;
      if (__builtin_add_overflow(a.n_, b.n_, &r.n_)) throw SmallOverflow{};
      guard(r.n_);
      return r;
    }
    const std::int64_t g = static_cast<std::int64_t>(binary_gcd(static_cast<std::uint64_t>(a.d_),
                                                                static_cast<std::uint64_t>(b.d_)));
    std::int64_t x, y, t;
    if (__builtin_mul_overflow(a.n_, b.d_ / g, &x) || __builtin_mul_overflow(b.n_, a.d_ / g, &y) ||
        __builtin_add_overflow(x, y, &t))
      throw SmallOverflow{};
    SmallQ r;
    if (t == 0) return r;
    guard(t);
    const std::int64_t g2 = g == 1 ? 1 : static_cast<std::int64_t>(binary_gcd(uabs(t), static_cast<std::uint64_t>(g)));
    r.n_ = t / g2;
    if (__builtin_mul_overflow(a.d_ / g, b.d_ / g2, &r.d_)) throw SmallOverflow{};
    return r;
  }

  SmallQ operator-() const {
    SmallQ r = *this;
    r.n_ = -r.n_;
    return r;
  }
  friend SmallQ operator-(const SmallQ& a, const SmallQ& b) { return a + (-b); }

  SmallQ reciprocal() const {
    if (n_ == 0) throw SmallOverflow{};  // never reached: pivots are nonzero
    SmallQ r;
    r.n_ = n_ < 0 ? -d_ : d_;
    r.d_ = n_ < 0 ? -n_ : n_;
    return r;
  }
  friend SmallQ operator/(const SmallQ& a, const SmallQ& b) { return a * b.reciprocal(); }

  SmallQ& operator+=(const SmallQ& o) { return *this = *this + o; }
  SmallQ& operator-=(const SmallQ& o) { return *this = *this - o; }
  SmallQ& operator*=(const SmallQ& o) { return *this = *this * o; }

  friend bool operator==(const SmallQ& a, const SmallQ& b) { return a.n_ == b.n_ && a.d_ == b.d_; }
  friend bool operator<(const SmallQ& a, const SmallQ& b) {
    return static_cast<__int128>(a.n_) * b.d_ < static_cast<__int128>(b.n_) * a.d_;
  }

 private:
  static std::uint64_t uabs(std::int64_t v) { return v < 0 ? -static_cast<std::uint64_t>(v) : v; }
  // Keeping INT64_MIN out means negation can never overflow.
  static void guard(std::int64_t v) {
    if (v == std::numeric_limits<std::int64_t>::min()) throw SmallOverflow{};
  }

  std::int64_t n_ = 0;
  std::int64_t d_ = 1;
};

inline mpq_class to_mpq(const SmallQ& q) { return q.to_mpq(); }
inline mpq_class to_mpq(const mpq_class& q) { return q; }

template <class Q>
Q from_mpq(const mpq_class& q) {
  if constexpr (std::is_same_v<Q, SmallQ>) {
    return SmallQ::from(q);
  } else {
    return q;
  }
}

}  // namespace tilekit::detail
