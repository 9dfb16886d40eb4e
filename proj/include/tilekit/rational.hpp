#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "tilekit/error.hpp"

namespace tilekit {

// Exact arbitrary-precision fraction. Always in lowest terms with a
// positive denominator; serializes as "p/q".
class Rational {
 public:
  Rational() = default;

  template <std::integral I>
  Rational(I value) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<I>) {
      q_ = static_cast<long>(value);
    } else {
      q_ = static_cast<unsigned long>(value);
    }
  }

  Rational(long num, long den) {
    if (den == 0) throw ParameterError("Rational: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }

  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw ParameterError("Rational: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }

  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Accepts "p/q", an integer "p", or a finite decimal such as "-0.125"
  // or "3e-2". Decimals are converted exactly.
  static Rational parse(std::string_view text);

  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }
  mpq_class& raw() { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  double to_double() const { return q_.get_d(); }
  std::string to_string() const { return num().get_str() + "/" + den().get_str(); }

  mpz_class floor() const {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  mpz_class ceil() const {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }

  Rational abs() const { return Rational(::abs(q_)); }
  Rational pow(unsigned e) const {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), e);
    return Rational(n, d);
  }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw ParameterError("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(mpq_class(-q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  mpq_class q_{0};
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Integer value of an mpz that must fit in 64 bits.
inline std::int64_t to_int64(const mpz_class& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw CapacityError("integer does not fit in 64 bits: " + z.get_str());
  return z.get_si();
}

inline Rational Rational::parse(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational { throw ParameterError("cannot parse rational '" + s + "'"); };
  if (s.empty()) return fail();
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      mpz_class n(s.substr(0, slash), 10), d(s.substr(slash + 1), 10);
      return Rational(n, d);
    }
    std::string mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      mantissa = s.substr(0, e);
      exponent = std::stol(s.substr(e + 1));
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
      negative = mantissa[0] == '-';
      mantissa.erase(0, 1);
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string::npos) {
      digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
      exponent -= static_cast<long>(mantissa.size() - dot - 1);
    } else {
      digits = mantissa;
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return fail();
    mpz_class n(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (negative) n = -n;
    return exponent >= 0 ? Rational(mpz_class(n * scale), mpz_class(1)) : Rational(n, scale);
  } catch (const std::invalid_argument&) {
    return fail();
  }
}

inline mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace tilekit
