#pragma once

#include <cmath>
#include <compare>
#include <numeric>
#include <string>

#include "tilekit/rational.hpp"

namespace tilekit {

// Nonnegative real of the form coef * radicand^(1/degree), compared exactly
// against rationals. Regularity parameters such as (16 eps)^(1/5) are
// irrational, so thresholds are carried in this form.
class Radical {
 public:
  Radical() = default;

  static Radical exact(const Rational& value) { return Radical(value, Rational(1), 1); }
  static Radical root(const Rational& radicand, unsigned degree) { return Radical(Rational(1), radicand, degree); }

  const Rational& coef() const { return coef_; }
  const Rational& radicand() const { return radicand_; }
  unsigned degree() const { return degree_; }
  bool is_rational() const { return degree_ == 1 || radicand_.is_zero() || radicand_ == Rational(1); }

  Radical scaled(const Rational& factor) const {
    if (factor.sign() < 0) throw ParameterError("Radical: negative scale");
    return Radical(coef_ * factor, radicand_, degree_);
  }

  // Exact value; only valid when is_rational().
  Rational value() const {
    if (degree_ == 1) return coef_ * radicand_;
    if (radicand_.is_zero()) return Rational(0);
    if (radicand_ == Rational(1)) return coef_;
    throw ParameterError("Radical: value is irrational: " + to_string());
  }

  double to_double() const { return coef_.to_double() * std::pow(radicand_.to_double(), 1.0 / degree_); }

  std::string to_string() const {
    if (degree_ == 1) return (coef_ * radicand_).to_string();
    std::string s = "(" + radicand_.to_string() + ")^(1/" + std::to_string(degree_) + ")";
    if (coef_ != Rational(1)) s = coef_.to_string() + "*" + s;
    return s;
  }

  // Three-way comparison of this value against a rational.
  std::strong_ordering compare(const Rational& v) const {
    if (v.sign() < 0) return std::strong_ordering::greater;
    if (coef_.is_zero() || radicand_.is_zero()) return Rational(0) <=> v;
    // coef * r^(1/p) vs v  <=>  r vs (v / coef)^p
    const Rational scaled = v / coef_;
    return radicand_ <=> scaled.pow(degree_);
  }

  friend bool operator<=(const Radical& a, const Rational& v) { return a.compare(v) != std::strong_ordering::greater; }
  friend bool operator<(const Radical& a, const Rational& v) { return a.compare(v) == std::strong_ordering::less; }
  friend bool operator>=(const Radical& a, const Rational& v) { return a.compare(v) != std::strong_ordering::less; }
  friend bool operator>(const Radical& a, const Rational& v) { return a.compare(v) == std::strong_ordering::greater; }
  friend bool operator<=(const Rational& v, const Radical& a) { return a >= v; }
  friend bool operator<(const Rational& v, const Radical& a) { return a > v; }
  friend bool operator>=(const Rational& v, const Radical& a) { return a <= v; }
  friend bool operator>(const Rational& v, const Radical& a) { return a < v; }

  // Exact comparison of two radicals by raising both to a common power.
  friend std::strong_ordering operator<=>(const Radical& a, const Radical& b) {
    const unsigned l = std::lcm(a.degree_, b.degree_);
    const Rational lhs = a.coef_.pow(l) * a.radicand_.pow(l / a.degree_);
    const Rational rhs = b.coef_.pow(l) * b.radicand_.pow(l / b.degree_);
    return lhs <=> rhs;
  }
  friend bool operator==(const Radical& a, const Radical& b) { return (a <=> b) == 0; }

 private:
  Radical(Rational coef, Rational radicand, unsigned degree)
      : coef_(std::move(coef)), radicand_(std::move(radicand)), degree_(degree) {
    if (degree_ == 0) throw ParameterError("Radical: zero degree");
    if (coef_.sign() < 0 || radicand_.sign() < 0) throw ParameterError("Radical: negative operand");
  }

  Rational coef_{0};
  Rational radicand_{1};
  unsigned degree_{1};
};

inline Radical max(const Radical& a, const Radical& b) { return a < b ? b : a; }

}  // namespace tilekit
