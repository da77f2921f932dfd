#pragma once

#include "gl2ode/expr.hpp"
#include "gl2ode/number.hpp"

namespace gl2ode {

/// Exact arithmetic in the quadratic field Q(sqrt 3): a + b*sqrt(3).
/// The 3*sqrt(3) factor of the structural 3-tensor lives here.
struct Q3 {
  Rational a{0}, b{0};

  Q3() = default;
  Q3(Rational ra) : a(std::move(ra)) {}
  Q3(long v) : a(v) {}
  Q3(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

  static Q3 sqrt3() { return Q3(Rational(0), Rational(1)); }

  bool is_zero() const { return a == 0 && b == 0; }

  friend Q3 operator+(const Q3 &x, const Q3 &y) { return {x.a + y.a, x.b + y.b}; }
  friend Q3 operator-(const Q3 &x, const Q3 &y) { return {x.a - y.a, x.b - y.b}; }
  friend Q3 operator-(const Q3 &x) { return {-x.a, -x.b}; }
  friend Q3 operator*(const Q3 &x, const Q3 &y) {
    return {x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend Q3 operator/(const Q3 &x, const Q3 &y) {
    Rational n = y.a * y.a - 3 * y.b * y.b;  // field norm, zero only at 0
    if (n == 0) throw DivisionByZero("division by zero in Q(sqrt3)");
    Q3 conj{y.a, -y.b};
    Q3 p = x * conj;
    return {p.a / n, p.b / n};
  }
  Q3 &operator+=(const Q3 &y) { return *this = *this + y; }
  Q3 &operator-=(const Q3 &y) { return *this = *this - y; }
  Q3 &operator*=(const Q3 &y) { return *this = *this * y; }
  friend bool operator==(const Q3 &x, const Q3 &y) { return x.a == y.a && x.b == y.b; }

  Float to_float() const {
    return gl2ode::to_float(a) + gl2ode::to_float(b) * boost::multiprecision::sqrt(Float(3));
  }
  Expr to_expr() const {
    return constant(a) + constant(b) * make_power(constant(3), Rational(1, 2));
  }
  std::string str() const {
    if (b == 0) return a.str();
    std::string s = b.str() + "*sqrt(3)";
    if (a != 0) s = a.str() + (b > 0 ? "+" : "") + s;
    return s;
  }
};

/// Scalar traits shared by the exact and floating tensor algebra paths.
template <class K>
struct ScalarOps;

template <>
struct ScalarOps<Q3> {
  static Q3 sqrt3() { return Q3::sqrt3(); }
  static Q3 from_rational(const Rational &q) { return Q3(q); }
  static bool approx_zero(const Q3 &x, const Float &) { return x.is_zero(); }
  static Float magnitude(const Q3 &x) { return boost::multiprecision::abs(x.to_float()); }
};

template <>
struct ScalarOps<Float> {
  static Float sqrt3() { return boost::multiprecision::sqrt(Float(3)); }
  static Float from_rational(const Rational &q) { return to_float(q); }
  static bool approx_zero(const Float &x, const Float &tol) {
    return boost::multiprecision::abs(x) <= tol;
  }
  static Float magnitude(const Float &x) { return boost::multiprecision::abs(x); }
};

template <>
struct ScalarOps<Rational> {
  static Rational from_rational(const Rational &q) { return q; }
  static bool approx_zero(const Rational &x, const Float &) { return x == 0; }
  static Float magnitude(const Rational &x) {
    return boost::multiprecision::abs(to_float(x));
  }
};

}  // namespace gl2ode
