#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace gl2ode {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Float = boost::multiprecision::mpfr_float;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionByZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Working precision for all Float arithmetic, in decimal digits.
/// New mpfr values pick this up at construction time.
inline unsigned &working_digits_ref() {
  thread_local unsigned digits = 60;
  return digits;
}

inline unsigned working_digits() { return working_digits_ref(); }

inline void set_working_digits(unsigned digits) {
  working_digits_ref() = digits;
  Float::default_precision(digits);
}

/// Temporarily switches Float precision; restores on scope exit.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(working_digits()) {
    set_working_digits(digits);
  }
  ~PrecisionGuard() { set_working_digits(saved_); }
  PrecisionGuard(const PrecisionGuard &) = delete;
  PrecisionGuard &operator=(const PrecisionGuard &) = delete;

 private:
  unsigned saved_;
};

inline Float to_float(const Rational &q) { return Float(q); }

inline Int numerator(const Rational &q) { return Int(boost::multiprecision::numerator(q)); }
inline Int denominator(const Rational &q) { return Int(boost::multiprecision::denominator(q)); }

inline bool is_integer(const Rational &q) { return denominator(q) == 1; }

/// Exact integer n-th root: returns r with r^n == x, if one exists.
inline std::optional<Int> exact_iroot(const Int &x, unsigned n) {
  if (n == 0) return std::nullopt;
  if (x == 0) return Int(0);
  if (x < 0) {
    if (n % 2 == 0) return std::nullopt;
    auto r = exact_iroot(Int(-x), n);
    if (!r) return std::nullopt;
    return Int(-*r);
  }
  Int root;
  mpz_root(root.backend().data(), x.backend().data(), n);
  if (boost::multiprecision::pow(root, n) == x) return root;
  return std::nullopt;
}

/// Exact rational n-th root, if one exists (odd n permits negative x).
inline std::optional<Rational> exact_root(const Rational &x, unsigned n) {
  auto rn = exact_iroot(numerator(x), n);
  if (!rn) return std::nullopt;
  auto rd = exact_iroot(denominator(x), n);
  if (!rd) return std::nullopt;
  return Rational(*rn, *rd);
}

/// Exact x^k for integer k; throws on 0^negative.
inline Rational pow_int(const Rational &x, const Int &k) {
  if (k == 0) return Rational(1);
  if (x == 0) {
    if (k < 0) throw DivisionByZero("0 raised to a negative power");
    return Rational(0);
  }
  Rational base = k < 0 ? Rational(1) / x : x;
  Int e = abs(k);
  Rational acc(1);
  Rational b = base;
  while (e > 0) {
    if ((e & 1) != 0) acc *= b;
    e >>= 1;
    if (e > 0) b *= b;
  }
  return acc;
}

/// Exact x^(p/q) when representable as a rational; nullopt otherwise.
inline std::optional<Rational> pow_exact(const Rational &x, const Rational &e) {
  if (is_integer(e)) return pow_int(x, numerator(e));
  if (x == 0) {
    if (e < 0) throw DivisionByZero("0 raised to a negative power");
    return Rational(0);
  }
  unsigned q = static_cast<unsigned>(denominator(e));
  if (x < 0 && q % 2 == 0) return std::nullopt;  // caller decides: symbolic or DomainError
  auto root = exact_root(x, q);
  if (!root) return std::nullopt;
  return pow_int(*root, numerator(e));
}

/// Float x^(p/q); requires x > 0 for fractional exponents, x != 0 for negative ones.
inline Float pow_float(const Float &x, const Rational &e) {
  if (is_integer(e)) {
    if (x == 0 && e < 0) throw DivisionByZero("0 raised to a negative power");
    return boost::multiprecision::pow(x, Float(e));
  }
  if (x < 0) throw DomainError("negative base with fractional exponent");
  if (x == 0) {
    if (e < 0) throw DivisionByZero("0 raised to a negative power");
    return Float(0);
  }
  return boost::multiprecision::pow(x, Float(e));
}

/// Either an exact rational or a high-precision float.
class Number {
 public:
  Number() : v_(Rational(0)) {}
  Number(Rational q) : v_(std::move(q)) {}
  Number(Float f) : v_(std::move(f)) {}
  Number(long n) : v_(Rational(n)) {}

  bool exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational &rational() const { return std::get<Rational>(v_); }
  const Float &flt() const { return std::get<Float>(v_); }

  Float as_float() const { return exact() ? to_float(rational()) : flt(); }

  bool is_zero() const { return exact() ? rational() == 0 : flt() == 0; }
  bool negative() const { return exact() ? rational() < 0 : flt() < 0; }

  Number abs() const {
    if (exact()) return Number(Rational(boost::multiprecision::abs(rational())));
    return Number(Float(boost::multiprecision::abs(flt())));
  }

  friend Number operator+(const Number &a, const Number &b) {
    if (a.exact() && b.exact()) return Number(Rational(a.rational() + b.rational()));
    return Number(Float(a.as_float() + b.as_float()));
  }
  friend Number operator*(const Number &a, const Number &b) {
    if (a.exact() && b.exact()) return Number(Rational(a.rational() * b.rational()));
    return Number(Float(a.as_float() * b.as_float()));
  }
  friend Number operator-(const Number &a, const Number &b) {
    if (a.exact() && b.exact()) return Number(Rational(a.rational() - b.rational()));
    return Number(Float(a.as_float() - b.as_float()));
  }
  friend Number operator/(const Number &a, const Number &b) {
    if (b.is_zero()) throw DivisionByZero("division by zero");
    if (a.exact() && b.exact()) return Number(Rational(a.rational() / b.rational()));
    return Number(Float(a.as_float() / b.as_float()));
  }

  /// x^e with the exact path preferred: stays rational whenever the
  /// result is exactly representable (e.g. 8^(5/3) = 32).
  Number pow(const Rational &e) const {
    if (exact()) {
      auto r = pow_exact(rational(), e);
      if (r) return Number(*r);
      if (rational() < 0 && !is_integer(e))
        throw DomainError("negative base with fractional exponent");
      return Number(pow_float(to_float(rational()), e));
    }
    return Number(pow_float(flt(), e));
  }

  std::string str(unsigned digits = 0) const {
    if (exact()) return rational().str();
    return flt().str(digits == 0 ? working_digits() : digits, std::ios_base::scientific);
  }

 private:
  std::variant<Rational, Float> v_;
};

}  // namespace gl2ode
