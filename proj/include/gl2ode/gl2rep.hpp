#pragma once

#include <array>
#include <stdexcept>

#include "gl2ode/expr.hpp"
#include "gl2ode/linalg.hpp"

namespace gl2ode {

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularElement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Int binom(int n, int k) {
  if (k < 0 || k > n) return Int(0);
  Int r(1);
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

struct Generators {
  Mat<Rational> e_minus, e_plus, e_zero, e_one;
};

/// Generators of the n-dimensional irreducible gl(2,R) representation:
/// E+ has superdiagonal (n-1, n-2, ..., 1), E- subdiagonal (1, 2, ..., n-1),
/// E0 = diag(1-n, 3-n, ..., n-1), E1 = (1-n) Id.  For n = 5 this is exactly
/// the printed realization acting on the coefficient 5-space.
inline Generators rep_generators(int n) {
  if (n < 2) throw ArgumentError("rep_generators: need n >= 2");
  Generators g{Mat<Rational>(n, n), Mat<Rational>(n, n), Mat<Rational>(n, n), Mat<Rational>(n, n)};
  for (int i = 0; i + 1 < n; ++i) {
    g.e_plus(i, i + 1) = Rational(n - 1 - i);
    g.e_minus(i + 1, i) = Rational(i + 1);
  }
  for (int i = 0; i < n; ++i) {
    g.e_zero(i, i) = Rational(2 * i - (n - 1));
    g.e_one(i, i) = Rational(1 - n);
  }
  return g;
}

/// True iff [E0,E+] = -2E+, [E0,E-] = 2E-, [E+,E-] = -E0 and E1 is central.
inline bool check_sl2_relations(int n) {
  Generators g = rep_generators(n);
  Rational m2(-2), p2(2), m1(-1);
  if (!(bracket(g.e_zero, g.e_plus) == m2 * g.e_plus)) return false;
  if (!(bracket(g.e_zero, g.e_minus) == p2 * g.e_minus)) return false;
  if (!(bracket(g.e_plus, g.e_minus) == m1 * g.e_zero)) return false;
  for (const auto &x : {g.e_minus, g.e_plus, g.e_zero})
    if (!bracket(g.e_one, x).is_zero()) return false;
  return true;
}

template <class R>
R ring_value(const Rational &q);
template <>
inline Rational ring_value<Rational>(const Rational &q) {
  return q;
}
template <>
inline Expr ring_value<Expr>(const Rational &q) {
  return constant(q);
}

template <class R>
struct GL2ElementT {
  R alpha, beta, gamma, delta;
  R det() const { return alpha * delta - beta * gamma; }
};
using GL2Element = GL2ElementT<Rational>;

/// rho_n(a) acting on coefficient row vectors theta' = theta . rho_n(a):
/// substituting x = (alpha x' + beta)/(gamma x' + delta) into the binomial
/// parametrization of degree-(n-1) polynomials.
template <class R>
Mat<R> rho_n(const GL2ElementT<R> &a, int n) {
  if (n < 2) throw ArgumentError("rho_n: need n >= 2");
  Mat<R> m(n, n);
  const int d = n - 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      R sum = ring_value<R>(Rational(0));
      for (int k = std::max(0, i + j - d); k <= std::min(i, j); ++k) {
        Int c = binom(i, k) * binom(d - i, j - k);
        R term = ring_value<R>(Rational(c));
        for (int t = 0; t < k; ++t) term = term * a.alpha;
        for (int t = 0; t < i - k; ++t) term = term * a.beta;
        for (int t = 0; t < j - k; ++t) term = term * a.gamma;
        for (int t = 0; t < d - i - (j - k); ++t) term = term * a.delta;
        sum = sum + term;
      }
      m(i, j) = ring_value<R>(Rational(binom(d, i), binom(d, j))) * sum;
    }
  }
  return m;
}

inline Mat<Rational> rho_n(const GL2Element &a, int n) {
  if (a.det() == 0) throw SingularElement("rho_n: det(a) = 0");
  return rho_n<Rational>(a, n);
}

/// Symbolic rho_n in the four group parameters; cached per n.
inline const Mat<Expr> &rho_n_symbolic(int n) {
  static std::mutex mu;
  static std::map<int, Mat<Expr>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GL2ElementT<Expr> a{symbol("alpha"), symbol("beta"), symbol("gamma"), symbol("delta")};
  return cache.emplace(n, rho_n<Expr>(a, n)).first->second;
}

/// exp(t E) for a nilpotent generator, exact (the series terminates).
inline Mat<Rational> exp_nilpotent(const Mat<Rational> &e, const Rational &t) {
  std::size_t n = e.rows();
  Mat<Rational> out = Mat<Rational>::identity(n);
  Mat<Rational> p = Mat<Rational>::identity(n);
  Rational tk(1), f(1);
  for (std::size_t k = 1; k <= n; ++k) {
    p = p * e;
    if (p.is_zero()) break;
    tk *= t;
    f *= Rational(k);
    out = out + (tk / f) * p;
  }
  return out;
}

/// The 2x2 directions whose one-parameter subgroups realize the generators.
/// Because the action is on row vectors, the differential of rho_n along
/// exp(t e) is the transpose of the printed column-action generator:
///   d/dt|0 rho_n(exp(t e_plus))  = E+^T      e_plus  = [[0,1],[0,0]]
///   d/dt|0 rho_n(exp(t e_minus)) = E-^T      e_minus = [[0,0],[1,0]]
///   d/dt|0 rho_n(exp(t e_zero))  = E0        e_zero  = diag(1,-1)
///   d/dt|0 rho_n(exp(t e_one))   = E1        e_one   = -Id
inline GL2Element gl2_exp_direction(char which, const Rational &t) {
  switch (which) {
    case '+':
      return {Rational(1), t, Rational(0), Rational(1)};
    case '-':
      return {Rational(1), Rational(0), t, Rational(1)};
    default:
      throw ArgumentError("gl2_exp_direction: '+' or '-'");
  }
}

}  // namespace gl2ode
