#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "gl2ode/gl2rep.hpp"
#include "gl2ode/parse.hpp"
#include "gl2ode/q3.hpp"
#include "gl2ode/zerotest.hpp"

namespace gl2ode {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Expr theta(int i) { return symbol("th" + std::to_string(i)); }
inline SymbolId theta_id(int i) { return sym_id("th" + std::to_string(i)); }

// ---------------------------------------------------------------------------
// Dense totally symmetric tensors, stored once per sorted multi-index.
// ---------------------------------------------------------------------------

template <class K>
class SymTensor {
 public:
  SymTensor(int dim, int rank) : dim_(dim), rank_(rank) {}
  int dim() const { return dim_; }
  int rank() const { return rank_; }

  K get(std::vector<uint8_t> idx) const {
    std::sort(idx.begin(), idx.end());
    auto it = e_.find(idx);
    return it == e_.end() ? K(0) : it->second;
  }
  void set(std::vector<uint8_t> idx, K v) {
    std::sort(idx.begin(), idx.end());
    if (v == K(0))
      e_.erase(idx);
    else
      e_[std::move(idx)] = std::move(v);
  }
  const std::map<std::vector<uint8_t>, K> &entries() const { return e_; }

  /// Full contraction with a vector: sum_{i1..iq} T_{i1..iq} v^{i1}...v^{iq}.
  template <class V>
  V contract(const std::vector<V> &v) const {
    V out(0);
    std::vector<uint8_t> idx(rank_, 0);
    contract_rec(0, 0, idx, v, out);
    return out;
  }

 private:
  template <class V>
  void contract_rec(int pos, int, std::vector<uint8_t> &idx, const std::vector<V> &v,
                    V &out) const {
    if (pos == rank_) {
      K t = get(idx);
      if (t == K(0)) return;
      V term = scalar_to<V>(t);
      for (int p = 0; p < rank_; ++p) term = term * v[idx[p]];
      out = out + term;
      return;
    }
    for (int i = 0; i < dim_; ++i) {
      idx[pos] = static_cast<uint8_t>(i);
      contract_rec(pos + 1, 0, idx, v, out);
    }
  }
  template <class V>
  static V scalar_to(const K &k);

  int dim_, rank_;
  std::map<std::vector<uint8_t>, K> e_;
};

template <>
template <>
inline Rational SymTensor<Rational>::scalar_to<Rational>(const Rational &k) {
  return k;
}
template <>
template <>
inline Q3 SymTensor<Q3>::scalar_to<Q3>(const Q3 &k) {
  return k;
}
template <>
template <>
inline Q3 SymTensor<Rational>::scalar_to<Q3>(const Rational &k) {
  return Q3(k);
}
template <>
template <>
inline Float SymTensor<Q3>::scalar_to<Float>(const Q3 &k) {
  return k.to_float();
}

/// Extracts the symmetric coefficient tensor of a degree-q polynomial in
/// th0..th{dim-1} by repeated formal differentiation: T_M = d_M P / q!.
inline SymTensor<Rational> tensor_from_polynomial(const Expr &poly, int dim, int rank) {
  SymTensor<Rational> t(dim, rank);
  Int qfact(1);
  for (int i = 2; i <= rank; ++i) qfact *= i;
  Assignment zero;
  for (int i = 0; i < dim; ++i) zero[theta_id(i)] = Number(Rational(0));
  std::vector<uint8_t> idx(rank, 0);
  // iterate over nondecreasing multi-indices
  while (true) {
    Expr d = poly;
    for (int p = 0; p < rank; ++p) d = diff(d, theta_id(idx[p]));
    Number val = eval(d, zero);
    if (!val.is_zero()) t.set(idx, Rational(val.rational() / Rational(qfact)));
    int p = rank - 1;
    while (p >= 0 && idx[p] == dim - 1) --p;
    if (p < 0) break;
    uint8_t v = ++idx[p];
    for (int q2 = p + 1; q2 < rank; ++q2) idx[q2] = v;
  }
  return t;
}

/// Re-expands a symmetric tensor into its polynomial sum T_{i..} th^i...
inline Expr polynomial_from_tensor(const SymTensor<Rational> &t) {
  std::vector<Expr> terms;
  for (const auto &[idx, coef] : t.entries()) {
    // multiplicity = rank! / prod(mult_i!)
    Int mult(1);
    for (int i = 2; i <= t.rank(); ++i) mult *= i;
    int run = 1;
    for (std::size_t p = 1; p <= idx.size(); ++p) {
      if (p < idx.size() && idx[p] == idx[p - 1]) {
        ++run;
      } else {
        Int f(1);
        for (int i = 2; i <= run; ++i) f *= i;
        mult /= f;
        run = 1;
      }
    }
    std::vector<Expr> fs{constant(Rational(coef * mult))};
    for (uint8_t i : idx) fs.push_back(theta(static_cast<int>(i)));
    terms.push_back(make_product(std::move(fs)));
  }
  return make_sum(std::move(terms));
}

// ---------------------------------------------------------------------------
// The invariant catalog (coefficients transcribed once; the resultant route
// re-derives pn1..pn3 independently, guarding the transcription).
// ---------------------------------------------------------------------------

enum class InvariantKind { G3, I4, G5, Upsilon5, I5, Upsilon6, G7, Upsilon7, Upsilon8, G9, Upsilon9 };

inline int invariant_dim(InvariantKind k) {
  switch (k) {
    case InvariantKind::G3:
      return 3;
    case InvariantKind::I4:
      return 4;
    case InvariantKind::G5:
    case InvariantKind::Upsilon5:
    case InvariantKind::I5:
      return 5;
    case InvariantKind::Upsilon6:
      return 6;
    case InvariantKind::G7:
    case InvariantKind::Upsilon7:
      return 7;
    case InvariantKind::Upsilon8:
      return 8;
    case InvariantKind::G9:
    case InvariantKind::Upsilon9:
      return 9;
  }
  return 0;
}

inline int invariant_degree(InvariantKind k) {
  switch (k) {
    case InvariantKind::G3:
    case InvariantKind::G5:
    case InvariantKind::G7:
    case InvariantKind::G9:
      return 2;
    case InvariantKind::Upsilon5:
    case InvariantKind::Upsilon9:
      return 3;
    case InvariantKind::I4:
    case InvariantKind::Upsilon6:
    case InvariantKind::Upsilon7:
    case InvariantKind::Upsilon8:
      return 4;
    case InvariantKind::I5:
      return 6;
  }
  return 0;
}

inline Expr invariant_poly(InvariantKind kind) {
  auto P = [](const char *s) { return parse_expr(s); };
  switch (kind) {
    case InvariantKind::G3:
      return P("th1^2 - th0*th2");
    case InvariantKind::I4:
      return P("-3*th1^2*th2^2 + 4*th0*th2^3 + 4*th1^3*th3 - 6*th0*th1*th2*th3 + th0^2*th3^2");
    case InvariantKind::G5:
      return P("th0*th4 - 4*th1*th3 + 3*th2^2");
    case InvariantKind::Upsilon5:
      return P("th2^3 - 2*th1*th2*th3 + th0*th3^2 - th0*th2*th4 + th1^2*th4");
    case InvariantKind::I5:
      return P(
          "-36*th1^2*th2^2*th3^2 + 54*th0*th2^3*th3^2 + 64*th1^3*th3^3"
          " - 108*th0*th1*th2*th3^3 + 27*th0^2*th3^4 + 54*th1^2*th2^3*th4"
          " - 81*th0*th2^4*th4 - 108*th1^3*th2*th3*th4 + 180*th0*th1*th2^2*th3*th4"
          " + 6*th0*th1^2*th3^2*th4 - 54*th0^2*th2*th3^2*th4 + 27*th1^4*th4^2"
          " - 54*th0*th1^2*th2*th4^2 + 18*th0^2*th2^2*th4^2 + 12*th0^2*th1*th3*th4^2"
          " - th0^3*th4^3");
    case InvariantKind::Upsilon6:
      return P(
          "-32*th2^2*th3^2 + 48*th1*th3^3 + 48*th2^3*th4 - 76*th1*th2*th3*th4"
          " - 12*th0*th3^2*th4 + 9*th1^2*th4^2 + 16*th0*th2*th4^2 - 12*th1*th2^2*th5"
          " + 16*th1^2*th3*th5 + 4*th0*th2*th3*th5 - 10*th0*th1*th4*th5 + th0^2*th5^2");
    case InvariantKind::G7:
      return P("-10*th3^2 + 15*th2*th4 - 6*th1*th5 + th0*th6");
    case InvariantKind::Upsilon7:
      return P(
          "160*th3^4 - 480*th2*th3^2*th4 + 1035*th2^2*th4^2 - 1080*th1*th3*th4^2"
          " + 540*th0*th4^3 - 1080*th2^2*th3*th5 + 1920*th1*th3^2*th5"
          " - 180*th1*th2*th4*th5 - 1080*th0*th3*th4*th5 - 288*th1^2*th5^2"
          " + 540*th0*th2*th5^2 + 540*th2^3*th6 - 1080*th1*th2*th3*th6"
          " + 400*th0*th3^2*th6 + 540*th1^2*th4*th6 - 330*th0*th2*th4*th6"
          " - 84*th0*th1*th5*th6 + 7*th0^2*th6^2");
    case InvariantKind::Upsilon8:
      return P(
          "-375*th3^2*th4^2 + 600*th2*th4^3 + 600*th3^3*th5 - 990*th2*th3*th4*th5"
          " - 240*th1*th4^2*th5 + 81*th2^2*th5^2 + 360*th1*th3*th5^2"
          " - 240*th2*th3^2*th6 + 360*th2^2*th4*th6 + 50*th1*th3*th4*th6"
          " + 40*th0*th4^2*th6 - 234*th1*th2*th5*th6 - 60*th0*th3*th5*th6"
          " + 25*th1^2*th6^2 + 24*th0*th2*th6^2 + 40*th1*th3^2*th7"
          " - 60*th1*th2*th4*th7 - 10*th0*th3*th4*th7 + 24*th1^2*th5*th7"
          " + 18*th0*th2*th5*th7 - 14*th0*th1*th6*th7 + th0^2*th7^2");
    case InvariantKind::G9:
      return P("35*th4^2 - 56*th3*th5 + 28*th2*th6 - 8*th1*th7 + th0*th8");
    case InvariantKind::Upsilon9:
      return P(
          "15*th4^3 - 36*th3*th4*th5 + 24*th2*th5^2 + 24*th3^2*th6 - 22*th2*th4*th6"
          " - 8*th1*th5*th6 + 3*th0*th6^2 - 8*th2*th3*th7 + 12*th1*th4*th7"
          " - 4*th0*th5*th7 + 3*th2^2*th8 - 4*th1*th3*th8 + th0*th4*th8");
  }
  throw ArgumentError("unknown invariant kind");
}

inline Expr invariant_poly(InvariantKind kind, const std::vector<Expr> &th) {
  if (static_cast<int>(th.size()) != invariant_dim(kind))
    throw DimensionMismatch("invariant_poly: theta dimension mismatch");
  Substitution s;
  for (std::size_t i = 0; i < th.size(); ++i) s[theta_id(static_cast<int>(i))] = th[i];
  return substitute(invariant_poly(kind), s);
}

/// The closed-form quadratic invariant for odd n = 2m+1:
///   sum_{j<m} (-1)^j C(2m,j) th^j th^{2m-j} + (1/2)(-1)^m C(2m,m) (th^m)^2.
inline Expr general_quadratic_invariant(int n) {
  if (n < 3 || n % 2 == 0) throw ArgumentError("general_quadratic_invariant: odd n >= 3");
  int m = (n - 1) / 2;
  std::vector<Expr> terms;
  for (int j = 0; j < m; ++j) {
    Rational c = Rational(binom(2 * m, j)) * (j % 2 == 0 ? 1 : -1);
    terms.push_back(constant(c) * theta(j) * theta(2 * m - j));
  }
  Rational cm = Rational(binom(2 * m, m), 2) * (m % 2 == 0 ? 1 : -1);
  terms.push_back(constant(cm) * theta(m) * theta(m));
  return make_sum(std::move(terms));
}

// ---------------------------------------------------------------------------
// Sylvester resultants (exact determinant via subset dynamic programming).
// ---------------------------------------------------------------------------

/// Determinant of a matrix of expressions, by column-subset DP.
inline Expr det_expr(const std::vector<std::vector<Expr>> &m) {
  std::size_t n = m.size();
  if (n == 0) return constant(1);
  if (n > 20) throw ArgumentError("det_expr: matrix too large");
  std::vector<Expr> dp(std::size_t(1) << n);
  dp[0] = constant(1);
  for (std::size_t mask = 1; mask < dp.size(); ++mask) {
    int row = __builtin_popcountll(mask) - 1;
    std::vector<Expr> terms;
    int pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (std::size_t(1) << j))) continue;
      if (!is_zero_expr(m[row][j])) {
        Expr sub = dp[mask ^ (std::size_t(1) << j)];
        Expr term = m[row][j] * sub;
        terms.push_back(pos % 2 == 0 ? term : -term);
      }
      ++pos;
    }
    dp[mask] = make_sum(std::move(terms));
  }
  return dp.back();
}

/// Resultant of two polynomials given by coefficient lists (constant term
/// first).  Vanishes iff p and q share a root.
inline Expr sylvester_resultant(std::vector<Expr> p, std::vector<Expr> q) {
  auto degree_of = [](std::vector<Expr> &c) {
    while (!c.empty() && is_zero_expr(c.back())) c.pop_back();
    if (c.empty()) throw ArgumentError("sylvester_resultant: zero polynomial");
    return static_cast<int>(c.size()) - 1;
  };
  int dp = degree_of(p), dq = degree_of(q);
  int n = dp + dq;
  if (n == 0) return constant(1);
  std::vector<std::vector<Expr>> m(n, std::vector<Expr>(n, constant(0)));
  // dq rows of p's coefficients (highest first), then dp rows of q's
  for (int r = 0; r < dq; ++r)
    for (int k = 0; k <= dp; ++k) m[r][r + k] = p[dp - k];
  for (int r = 0; r < dp; ++r)
    for (int k = 0; k <= dq; ++k) m[dq + r][r + k] = q[dq - k];
  return det_expr(m);
}

/// The polynomial pair of the rational normal curve construction:
/// w(x) = sum C(n-1,i) th^i x^i and its x-derivative.
inline std::pair<std::vector<Expr>, std::vector<Expr>> uwn_pair(int n) {
  std::vector<Expr> w, dw;
  for (int i = 0; i < n; ++i) w.push_back(constant(Rational(binom(n - 1, i))) * theta(i));
  for (int i = 1; i < n; ++i) dw.push_back(constant(Rational(i)) * w[i]);
  return {w, dw};
}

/// The degree-2(n-2) hypersurface polynomial of the rational normal curve:
/// the resultant of (w, w') with its leading-coefficient factor th^{n-1}
/// removed (R_n = I_n * th^{n-1} up to a rational constant).
inline Expr normal_curve_invariant(int n) {
  auto [w, dw] = uwn_pair(n);
  Expr res = expand(sylvester_resultant(w, dw));
  Expr inv_lead = make_power(theta(n - 1), Rational(-1));
  std::vector<Expr> out;
  for (const Expr &t : detail::term_list(res)) out.push_back(t * inv_lead);
  Expr q = make_sum(std::move(out));
  // every monomial of the resultant carries th^{n-1}; if not, division failed
  std::vector<Expr> nz, pos;
  collect_guards(q, nz, pos);
  if (!nz.empty() || !pos.empty())
    throw ArgumentError("normal_curve_invariant: leading factor did not divide out");
  return q;
}

// ---------------------------------------------------------------------------
// Equivariance under the rho_n action
// ---------------------------------------------------------------------------

struct EquivarianceResult {
  bool consistent = false;
  bool weight_found = false;
  Rational weight;       // k with I(th . rho(a)) = det(a)^k I(th)
  Rational conf_weight;  // k normalized by (n-1)/2: the paper's conformal
                         // weight convention, equal to the invariant's degree
};

inline EquivarianceResult check_equivariance(InvariantKind kind, const GL2Element &a,
                                             unsigned trials = 10, uint64_t seed = 991) {
  if (a.det() == 0) throw SingularElement("check_equivariance: det(a) = 0");
  int n = invariant_dim(kind);
  Expr inv = invariant_poly(kind);
  Mat<Rational> rho = rho_n(a, n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-20, 20);

  EquivarianceResult out;
  bool have_ratio = false;
  Rational ratio;
  unsigned used = 0;
  for (unsigned t = 0; t < 8 * trials && used < trials; ++t) {
    std::vector<Rational> th(n), thp(n, Rational(0));
    for (int i = 0; i < n; ++i) th[i] = Rational(dist(rng));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) thp[j] += th[i] * rho(i, j);
    Assignment base, moved;
    for (int i = 0; i < n; ++i) {
      base[theta_id(i)] = Number(th[i]);
      moved[theta_id(i)] = Number(thp[i]);
    }
    Rational i0 = eval(inv, base).rational();
    if (i0 == 0) continue;
    Rational i1 = eval(inv, moved).rational();
    Rational r = i1 / i0;
    if (!have_ratio) {
      ratio = r;
      have_ratio = true;
    } else if (r != ratio) {
      return out;  // not equivariant at all
    }
    ++used;
  }
  if (!have_ratio) return out;  // Inconclusive-style: all samples vanished
  out.consistent = true;
  // detect integer or half-integer k with det^k == ratio
  Rational d = a.det();
  for (int twok = -48; twok <= 48; ++twok) {
    if (twok % 2 == 0) {
      Rational k2(twok / 2);
      Rational p = pow_int(d, Int(twok / 2));
      if (p == ratio) {
        out.weight_found = true;
        out.weight = Rational(twok, 2);
        return out;
      }
    } else {
      // half-integer: det^([twok]/2); only if det is a perfect square
      auto rt = exact_root(d, 2);
      if (rt) {
        Rational p = pow_int(*rt, Int(twok));
        if (p == ratio) {
          out.weight_found = true;
          out.weight = Rational(twok, 2);
          return out;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// The structural pair (g, Upsilon) in dimension 5 and the Cartan identities
// ---------------------------------------------------------------------------

/// g_ij of the bilinear form th0 th4 - 4 th1 th3 + 3 th2^2.
inline Mat<Rational> metric5() {
  Mat<Rational> g(5, 5);
  g(0, 4) = g(4, 0) = Rational(1, 2);
  g(1, 3) = g(3, 1) = Rational(-2);
  g(2, 2) = Rational(3);
  return g;
}

/// Upsilon_ijk of 3*sqrt(3)*(th0 th2 th4 + 2 th1 th2 th3 - th2^3
///   - th0 th3^2 - th4 th1^2); the prefactor makes identities (i)-(iii) close.
inline SymTensor<Q3> upsilon5() {
  SymTensor<Q3> u(5, 3);
  Q3 s = Q3(Rational(3)) * Q3::sqrt3();  // 3 sqrt(3)
  auto set = [&](int i, int j, int k, Rational c) {
    u.set({static_cast<uint8_t>(i), static_cast<uint8_t>(j), static_cast<uint8_t>(k)},
          s * Q3(c));
  };
  set(0, 2, 4, Rational(1, 6));
  set(1, 2, 3, Rational(1, 3));
  set(2, 2, 2, Rational(-1));
  set(0, 3, 3, Rational(-1, 3));
  set(1, 1, 4, Rational(-1, 3));
  return u;
}

struct CartanIdentityReport {
  bool symmetric = true;     // (i)  by construction of SymTensor
  bool traceless = false;    // (ii) g^{ej} Y_ejk = 0
  bool identity_iii = false; // (iii)
  Float max_residual;        // over all checked entries, exact -> 0
};

template <class K>
Mat<K> to_matrix(const SymTensor<K> &t2) {
  Mat<K> m(t2.dim(), t2.dim());
  for (int i = 0; i < t2.dim(); ++i)
    for (int j = 0; j < t2.dim(); ++j)
      m(i, j) = t2.get({static_cast<uint8_t>(i), static_cast<uint8_t>(j)});
  return m;
}

/// Checks (i) symmetry, (ii) tracelessness, (iii) the quadratic identity
///   g^{lm}(Y_ijl Y_kmp + Y_kil Y_jmp + Y_jkl Y_imp)
///     = g_ij g_kp + g_ki g_jp + g_jk g_ip
/// in exact arithmetic over Q(sqrt 3).
inline CartanIdentityReport cartan_identity_check(const Mat<Q3> &g, const SymTensor<Q3> &ups) {
  if (ups.dim() != 5 || g.rows() != 5) throw DimensionMismatch("cartan_identity_check: dim 5");
  Mat<Q3> ginv;
  try {
    ginv = inverse(g);
  } catch (const std::runtime_error &) {
    throw SingularMetric("cartan_identity_check: singular metric");
  }
  CartanIdentityReport rep;
  rep.max_residual = 0;
  auto U = [&](int i, int j, int k) {
    return ups.get({static_cast<uint8_t>(i), static_cast<uint8_t>(j), static_cast<uint8_t>(k)});
  };
  // (ii)
  rep.traceless = true;
  for (int k = 0; k < 5; ++k) {
    Q3 tr;
    for (int e = 0; e < 5; ++e)
      for (int j = 0; j < 5; ++j) tr += ginv(e, j) * U(e, j, k);
    if (!tr.is_zero()) {
      rep.traceless = false;
      rep.max_residual = std::max(rep.max_residual, ScalarOps<Q3>::magnitude(tr));
    }
  }
  // (iii)
  rep.identity_iii = true;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j)
      for (int k = j; k < 5; ++k)
        for (int p = 0; p < 5; ++p) {
          Q3 lhs;
          for (int l = 0; l < 5; ++l)
            for (int m2 = 0; m2 < 5; ++m2)
              lhs += ginv(l, m2) *
                     (U(i, j, l) * U(k, m2, p) + U(k, i, l) * U(j, m2, p) +
                      U(j, k, l) * U(i, m2, p));
          Q3 rhs = Q3(g(i, j)) * Q3(g(k, p)) + Q3(g(k, i)) * Q3(g(j, p)) +
                   Q3(g(j, k)) * Q3(g(i, p));
          Q3 resid = lhs - rhs;
          if (!resid.is_zero()) {
            rep.identity_iii = false;
            rep.max_residual = std::max(rep.max_residual, ScalarOps<Q3>::magnitude(resid));
          }
        }
  return rep;
}

inline Mat<Q3> metric5_q3() {
  Mat<Q3> g(5, 5);
  Mat<Rational> m = metric5();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g(i, j) = Q3(m(i, j));
  return g;
}

// ---------------------------------------------------------------------------
// Stabilizer algebra of a symmetric 3-tensor (the infinitesimal isotropy
// condition G^l_i Y_ljk + G^l_j Y_ilk + G^l_k Y_ijl = (3/5) tr(G) Y_ijk).
// ---------------------------------------------------------------------------

inline std::vector<Mat<Rational>> stabilizer_algebra(const SymTensor<Q3> &ups) {
  const int n = ups.dim();
  auto U = [&](int i, int j, int k) {
    return ups.get({static_cast<uint8_t>(i), static_cast<uint8_t>(j), static_cast<uint8_t>(k)});
  };
  // unknowns: G^l_m flattened as l*n + m; one equation per (i<=j<=k), split
  // into rational and sqrt3 components
  std::vector<std::vector<Rational>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        std::vector<Q3> row(n * n, Q3());
        for (int l = 0; l < n; ++l) {
          row[l * n + i] += U(l, j, k);
          row[l * n + j] += U(i, l, k);
          row[l * n + k] += U(i, j, l);
          row[l * n + l] -= Q3(Rational(3, 5)) * U(i, j, k);
        }
        std::vector<Rational> ra(n * n), rb(n * n);
        bool any_a = false, any_b = false;
        for (int c = 0; c < n * n; ++c) {
          ra[c] = row[c].a;
          rb[c] = row[c].b;
          any_a = any_a || ra[c] != 0;
          any_b = any_b || rb[c] != 0;
        }
        if (any_a) rows.push_back(std::move(ra));
        if (any_b) rows.push_back(std::move(rb));
      }
  Mat<Rational> sys(rows.size(), n * n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < n * n; ++c) sys(r, c) = rows[r][c];
  std::vector<Mat<Rational>> basis;
  for (const auto &v : nullspace(sys)) {
    Mat<Rational> g(n, n);
    for (int l = 0; l < n; ++l)
      for (int m2 = 0; m2 < n; ++m2) g(l, m2) = v[l * n + m2];
    basis.push_back(std::move(g));
  }
  return basis;
}

/// Rank of the row space spanned by flattened matrices; used for exact
/// span-equality tests.
inline std::size_t span_rank(const std::vector<Mat<Rational>> &ms) {
  if (ms.empty()) return 0;
  std::size_t n = ms[0].rows() * ms[0].cols();
  Mat<Rational> sys(ms.size(), n);
  for (std::size_t r = 0; r < ms.size(); ++r)
    for (std::size_t i = 0; i < ms[r].rows(); ++i)
      for (std::size_t j = 0; j < ms[r].cols(); ++j)
        sys(r, i * ms[r].cols() + j) = ms[r](i, j);
  return rank(sys);
}

}  // namespace gl2ode
