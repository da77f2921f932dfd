#pragma once

#include <algorithm>
#include <bitset>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gl2ode/number.hpp"

namespace gl2ode {

// ---------------------------------------------------------------------------
// Symbols are interned; a node's free-symbol set is a fixed-width bitset.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxSymbols = 192;
using SymbolSet = std::bitset<kMaxSymbols>;
using SymbolId = unsigned;

class SymbolTable {
 public:
  static SymbolTable &instance() {
    static SymbolTable t;
    return t;
  }
  SymbolId id(const std::string &name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    if (names_.size() >= kMaxSymbols) throw std::runtime_error("symbol table full");
    SymbolId id = static_cast<SymbolId>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
  }
  const std::string &name(SymbolId id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return names_.at(id);
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> ids_;
};

inline SymbolId sym_id(const std::string &name) { return SymbolTable::instance().id(name); }
inline const std::string &sym_name(SymbolId id) { return SymbolTable::instance().name(id); }

// ---------------------------------------------------------------------------
// Expr: immutable canonical expression trees over exact rationals.
// Node kinds: Constant, Symbol, Sum, Product, Power(base, rational exponent).
// ---------------------------------------------------------------------------

enum class ExprKind : uint8_t { Constant, Symbol, Sum, Product, Power };

struct ExprNode;
class Expr {
 public:
  Expr();  // zero
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  const ExprNode &node() const { return *node_; }
  const ExprNode *ptr() const { return node_.get(); }

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind;
  Rational value;            // Constant
  SymbolId symbol = 0;       // Symbol
  std::vector<Expr> child;   // Sum/Product children; Power: child[0] = base
  Rational exponent;         // Power
  std::size_t hash = 0;
  SymbolSet free;            // free symbols of the subtree
  bool rational_fn = true;   // true iff every Power exponent in the subtree is integral
};

namespace detail {

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline std::size_t hash_rational(const Rational &q) {
  std::size_t h = 1469598103934665603ULL;
  // cheap and stable: hash the decimal string of the canonical form
  for (char c : q.str()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

}  // namespace detail

inline bool struct_equal(const Expr &a, const Expr &b);

/// Total order on canonical expressions: (kind, payload, children).
inline int expr_cmp(const Expr &a, const Expr &b) {
  if (a.ptr() == b.ptr()) return 0;
  const ExprNode &x = a.node(), &y = b.node();
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case ExprKind::Constant:
      if (x.value == y.value) return 0;
      return x.value < y.value ? -1 : 1;
    case ExprKind::Symbol: {
      const std::string &nx = sym_name(x.symbol), &ny = sym_name(y.symbol);
      if (nx == ny) return 0;
      return nx < ny ? -1 : 1;
    }
    case ExprKind::Power: {
      int c = expr_cmp(x.child[0], y.child[0]);
      if (c != 0) return c;
      if (x.exponent == y.exponent) return 0;
      return x.exponent < y.exponent ? -1 : 1;
    }
    case ExprKind::Sum:
    case ExprKind::Product: {
      std::size_t n = std::min(x.child.size(), y.child.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = expr_cmp(x.child[i], y.child[i]);
        if (c != 0) return c;
      }
      if (x.child.size() == y.child.size()) return 0;
      return x.child.size() < y.child.size() ? -1 : 1;
    }
  }
  return 0;
}

inline bool struct_equal(const Expr &a, const Expr &b) {
  if (a.ptr() == b.ptr()) return true;
  if (a.node().hash != b.node().hash) return false;
  return expr_cmp(a, b) == 0;
}

struct ExprPtrEq {
  bool operator()(const Expr &a, const Expr &b) const { return struct_equal(a, b); }
};
struct ExprPtrHash {
  std::size_t operator()(const Expr &e) const { return e.node().hash; }
};

namespace detail {

inline Expr finish(ExprNode n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x2545F4914F6CDD1DULL;
  switch (n.kind) {
    case ExprKind::Constant:
      h = hash_combine(h, hash_rational(n.value));
      n.rational_fn = true;
      break;
    case ExprKind::Symbol:
      h = hash_combine(h, std::hash<std::string>{}(sym_name(n.symbol)));
      n.free.set(n.symbol);
      n.rational_fn = true;
      break;
    case ExprKind::Power:
      h = hash_combine(h, n.child[0].node().hash);
      h = hash_combine(h, hash_rational(n.exponent));
      n.free = n.child[0].node().free;
      n.rational_fn = n.child[0].node().rational_fn && is_integer(n.exponent);
      break;
    case ExprKind::Sum:
    case ExprKind::Product:
      n.rational_fn = true;
      for (const Expr &c : n.child) {
        h = hash_combine(h, c.node().hash);
        n.free |= c.node().free;
        n.rational_fn = n.rational_fn && c.node().rational_fn;
      }
      break;
  }
  n.hash = h;
  return Expr(std::make_shared<const ExprNode>(std::move(n)));
}

}  // namespace detail

inline Expr constant(Rational q) {
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.value = std::move(q);
  return detail::finish(std::move(n));
}
inline Expr constant(long v) { return constant(Rational(v)); }
inline Expr constant(long num, long den) { return constant(Rational(num, den)); }

inline Expr::Expr() { *this = constant(0); }

inline Expr symbol(const std::string &name) {
  ExprNode n;
  n.kind = ExprKind::Symbol;
  n.symbol = sym_id(name);
  return detail::finish(std::move(n));
}
inline Expr symbol(SymbolId id) {
  ExprNode n;
  n.kind = ExprKind::Symbol;
  n.symbol = id;
  return detail::finish(std::move(n));
}

inline bool is_constant(const Expr &e) { return e.node().kind == ExprKind::Constant; }
inline bool is_constant(const Expr &e, const Rational &v) {
  return is_constant(e) && e.node().value == v;
}
inline bool is_zero_expr(const Expr &e) { return is_constant(e, Rational(0)); }
inline bool is_one_expr(const Expr &e) { return is_constant(e, Rational(1)); }
inline bool depends_on(const Expr &e, SymbolId v) { return e.node().free.test(v); }

Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);
Expr make_power(Expr base, Rational exp);

namespace detail {

// Splits a canonical term into (rational coefficient, non-constant core).
inline std::pair<Rational, Expr> split_coeff(const Expr &e) {
  const ExprNode &n = e.node();
  if (n.kind == ExprKind::Constant) return {n.value, constant(1)};
  if (n.kind == ExprKind::Product && is_constant(n.child[0])) {
    Rational c = n.child[0].node().value;
    if (n.child.size() == 2) return {c, n.child[1]};
    std::vector<Expr> rest(n.child.begin() + 1, n.child.end());
    ExprNode m;
    m.kind = ExprKind::Product;
    m.child = std::move(rest);
    return {c, finish(std::move(m))};  // children already canonical and sorted
  }
  return {Rational(1), e};
}

}  // namespace detail

inline Expr make_sum(std::vector<Expr> terms) {
  // flatten nested sums, fold constants, collect like terms
  Rational const_part(0);
  std::vector<Expr> cores;  // insertion order of first appearance
  std::unordered_map<Expr, Rational, ExprPtrHash, ExprPtrEq> coeff;
  std::vector<Expr> stack(terms.rbegin(), terms.rend());
  while (!stack.empty()) {
    Expr t = stack.back();
    stack.pop_back();
    const ExprNode &n = t.node();
    if (n.kind == ExprKind::Sum) {
      for (auto it = n.child.rbegin(); it != n.child.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (n.kind == ExprKind::Constant) {
      const_part += n.value;
      continue;
    }
    auto [c, core] = detail::split_coeff(t);
    auto it = coeff.find(core);
    if (it == coeff.end()) {
      coeff.emplace(core, c);
      cores.push_back(core);
    } else {
      it->second += c;
    }
  }
  std::vector<Expr> out;
  for (const Expr &core : cores) {
    const Rational &c = coeff.at(core);
    if (c == 0) continue;
    if (c == 1)
      out.push_back(core);
    else
      out.push_back(make_product({constant(c), core}));
  }
  std::sort(out.begin(), out.end(), [](const Expr &a, const Expr &b) { return expr_cmp(a, b) < 0; });
  if (const_part != 0) out.insert(out.begin(), constant(const_part));
  if (out.empty()) return constant(0);
  if (out.size() == 1) return out[0];
  ExprNode n;
  n.kind = ExprKind::Sum;
  n.child = std::move(out);
  return detail::finish(std::move(n));
}

inline Expr make_product(std::vector<Expr> factors) {
  Rational const_part(1);
  std::vector<Expr> bases;
  std::unordered_map<Expr, Rational, ExprPtrHash, ExprPtrEq> expo;
  std::vector<Expr> stack(factors.rbegin(), factors.rend());
  bool saw_zero = false;
  while (!stack.empty()) {
    Expr f = stack.back();
    stack.pop_back();
    const ExprNode &n = f.node();
    if (n.kind == ExprKind::Product) {
      for (auto it = n.child.rbegin(); it != n.child.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (n.kind == ExprKind::Constant) {
      if (n.value == 0) saw_zero = true;
      const_part *= n.value;
      continue;
    }
    Expr base = f;
    Rational e(1);
    if (n.kind == ExprKind::Power) {
      base = n.child[0];
      e = n.exponent;
    }
    auto it = expo.find(base);
    if (it == expo.end()) {
      expo.emplace(base, e);
      bases.push_back(base);
    } else {
      it->second += e;
    }
  }
  if (saw_zero) return constant(0);
  std::vector<Expr> out;
  for (const Expr &b : bases) {
    const Rational &e = expo.at(b);
    if (e == 0) continue;
    Expr p = make_power(b, e);
    if (is_constant(p)) {
      const_part *= p.node().value;
      continue;
    }
    // exponent merging may re-create a constant-carrying product (rare)
    if (p.node().kind == ExprKind::Product) {
      auto [c, core] = detail::split_coeff(p);
      const_part *= c;
      p = core;
    }
    out.push_back(p);
  }
  if (const_part == 0) return constant(0);
  std::sort(out.begin(), out.end(), [](const Expr &a, const Expr &b) { return expr_cmp(a, b) < 0; });
  if (out.empty()) return constant(const_part);
  if (out.size() == 1 && const_part == 1) return out[0];
  ExprNode n;
  n.kind = ExprKind::Product;
  if (const_part != 1) n.child.push_back(constant(const_part));
  for (Expr &e : out) n.child.push_back(std::move(e));
  if (n.child.size() == 1) return n.child[0];
  return detail::finish(std::move(n));
}

inline Expr make_power(Expr base, Rational exp) {
  if (exp == 0) return constant(1);
  if (exp == 1) return base;
  const ExprNode &n = base.node();
  if (n.kind == ExprKind::Constant) {
    if (n.value == 0 && exp < 0) throw DivisionByZero("0 raised to a negative power");
    auto r = pow_exact(n.value, exp);
    if (r) return constant(*r);
    // irrational surd such as 3^(1/2): keep symbolic, but normalize the
    // exponent into (0,1) by peeling off the integer part
    Int ip = numerator(exp) / denominator(exp);  // truncation toward zero
    if (exp < 0 && !is_integer(exp)) ip -= 1;    // floor for negatives
    Rational frac = exp - Rational(ip);
    if (ip != 0 && n.value > 0) {
      Expr whole = constant(pow_int(n.value, ip));
      ExprNode p;
      p.kind = ExprKind::Power;
      p.child = {base};
      p.exponent = frac;
      return make_product({whole, detail::finish(std::move(p))});
    }
    ExprNode p;
    p.kind = ExprKind::Power;
    p.child = {std::move(base)};
    p.exponent = std::move(exp);
    return detail::finish(std::move(p));
  }
  if (n.kind == ExprKind::Power) {
    return make_power(n.child[0], n.exponent * exp);
  }
  if (n.kind == ExprKind::Product) {
    // Fractional powers distribute over products.  Expressions are only ever
    // evaluated where fractional-power bases are positive, so this is sound
    // on the evaluation domain.
    std::vector<Expr> out;
    out.reserve(n.child.size());
    for (const Expr &f : n.child) out.push_back(make_power(f, exp));
    return make_product(std::move(out));
  }
  ExprNode p;
  p.kind = ExprKind::Power;
  p.child = {std::move(base)};
  p.exponent = std::move(exp);
  return detail::finish(std::move(p));
}

inline Expr operator+(const Expr &a, const Expr &b) { return make_sum({a, b}); }
inline Expr operator-(const Expr &a, const Expr &b) {
  return make_sum({a, make_product({constant(-1), b})});
}
inline Expr operator-(const Expr &a) { return make_product({constant(-1), a}); }
inline Expr operator*(const Expr &a, const Expr &b) { return make_product({a, b}); }
inline Expr operator/(const Expr &a, const Expr &b) {
  return make_product({a, make_power(b, Rational(-1))});
}
inline Expr pow(const Expr &a, Rational e) { return make_power(a, std::move(e)); }
inline Expr pow(const Expr &a, long num, long den = 1) {
  return make_power(a, Rational(num, den));
}
inline Expr &operator+=(Expr &a, const Expr &b) { return a = a + b; }
inline Expr &operator-=(Expr &a, const Expr &b) { return a = a - b; }
inline Expr &operator*=(Expr &a, const Expr &b) { return a = a * b; }

/// Rebuilds an expression through the canonicalizing factories.
inline Expr canonicalize(const Expr &e) {
  const ExprNode &n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
    case ExprKind::Symbol:
      return e;
    case ExprKind::Power:
      return make_power(canonicalize(n.child[0]), n.exponent);
    case ExprKind::Sum: {
      std::vector<Expr> c;
      c.reserve(n.child.size());
      for (const Expr &x : n.child) c.push_back(canonicalize(x));
      return make_sum(std::move(c));
    }
    case ExprKind::Product: {
      std::vector<Expr> c;
      c.reserve(n.child.size());
      for (const Expr &x : n.child) c.push_back(canonicalize(x));
      return make_product(std::move(c));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

/// Chain-rule table for symbols that abbreviate functions of other symbols
/// (auxiliary radicals, ansatz functions): rules[s][v] = ds/dv.
using DerivRules = std::map<SymbolId, std::map<SymbolId, Expr>>;

namespace detail {

struct DiffCtx {
  SymbolId var;
  const DerivRules *rules;
  SymbolSet sensitive;  // symbols whose derivative along var is nonzero
  std::unordered_map<const ExprNode *, Expr> memo;
};

inline Expr diff_impl(const Expr &e, DiffCtx &ctx) {
  const ExprNode &n = e.node();
  if ((n.free & ctx.sensitive).none()) return constant(0);
  auto it = ctx.memo.find(e.ptr());
  if (it != ctx.memo.end()) return it->second;
  Expr out;
  switch (n.kind) {
    case ExprKind::Constant:
      out = constant(0);
      break;
    case ExprKind::Symbol: {
      if (n.symbol == ctx.var) {
        out = constant(1);
      } else if (ctx.rules) {
        auto rs = ctx.rules->find(n.symbol);
        if (rs != ctx.rules->end()) {
          auto rv = rs->second.find(ctx.var);
          out = rv != rs->second.end() ? rv->second : constant(0);
        } else {
          out = constant(0);
        }
      } else {
        out = constant(0);
      }
      break;
    }
    case ExprKind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(n.child.size());
      for (const Expr &c : n.child) terms.push_back(diff_impl(c, ctx));
      out = make_sum(std::move(terms));
      break;
    }
    case ExprKind::Product: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < n.child.size(); ++i) {
        Expr di = diff_impl(n.child[i], ctx);
        if (is_zero_expr(di)) continue;
        std::vector<Expr> fs;
        fs.reserve(n.child.size());
        for (std::size_t j = 0; j < n.child.size(); ++j) fs.push_back(i == j ? di : n.child[j]);
        terms.push_back(make_product(std::move(fs)));
      }
      out = make_sum(std::move(terms));
      break;
    }
    case ExprKind::Power: {
      Expr db = diff_impl(n.child[0], ctx);
      out = make_product(
          {constant(n.exponent), make_power(n.child[0], n.exponent - 1), std::move(db)});
      break;
    }
  }
  ctx.memo.emplace(e.ptr(), out);
  return out;
}

}  // namespace detail

inline Expr diff(const Expr &e, SymbolId var, const DerivRules *rules = nullptr) {
  detail::DiffCtx ctx;
  ctx.var = var;
  ctx.rules = rules;
  ctx.sensitive.set(var);
  if (rules) {
    // a symbol is sensitive if its rule for var (or for another sensitive
    // symbol, transitively) is nonzero
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &[s, table] : *rules) {
        if (ctx.sensitive.test(s)) continue;
        for (const auto &[v, d] : table) {
          if (!ctx.sensitive.test(v) || is_zero_expr(d)) continue;
          ctx.sensitive.set(s);
          changed = true;
          break;
        }
      }
    }
  }
  return detail::diff_impl(e, ctx);
}

inline Expr diff(const Expr &e, const std::string &var, const DerivRules *rules = nullptr) {
  return diff(e, sym_id(var), rules);
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

using Substitution = std::map<SymbolId, Expr>;

namespace detail {
inline Expr subst_impl(const Expr &e, const Substitution &s, SymbolSet targets,
                       std::unordered_map<const ExprNode *, Expr> &memo) {
  const ExprNode &n = e.node();
  if ((n.free & targets).none()) return e;
  auto it = memo.find(e.ptr());
  if (it != memo.end()) return it->second;
  Expr out;
  switch (n.kind) {
    case ExprKind::Constant:
      out = e;
      break;
    case ExprKind::Symbol: {
      auto f = s.find(n.symbol);
      out = f == s.end() ? e : f->second;
      break;
    }
    case ExprKind::Sum: {
      std::vector<Expr> c;
      c.reserve(n.child.size());
      for (const Expr &x : n.child) c.push_back(subst_impl(x, s, targets, memo));
      out = make_sum(std::move(c));
      break;
    }
    case ExprKind::Product: {
      std::vector<Expr> c;
      c.reserve(n.child.size());
      for (const Expr &x : n.child) c.push_back(subst_impl(x, s, targets, memo));
      out = make_product(std::move(c));
      break;
    }
    case ExprKind::Power:
      out = make_power(subst_impl(n.child[0], s, targets, memo), n.exponent);
      break;
  }
  memo.emplace(e.ptr(), out);
  return out;
}
}  // namespace detail

inline Expr substitute(const Expr &e, const Substitution &s) {
  SymbolSet targets;
  for (const auto &[k, v] : s) targets.set(k);
  std::unordered_map<const ExprNode *, Expr> memo;
  return detail::subst_impl(e, s, targets, memo);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

using Assignment = std::map<SymbolId, Number>;

namespace detail {
inline Number eval_impl(const Expr &e, const Assignment &a,
                        std::unordered_map<const ExprNode *, Number> &memo) {
  const ExprNode &n = e.node();
  auto it = memo.find(e.ptr());
  if (it != memo.end()) return it->second;
  Number out;
  switch (n.kind) {
    case ExprKind::Constant:
      out = Number(n.value);
      break;
    case ExprKind::Symbol: {
      auto f = a.find(n.symbol);
      if (f == a.end()) throw EvalError("unassigned symbol " + sym_name(n.symbol));
      out = f->second;
      break;
    }
    case ExprKind::Sum: {
      out = Number(Rational(0));
      for (const Expr &c : n.child) out = out + eval_impl(c, a, memo);
      break;
    }
    case ExprKind::Product: {
      out = Number(Rational(1));
      for (const Expr &c : n.child) out = out * eval_impl(c, a, memo);
      break;
    }
    case ExprKind::Power:
      out = eval_impl(n.child[0], a, memo).pow(n.exponent);
      break;
  }
  memo.emplace(e.ptr(), out);
  return out;
}

// Magnitude of the largest term encountered: sums add magnitudes instead of
// cancelling.  Used as the scale reference in numeric zero-testing.
inline Float scale_impl(const Expr &e, const Assignment &a,
                        std::unordered_map<const ExprNode *, Float> &memo) {
  const ExprNode &n = e.node();
  auto it = memo.find(e.ptr());
  if (it != memo.end()) return it->second;
  Float out;
  switch (n.kind) {
    case ExprKind::Constant:
      out = boost::multiprecision::abs(to_float(n.value));
      break;
    case ExprKind::Symbol: {
      auto f = a.find(n.symbol);
      if (f == a.end()) throw EvalError("unassigned symbol " + sym_name(n.symbol));
      out = boost::multiprecision::abs(f->second.as_float());
      break;
    }
    case ExprKind::Sum: {
      out = 0;
      for (const Expr &c : n.child) out += scale_impl(c, a, memo);
      break;
    }
    case ExprKind::Product: {
      out = 1;
      for (const Expr &c : n.child) out *= scale_impl(c, a, memo);
      break;
    }
    case ExprKind::Power: {
      Float b = scale_impl(n.child[0], a, memo);
      if (b == 0 && n.exponent < 0) throw DivisionByZero("scale: zero base");
      out = pow_float(b, n.exponent);
      break;
    }
  }
  memo.emplace(e.ptr(), out);
  return out;
}
}  // namespace detail

/// An evaluation cache for many expressions sharing subtrees at one point.
class EvalContext {
 public:
  explicit EvalContext(Assignment a) : assign_(std::move(a)) {}
  Number operator()(const Expr &e) { return detail::eval_impl(e, assign_, memo_); }
  Float scale(const Expr &e) { return detail::scale_impl(e, assign_, scale_memo_); }
  const Assignment &assignment() const { return assign_; }

 private:
  Assignment assign_;
  std::unordered_map<const ExprNode *, Number> memo_;
  std::unordered_map<const ExprNode *, Float> scale_memo_;
};

inline Number eval(const Expr &e, const Assignment &a, unsigned digits = 0) {
  PrecisionGuard guard(digits == 0 ? working_digits() : digits);
  std::unordered_map<const ExprNode *, Number> memo;
  return detail::eval_impl(e, a, memo);
}

// ---------------------------------------------------------------------------
// Printing (parseable by exprparse)
// ---------------------------------------------------------------------------

namespace detail {

void print_impl(std::ostream &os, const Expr &e, int parent_prec);

inline void print_rational(std::ostream &os, const Rational &q, bool need_parens_if_frac) {
  if (is_integer(q)) {
    os << q;
  } else if (need_parens_if_frac) {
    os << '(' << numerator(q) << '/' << denominator(q) << ')';
  } else {
    os << numerator(q) << '/' << denominator(q);
  }
}

// precedence levels: 0 sum, 1 product, 2 unary minus, 3 power, 4 atom
inline void print_impl(std::ostream &os, const Expr &e, int parent_prec) {
  const ExprNode &n = e.node();
  switch (n.kind) {
    case ExprKind::Constant: {
      bool neg = n.value < 0;
      bool frac = !is_integer(n.value);
      int prec = neg ? 2 : (frac ? 1 : 4);
      if (prec < parent_prec) os << '(';
      print_rational(os, n.value, false);
      if (prec < parent_prec) os << ')';
      break;
    }
    case ExprKind::Symbol:
      os << sym_name(n.symbol);
      break;
    case ExprKind::Sum: {
      if (parent_prec > 0) os << '(';
      bool first = true;
      for (const Expr &c : n.child) {
        auto [coef, core] = split_coeff(c);
        if (!first) os << (coef < 0 ? " - " : " + ");
        if (first && coef < 0) os << '-';
        first = false;
        Rational a = boost::multiprecision::abs(coef);
        if (is_one_expr(core)) {
          print_rational(os, a, false);
        } else if (a == 1) {
          print_impl(os, core, 1);
        } else {
          print_rational(os, a, true);
          os << '*';
          print_impl(os, core, 2);
        }
      }
      if (parent_prec > 0) os << ')';
      break;
    }
    case ExprKind::Product: {
      if (parent_prec > 1) os << '(';
      std::vector<Expr> num, den;
      Rational coef(1);
      for (const Expr &c : n.child) {
        if (is_constant(c)) {
          coef *= c.node().value;
        } else if (c.node().kind == ExprKind::Power && c.node().exponent < 0) {
          den.push_back(make_power(c.node().child[0], -c.node().exponent));
        } else {
          num.push_back(c);
        }
      }
      bool neg = coef < 0;
      Rational a = boost::multiprecision::abs(coef);
      if (neg) os << '-';
      bool wrote = false;
      if (a != 1 || num.empty()) {
        print_rational(os, a, true);
        wrote = true;
      }
      for (const Expr &c : num) {
        if (wrote) os << '*';
        print_impl(os, c, 2);
        wrote = true;
      }
      if (!den.empty()) {
        os << '/';
        if (den.size() > 1) os << '(';
        bool dfirst = true;
        for (const Expr &c : den) {
          if (!dfirst) os << '*';
          print_impl(os, c, 2);
          dfirst = false;
        }
        if (den.size() > 1) os << ')';
      }
      if (parent_prec > 1) os << ')';
      break;
    }
    case ExprKind::Power: {
      if (parent_prec > 3) os << '(';
      print_impl(os, n.child[0], 4);
      os << '^';
      if (is_integer(n.exponent) && n.exponent >= 0) {
        os << n.exponent;
      } else {
        os << '(';
        print_rational(os, n.exponent, false);
        os << ')';
      }
      if (parent_prec > 3) os << ')';
      break;
    }
  }
}

}  // namespace detail

inline std::string to_string(const Expr &e) {
  std::ostringstream os;
  detail::print_impl(os, e, 0);
  return os.str();
}

namespace detail {
inline std::vector<Expr> term_list(const Expr &e) {
  if (e.node().kind == ExprKind::Sum) return e.node().child;
  return {e};
}
}  // namespace detail

/// Distributes products over sums and expands small positive integer powers.
/// Intended for modest polynomials (resultants, invariant tables); growth is
/// exponential in general.
inline Expr expand(const Expr &e) {
  const ExprNode &n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
    case ExprKind::Symbol:
      return e;
    case ExprKind::Sum: {
      std::vector<Expr> out;
      for (const Expr &c : n.child) out.push_back(expand(c));
      return make_sum(std::move(out));
    }
    case ExprKind::Product: {
      std::vector<Expr> acc{constant(1)};
      for (const Expr &f : n.child) {
        std::vector<Expr> fe = detail::term_list(expand(f));
        std::vector<Expr> next;
        next.reserve(acc.size() * fe.size());
        for (const Expr &a : acc)
          for (const Expr &b : fe) next.push_back(make_product({a, b}));
        acc = std::move(next);
      }
      return make_sum(std::move(acc));
    }
    case ExprKind::Power: {
      Expr base = expand(n.child[0]);
      if (is_integer(n.exponent) && n.exponent > 1 && n.exponent <= 16 &&
          base.node().kind == ExprKind::Sum) {
        long k = static_cast<long>(numerator(n.exponent));
        Expr acc = base;
        for (long i = 1; i < k; ++i) acc = expand(acc * base);
        return acc;
      }
      return make_power(base, n.exponent);
    }
  }
  return e;
}

/// Structural degree bound (for Schwartz-Zippel failure estimates).
inline unsigned degree_bound(const Expr &e) {
  const ExprNode &n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
      return 0;
    case ExprKind::Symbol:
      return 1;
    case ExprKind::Sum: {
      unsigned d = 0;
      for (const Expr &c : n.child) d = std::max(d, degree_bound(c));
      return d;
    }
    case ExprKind::Product: {
      unsigned d = 0;
      for (const Expr &c : n.child) d += degree_bound(c);
      return d;
    }
    case ExprKind::Power: {
      Rational a = boost::multiprecision::abs(n.exponent);
      unsigned num = static_cast<unsigned>(numerator(a) / denominator(a)) + 1;
      return num * degree_bound(n.child[0]);
    }
  }
  return 0;
}

/// Collects every subexpression that must stay away from zero when sampling:
/// bases of negative powers, and bases of fractional powers (which must in
/// addition stay positive).
inline void collect_guards(const Expr &e, std::vector<Expr> &nonzero, std::vector<Expr> &positive) {
  const ExprNode &n = e.node();
  if (n.kind == ExprKind::Power) {
    if (!is_integer(n.exponent))
      positive.push_back(n.child[0]);
    else if (n.exponent < 0)
      nonzero.push_back(n.child[0]);
  }
  for (const Expr &c : n.child) collect_guards(c, nonzero, positive);
}

}  // namespace gl2ode
