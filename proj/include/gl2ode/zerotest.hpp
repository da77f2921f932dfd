#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gl2ode/expr.hpp"

namespace gl2ode {

struct Witness {
  std::vector<std::pair<std::string, std::string>> assignment;  // symbol -> exact value
  std::string value;                                            // expression value there
};

struct Verdict {
  enum class Kind { Zero, ZeroNumerically, NonZero, Inconclusive } kind;
  std::optional<Witness> witness;
  unsigned trials = 0;
  unsigned digits = 0;
  std::string tol;
  std::string failure_bound;  // Schwartz-Zippel bound, exact path only
  std::string note;

  bool passed() const { return kind == Kind::Zero || kind == Kind::ZeroNumerically; }
  bool is(Kind k) const { return kind == k; }
};

inline const char *to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Zero:
      return "Zero";
    case Verdict::Kind::ZeroNumerically:
      return "ZeroNumerically";
    case Verdict::Kind::NonZero:
      return "NonZero";
    case Verdict::Kind::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

struct SampleRange {
  Rational lo{1, 2};
  Rational hi{5, 2};
};

struct ZeroTestOptions {
  unsigned trials = 25;            // exact path sample count
  long long int_range = 1000000;   // exact path: integers in [-range, range]
  unsigned points = 8;             // numeric path sample count
  unsigned digits = 60;            // numeric path precision
  std::string tol = "1e-40";       // numeric path relative tolerance
  uint64_t seed = 0x5eed5eedULL;
  std::map<SymbolId, SampleRange> ranges;  // numeric path per-symbol overrides
  double guard = 1e-3;             // keep denominators/radicands this far from zero
};

namespace detail {

inline Rational random_rational(std::mt19937_64 &rng, const SampleRange &r) {
  // dyadic rational in [lo, hi] with a 16-bit grid: reproducible and exact
  std::uniform_int_distribution<long> d(0, 65536);
  return r.lo + (r.hi - r.lo) * Rational(d(rng), 65536);
}

inline Witness make_witness(const Assignment &a, const Number &value) {
  Witness w;
  for (const auto &[id, num] : a) w.assignment.emplace_back(sym_name(id), num.str());
  w.value = value.str();
  return w;
}

}  // namespace detail

/// Probabilistic identity test.
///
/// Rational functions are tested exactly at random integer points
/// (Schwartz-Zippel); any nonzero value is a certified counterexample and the
/// all-zero outcome carries a failure-probability bound.  Expressions with
/// fractional powers are sampled on positive points at high precision and
/// judged against a relative tolerance.
inline Verdict is_zero(const Expr &e, const ZeroTestOptions &opt = {}) {
  Verdict v{};
  std::mt19937_64 rng(opt.seed);

  std::vector<SymbolId> vars;
  for (SymbolId i = 0; i < kMaxSymbols; ++i)
    if (e.node().free.test(i)) vars.push_back(i);

  if (is_constant(e)) {
    if (e.node().value == 0) {
      v.kind = Verdict::Kind::Zero;
      v.failure_bound = "0";
      return v;
    }
    v.kind = Verdict::Kind::NonZero;
    v.witness = detail::make_witness({}, Number(e.node().value));
    return v;
  }

  std::vector<Expr> guard_nonzero, guard_positive;
  collect_guards(e, guard_nonzero, guard_positive);

  if (e.node().rational_fn) {
    // exact path
    std::uniform_int_distribution<long long> dist(-opt.int_range, opt.int_range);
    unsigned done = 0, attempts = 0;
    const unsigned max_attempts = 4 * opt.trials + 16;
    while (done < opt.trials && attempts < max_attempts) {
      ++attempts;
      Assignment a;
      for (SymbolId s : vars) a[s] = Number(Rational(dist(rng)));
      try {
        Number val = eval(e, a);
        ++done;
        if (!val.is_zero()) {
          v.kind = Verdict::Kind::NonZero;
          v.trials = done;
          v.witness = detail::make_witness(a, val);
          return v;
        }
      } catch (const DivisionByZero &) {
      } catch (const DomainError &) {
      }
    }
    v.trials = done;
    if (done < std::max(1u, opt.trials / 2)) {
      v.kind = Verdict::Kind::Inconclusive;
      v.note = "fewer than trials/2 sample points were evaluable";
      return v;
    }
    v.kind = Verdict::Kind::Zero;
    // per-trial failure probability is deg/|S| for a nonzero polynomial
    double d = static_cast<double>(degree_bound(e));
    double s = 2.0 * static_cast<double>(opt.int_range) + 1.0;
    double per = std::min(1.0, d / s);
    std::ostringstream os;
    os << "<= (" << per << ")^" << done;
    v.failure_bound = os.str();
    return v;
  }

  // numeric path on positive sample points
  PrecisionGuard guard(opt.digits);
  v.digits = opt.digits;
  v.tol = opt.tol;
  Float tol(opt.tol);
  Float guard_eps(opt.guard);
  unsigned done = 0, attempts = 0;
  const unsigned max_attempts = 6 * opt.points + 24;
  SampleRange def;
  while (done < opt.points && attempts < max_attempts) {
    ++attempts;
    Assignment a;
    for (SymbolId s : vars) {
      auto it = opt.ranges.find(s);
      a[s] = Number(detail::random_rational(rng, it == opt.ranges.end() ? def : it->second));
    }
    try {
      EvalContext ctx(a);
      bool ok = true;
      for (const Expr &g : guard_nonzero)
        if (boost::multiprecision::abs(ctx(g).as_float()) < guard_eps) ok = false;
      for (const Expr &g : guard_positive)
        if (ctx(g).as_float() < guard_eps) ok = false;
      if (!ok) continue;
      Float val = ctx(e).as_float();
      Float scale = ctx.scale(e);
      if (scale < 1) scale = 1;
      ++done;
      if (boost::multiprecision::abs(val) > tol * scale) {
        v.kind = Verdict::Kind::NonZero;
        v.trials = done;
        v.witness = detail::make_witness(a, Number(val));
        return v;
      }
    } catch (const DivisionByZero &) {
    } catch (const DomainError &) {
    }
  }
  v.trials = done;
  if (done < std::max(1u, opt.points / 2)) {
    v.kind = Verdict::Kind::Inconclusive;
    v.note = "fewer than half of the sample points were evaluable";
    return v;
  }
  v.kind = Verdict::Kind::ZeroNumerically;
  return v;
}

}  // namespace gl2ode
