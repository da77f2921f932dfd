#include <catch2/catch_amalgamated.hpp>

#include "gl2ode/parse.hpp"
#include "gl2ode/zerotest.hpp"

using namespace gl2ode;

TEST_CASE("parse_expr: precedence and exact rationals") {
  Expr e = parse_expr("5*y4^2/(3*y3)");
  Expr expect = constant(5, 3) * pow(symbol("y4"), 2) / symbol("y3");
  REQUIRE(struct_equal(e, expect));

  Expr p = parse_expr("y4^(5/4)");
  REQUIRE(p.node().kind == ExprKind::Power);
  REQUIRE(p.node().exponent == Rational(5, 4));

  // right operand of '-' binds the whole term
  REQUIRE(struct_equal(parse_expr("1 - 2*3"), constant(-5)));
  // '^' binds tighter than unary minus
  REQUIRE(struct_equal(parse_expr("-2^2"), constant(-4)));
  REQUIRE(struct_equal(parse_expr("2^(-1)"), constant(1, 2)));
}

TEST_CASE("parse_expr: errors carry positions") {
  try {
    parse_expr("(");
    FAIL("expected ParseError");
  } catch (const ParseError &err) {
    REQUIRE(err.line == 1);
    REQUIRE(err.column == 2);
  }
  REQUIRE_THROWS_AS(parse_expr("5y4"), ParseError);  // implicit multiplication is rejected
  REQUIRE_THROWS_AS(parse_expr("x +"), ParseError);
  REQUIRE_THROWS_AS(parse_expr("x ^ y"), ParseError);
}

TEST_CASE("parse round-trips printed catalog-style expressions") {
  const char *samples[] = {
      "5*y4^2/(3*y3)",
      "5*y4^2/(4*y3)",
      "y4^(5/4)",
      "5*(8*y3^3 - 12*y2*y3*y4 + 3*y1*y4^2)/(6*(2*y1*y3 - 3*y2^2))",
      "y3^(5/3) + 5*y4^2/(3*y3)",
      "x^2*y - 4*y1*y3 + 3*y2^2",
  };
  for (const char *s : samples) {
    Expr e = parse_expr(s);
    Expr back = parse_expr(to_string(e));
    REQUIRE(struct_equal(back, canonicalize(e)));
  }
}

TEST_CASE("parser is total on fuzzed input") {
  std::mt19937_64 rng(1234);
  const std::string alphabet = "xy1234()+-*/^ .";
  for (int i = 0; i < 2000; ++i) {
    std::uniform_int_distribution<int> len(0, 24);
    std::string s;
    int n = len(rng);
    for (int k = 0; k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
    try {
      (void)parse_expr(s);
    } catch (const ParseError &) {
    } catch (const ValidationError &) {
    } catch (const DivisionByZero &) {
      // "1/0" style input folds at construction
    }
  }
  SUCCEED("no crash");
}

TEST_CASE("parse_ode: stanzas and validation") {
  ODESpec flat = parse_ode("order=5\nF=0");
  REQUIRE(flat.order == 5);
  REQUIRE(is_zero_expr(flat.F));

  ODESpec s = parse_ode("order = 5\nname = ex54\nF = 5*y4^2/(4*y3)");
  REQUIRE(s.name == "ex54");
  REQUIRE(struct_equal(s.F, parse_expr("5*y4^2/(4*y3)")));

  // y5 is not a jet coordinate of an order-5 equation
  REQUIRE_THROWS_AS(parse_ode("order=5\nF=y5"), ValidationError);
  REQUIRE_THROWS_AS(parse_ode("order=2\nF=0"), ValidationError);
  REQUIRE_THROWS_AS(parse_ode("F=0"), ValidationError);
  REQUIRE_THROWS_AS(parse_ode("order=5"), ValidationError);
}

TEST_CASE("parse_ode: auxiliary definitions") {
  ODESpec s = parse_ode(
      "order = 5\n"
      "let w = (y1^2 + y2)^(1/2)\n"
      "F = w*y4 + y3\n");
  REQUIRE(s.lets.size() == 1);
  Expr resolved = s.resolved();
  // after resolution no 'w' remains
  REQUIRE(!depends_on(resolved, sym_id("w")));

  // aux symbols cannot be recursive (w may not reference itself)
  REQUIRE_THROWS_AS(parse_ode("order=5\nlet w = w + 1\nF = 0"), ValidationError);
}
