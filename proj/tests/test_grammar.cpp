#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pshlab/catalog.hpp"
#include "pshlab/grammar.hpp"
#include "pshlab/rng.hpp"

using namespace pshlab;

TEST_CASE("parses the documented prefix forms") {
    // Commas are whitespace; a bare chi name uses the gamma = 1 default that
    // matches the |f| < 1/e hypothesis of the composition examples.
    PshExpr e = parse_expr("compose(neglogneg, logabs(poly 1 -1))");
    CHECK(e.dim() == 1);
    CHECK(e.eval(Point::make(1, {1.0 + std::exp(-std::exp(1.0)), 0.0})).v ==
          doctest::Approx(-1.0));

    CHECK(parse_expr("const(2 -3.5)").dim() == 2);
    CHECK(parse_expr("lognorm(2 0 0 0 0)").dim() == 2);
    CHECK(parse_expr("lognorm(2 0 0 0 0 sel 0)").eval(Point::make(2, {1, 0, 5, 5})).v ==
          doctest::Approx(0.0));
    CHECK(parse_expr("sum(1 logabs(poly 1 0) 0.5 const(1 -2))")
              .eval(Point::make(1, {1, 0}))
              .v == doctest::Approx(-1.0));
    CHECK(parse_expr("max(const(1 -1) const(1 -2))").eval(Point::zero(1)).v ==
          doctest::Approx(-1.0));
    CHECK(parse_expr("scale(2 logabs(poly 1 0))").eval(Point::make(1, {std::exp(1.0), 0})).v ==
          doctest::Approx(2.0));
    CHECK(parse_expr("addconst(3 const(1 -1))").eval(Point::zero(1)).v == doctest::Approx(2.0));
}

TEST_CASE("round-trip is exact on the whole catalog") {
    for (const auto& e : catalog()) {
        std::string printed = print_expr(e.expr);
        PshExpr back = parse_expr(printed);
        CHECK(print_expr(back) == printed);
        // and evaluation agrees bit-for-bit at sampled points
        Rng rng(substream_key(21, StreamTag::Misc, std::hash<std::string>{}(e.name)));
        for (int i = 0; i < 20; ++i) {
            Point p = draw_ball(rng, e.working_ball);
            CHECK(back.eval(p).v == e.expr.eval(p).v);
        }
    }
}

TEST_CASE("round-trip covers every grammar production") {
    const char* samples[] = {
        "const(1 -4)",
        "logabs(poly 1 -1 0.25)",
        "logabs(polyv 2 1 1 0 -0.5 2)",
        "logabs(polyn 2 2 1 0 1 1 -1 0 0 2)",
        "lognorm(3 0 0 0.5 0 0 0 sel 0 2 w 1 2)",
        "sum(1 logabs(poly 1 0) 2 const(1 -1))",
        "max(logabs(poly 1 0) logabs(poly 1 -1) const(1 -9))",
        "scale(2.5 addconst(-1 logabs(poly 1 0)))",
        "compose(neginv(2) logabs(poly 1 0))",
        "compose(negpow(0.3 2) logabs(poly 1 0))",
        "compose(itert(2 1.5) logabs(poly 1 0))",
        "compose(affine(2 -1) const(1 -3))",
    };
    for (const char* s : samples) {
        PshExpr e = parse_expr(s);
        std::string canon = print_expr(e);
        CHECK(print_expr(parse_expr(canon)) == canon);
    }
}

TEST_CASE("malformed expressions raise ParseError") {
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("nonsense(1)"), ParseError);
    CHECK_THROWS_AS(parse_expr("logabs(poly)"), ParseError);
    CHECK_THROWS_AS(parse_expr("const(1 2"), ParseError);
    CHECK_THROWS_AS(parse_expr("const(1 2) trailing"), ParseError);
    CHECK_THROWS_AS(parse_expr("compose(negpow logabs(poly 1 0))"), ParseError);
    CHECK_THROWS_AS(parse_expr("lognorm(2 0 0 0 0 zzz 1)"), ParseError);
}

TEST_CASE("domain literals parse and round-trip") {
    Domain b = parse_domain("ball(0 0 1)");
    CHECK(b.kind() == Domain::Kind::Ball);
    CHECK(b.dim() == 1);
    CHECK(parse_domain(b.print()).print() == b.print());

    Domain p = parse_domain("polydisk(0 0 0 0 1 0.5)");
    CHECK(p.kind() == Domain::Kind::Polydisk);
    CHECK(p.dim() == 2);
    CHECK(parse_domain(p.print()).print() == p.print());

    Domain c = parse_domain("cusp(2)");
    CHECK(c.kind() == Domain::Kind::Cusp);
    CHECK(parse_domain(c.print()).print() == c.print());

    Domain s = parse_domain("shrunk(ball(0 0 1) 0.1)");
    CHECK(s.kind() == Domain::Kind::Shrunk);
    CHECK(parse_domain(s.print()).print() == s.print());

    CHECK_THROWS_AS(parse_domain("ball(0 0)"), ParseError);
    CHECK_THROWS_AS(parse_domain("cusp(0.5)"), Error);  // needs alpha > 1
    CHECK_THROWS_AS(parse_domain("tube(1)"), ParseError);
}
