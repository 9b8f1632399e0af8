#include <doctest.h>

#include <random>

#include "singcount/error.hpp"
#include "singcount/polys.hpp"

using namespace singcount;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

IntPoly P(std::string_view s) { return parse_polynomial(s, kXYZ); }

IntPoly random_poly(std::mt19937_64& rng) {
  IntPoly p(3);
  const int terms = static_cast<int>(rng() % 4);
  for (int t = 0; t < terms; ++t)
    p.add_term({static_cast<unsigned>(rng() % 3), static_cast<unsigned>(rng() % 3), static_cast<unsigned>(rng() % 2)},
               mpz_class(static_cast<long>(rng() % 11) - 5));
  return p;
}

}  // namespace

TEST_CASE("parsing and printing") {
  CHECK(P("x*y - z^2").to_string(kXYZ) == "x*y - z^2");
  CHECK(P("(x + 1)^2") == P("x^2 + 2*x + 1"));
  CHECK(P("-(x - y)") == P("y - x"));
  CHECK(P("2*3*x") == P("6*x"));
  CHECK(P("x - x").is_zero());
  CHECK(P("123456789012345678901234567890*x").terms().begin()->second == mpz_class("123456789012345678901234567890"));
  CHECK(P("0").to_string(kXYZ) == "0");
  CHECK(P("z^2 + x^3 + y").to_string(kXYZ) == "x^3 + z^2 + y");
}

TEST_CASE("parse errors carry a position") {
  try {
    P("x + w");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(P("x +"), ParseError);
  CHECK_THROWS_AS(P("(x"), ParseError);
  CHECK_THROWS_AS(P("x^-1"), ParseError);
  CHECK_THROWS_AS(P("x y"), ParseError);
  CHECK_THROWS_AS(P("x / y"), ParseError);
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    CHECK(a.pow(2) == a * a);
    // Leibniz rule
    CHECK((a * b).derivative(0) == a.derivative(0) * b + a * b.derivative(0));
    if (!a.is_zero() && !b.is_zero()) CHECK((a * b).total_degree() == a.total_degree() + b.total_degree());
  }
}

TEST_CASE("evaluation matches substitution") {
  const Ring r(LocalRingSpec::parse("mixed:5^1:2"));
  const auto f = P("x^3*y - 7*z^2 + 12");
  const Element pt[] = {3, 11, 24};
  // 27*11 - 7*576 + 12 = -3723, mod 25 = 2
  CHECK(eval_poly(f, r, pt) == 2);
  const CompiledPoly cf(f, r);
  CHECK(cf.eval(r, pt) == 2);
  CHECK(cf.max_var() == 2);
  CHECK(CompiledPoly(P("25*x"), r).is_zero());
}

TEST_CASE("jacobian, determinant, degrees") {
  PolySystem s{kXYZ, {P("x*y - z^2"), P("x^2")}};
  const auto j = jacobian(s);
  CHECK(j[0][0] == P("y"));
  CHECK(j[0][2] == P("-2*z"));
  CHECK(j[1][1].is_zero());
  CHECK(determinant({{P("x"), P("y")}, {P("z"), P("x")}}) == P("x^2 - y*z"));
  CHECK(P("x^2*y + z").degree_in(0) == 2);
  CHECK(P("x^2*y + z").support() == std::vector<std::size_t>{0, 1, 2});
  CHECK(P("y").remap(2, std::vector<std::size_t>{1, 0, 1}) == parse_polynomial("x", std::vector<std::string>{"x", "w"}));
}

TEST_CASE("jet expansion") {
  const std::vector<std::string> xy{"x", "y"};
  PolySystem cusp{xy, {parse_polynomial("y^2 - x^3", xy)}};
  const auto j = jet_expand(cusp, 1);
  CHECK(j.vars == std::vector<std::string>{"x_0", "y_0", "x_1", "y_1"});
  REQUIRE(j.polys.size() == 2);
  CHECK(j.polys[0] == parse_polynomial("y_0^2 - x_0^3", j.vars));
  CHECK(j.polys[1] == parse_polynomial("2*y_0*y_1 - 3*x_0^2*x_1", j.vars));
  CHECK(jet_expand(cusp, 0).polys == cusp.polys);
}
