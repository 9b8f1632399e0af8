#include <doctest.h>

#include "singcount/counting.hpp"
#include "singcount/error.hpp"
#include "singcount/schemes.hpp"
#include "../support/oracles.hpp"

using namespace singcount;

namespace {

AffineScheme cone() { return make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2); }
AffineScheme cusp() { return make_scheme("cusp", {"x", "y"}, {"y^2 - x^3"}, 1); }

LocalRingSpec mixed(std::uint64_t p, unsigned f, unsigned m) { return {PrimePower::make(p, f), m, RingKind::Mixed}; }
LocalRingSpec equal(std::uint64_t p, unsigned f, unsigned m) { return {PrimePower::make(p, f), m, RingKind::Equal}; }

std::uint64_t oracle_count(const AffineScheme& x, const LocalRingSpec& s) {
  oracle::NaiveRing r(static_cast<std::int64_t>(s.q.p), s.q.f, s.m, s.kind == RingKind::Mixed);
  return oracle::count_naive(x.system.polys, x.arity(), r);
}

}  // namespace

TEST_CASE("cone and cusp counts over Z/p^m") {
  // frozen from oracle::count_mod_n
  struct Row {
    std::uint64_t p;
    unsigned m;
    long cone, cusp;
  };
  const Row rows[] = {{3, 1, 9, 3},    {3, 2, 99, 15},  {3, 3, 891, 45}, {5, 1, 25, 5},
                      {5, 2, 725, 45}, {7, 1, 49, 7},   {7, 2, 2695, 91}};
  for (const auto& r : rows) {
    CAPTURE(r.p);
    CAPTURE(r.m);
    for (auto engine : {Engine::BruteForce, Engine::Lift}) {
      CHECK(count_points(cone(), mixed(r.p, 1, r.m), engine).count == r.cone);
      CHECK(count_points(cusp(), mixed(r.p, 1, r.m), engine).count == r.cusp);
    }
  }
  CHECK(count_points(cone(), mixed(5, 1, 3)).count == 18125);
  CHECK(count_points(cusp(), mixed(5, 1, 3)).count == 225);
  CHECK(count_points(cusp(), mixed(7, 1, 3)).count == 637);
}

TEST_CASE("frozen values agree with the Z/N oracle") {
  const auto c = cone();
  CHECK(oracle::count_mod_n(c.system.polys, 3, 9) == 99);
  CHECK(oracle::count_mod_n(c.system.polys, 3, 25) == 725);
  CHECK(oracle::count_mod_n(c.system.polys, 3, 15) == 225);
  const auto k = cusp();
  CHECK(oracle::count_mod_n(k.system.polys, 2, 27) == 45);
  CHECK(oracle::count_mod_n(k.system.polys, 2, 6) == 6);
}

TEST_CASE("lift and brute force agree with the naive ring oracle") {
  const AffineScheme schemes[] = {
      cone(),
      cusp(),
      make_scheme("xy0", {"x", "y"}, {"x*y"}, 1),
      make_scheme("x2y2", {"x", "y"}, {"x^2 + y^2"}, 1),
      make_scheme("pair", {"x", "y", "z"}, {"x*y - 1", "z^2 - x"}, 1),
      make_scheme("scaled", {"x", "y"}, {"3*x - y^2"}, 1),
      make_scheme("unused", {"x", "y", "z"}, {"x^2 - 2"}, 2),
  };
  const LocalRingSpec specs[] = {mixed(2, 1, 2), mixed(2, 1, 3), mixed(3, 1, 2), mixed(2, 2, 2), mixed(3, 2, 1),
                                 equal(2, 1, 3), equal(3, 1, 2), equal(2, 2, 2), equal(3, 2, 1)};
  for (const auto& x : schemes)
    for (const auto& s : specs) {
      CAPTURE(x.name);
      CAPTURE(s.to_string());
      const auto expected = oracle_count(x, s);
      CHECK(count_bruteforce(x, s).count == expected);
      CHECK(count_lift(x, s).count == expected);
    }
}

TEST_CASE("composite moduli multiply over prime powers") {
  CHECK(count_composite(cone(), 15) == 225);
  CHECK(count_composite(cusp(), 6) == 6);
  CHECK(count_composite(cone(), 1) == 1);
  CHECK(factorize(360) == std::vector<std::pair<std::uint64_t, unsigned>>{{2, 3}, {3, 2}, {5, 1}});
}

TEST_CASE("degenerate systems") {
  CHECK(count_points(affine_space(2), mixed(3, 1, 2)).count == 81);
  CHECK(count_points(make_scheme("one", {"x"}, {"1"}, 0), mixed(3, 1, 2)).count == 0);
  CHECK(count_points(make_scheme("nine", {"x"}, {"9"}, 1), mixed(3, 1, 2)).count == 9);
  CHECK(count_points(make_scheme("three", {"x"}, {"3"}, 0), mixed(3, 1, 2)).count == 0);
  CHECK(count_points(make_scheme("zero", {"x", "y"}, {"0", "x"}, 1), mixed(5, 1, 2)).count == 25);
}

TEST_CASE("thread count does not change the result") {
  const auto s = mixed(5, 1, 3);
  const auto one = count_lift(cone(), s, {.threads = 1}).count;
  CHECK(count_lift(cone(), s, {.threads = 4}).count == one);
  CHECK(count_bruteforce(cusp(), mixed(3, 1, 3), {.threads = 3}).count == 45);
}

TEST_CASE("budgets") {
  CHECK_THROWS_AS(count_bruteforce(cone(), mixed(7, 1, 3), {.budget = 1000}), BudgetError);
  CHECK_THROWS_AS(count_lift(cone(), mixed(3, 1, 8), {.node_budget = 50}), BudgetError);
}

TEST_CASE("mixed and equal characteristic agree at good primes") {
  const auto c = cross_check_rings(cone(), PrimePower::make(3, 1), 3);
  CHECK(c.equal);
  CHECK(c.mixed_count == 891);
  // 2 is bad for x^2 + y^2 = 2... the equation x^2 - 2 has different counts mod 8 and over F_2[t]/t^3
  const auto bad = cross_check_rings(make_scheme("s", {"x"}, {"x^2 - 2"}, 0), PrimePower::make(2, 1), 3);
  CHECK_FALSE(bad.equal);
}

TEST_CASE("h value") {
  const auto e = h_value(cone(), mixed(3, 1, 2));
  CHECK(e.h == mpq_class(11, 9));
}

TEST_CASE("point listing") {
  const auto pts = list_points(cusp(), mixed(3, 1, 1));
  CHECK(pts.size() == 3);
  CHECK_THROWS_AS(list_points(cone(), mixed(5, 1, 2), 10), BudgetError);
}
