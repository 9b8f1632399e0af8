#include <doctest.h>

#include <sstream>

#include "singcount/diagnostics.hpp"
#include "singcount/error.hpp"
#include "../support/oracles.hpp"

using namespace singcount;

namespace {

AffineScheme cone() { return make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2); }
AffineScheme cusp() { return make_scheme("cusp", {"x", "y"}, {"y^2 - x^3"}, 1); }

std::vector<PrimePower> primes(std::initializer_list<std::uint64_t> ps) {
  std::vector<PrimePower> out;
  for (auto p : ps) out.push_back(PrimePower::make(p, 1));
  return out;
}

}  // namespace

TEST_CASE("cone h values follow the closed form") {
  const auto t = h_sweep(cone(), primes({3, 5, 7}), 4);
  CHECK(t.cells.size() == 3 * 2 * 4);
  for (std::uint64_t p : {3, 5, 7})
    for (auto kind : {RingKind::Mixed, RingKind::Equal}) {
      CAPTURE(p);
      const auto q = PrimePower::make(p, 1);
      REQUIRE(t.find(q, 1, kind));
      CHECK(t.find(q, 1, kind)->h == 1);
      for (unsigned m = 2; m <= 3; ++m) CHECK(t.find(q, m, kind)->h == 1 + mpq_class(1, p) - mpq_class(1, p * p));
      // level 4 picks up one more correction term (8505 points mod 81, 465625 mod 625)
      CHECK(t.find(q, 4, kind)->h == 1 + mpq_class(1, p) - mpq_class(1, p * p * p));
    }
  // independent check of two cells through the Z/N oracle
  const auto c = cone();
  auto ratio = [](std::uint64_t count, std::uint64_t n) {
    mpq_class r(static_cast<unsigned long>(count), static_cast<unsigned long>(n * n));
    r.canonicalize();
    return r;
  };
  CHECK(ratio(oracle::count_mod_n(c.system.polys, 3, 49), 49) == t.find(PrimePower::make(7, 1), 2, RingKind::Mixed)->h);
  CHECK(ratio(oracle::count_mod_n(c.system.polys, 3, 81), 81) == t.find(PrimePower::make(3, 1), 4, RingKind::Mixed)->h);

  const auto rep = rs_report(t);
  CHECK(rep.verdict == Verdict::RsConsistent);
  REQUIRE(rep.stats.size() == 6);
  for (const auto& s : rep.stats) {
    CHECK(s.s3 == 1 - mpq_class(1, s.q.p * s.q.p));
    CHECK(s.s1_squared == 0);
    CHECK(s.c == 1);
  }
  CHECK(DiagnosticsReport::kLabel == "empirical; hypotheses user-asserted, tested m-range only");
}

TEST_CASE("cusp is flagged") {
  const auto t = h_sweep(cusp(), primes({3, 5, 7}), 2);
  for (std::uint64_t p : {3, 5, 7}) {
    CHECK(t.find(PrimePower::make(p, 1), 2, RingKind::Mixed)->h == 2 - mpq_class(1, p));
    CHECK(t.find(PrimePower::make(p, 1), 2, RingKind::Equal)->h == 2 - mpq_class(1, p));
  }
  const auto rep = rs_report(t);
  CHECK(rep.verdict == Verdict::NotRs);
  for (const auto& s : rep.stats) CHECK(s.s3 == s.q.p - 1);
  CHECK_FALSE(rep.reasons.empty());
}

TEST_CASE("hypothesis violations and missing data") {
  // two lines over F_q when -1 is a square
  const auto x2y2 = make_scheme("x2y2", {"x", "y"}, {"x^2 + y^2"}, 1);
  const auto t = h_sweep(x2y2, primes({5}), 2, {RingKind::Mixed});
  CHECK(rs_report(t).verdict == Verdict::HypothesisViolated);

  const auto failing = h_sweep(cone(), primes({3}), 3, {RingKind::Mixed}, Engine::BruteForce, {.budget = 100});
  CHECK(failing.cells.size() == 3);
  CHECK(failing.cells[0].entry);
  CHECK_FALSE(failing.cells[2].entry);
  CHECK_FALSE(failing.cells[2].error.empty());
  CHECK(rs_report(HTable{}).verdict == Verdict::Insufficient);
  CHECK(to_string(Verdict::NotRs) == "not-RS");
}

TEST_CASE("Lang-Weil constant of x^2 + y^2") {
  const auto x2y2 = make_scheme("x2y2", {"x", "y"}, {"x^2 + y^2"}, 1);
  const auto est = lang_weil_c(x2y2, primes({5, 13, 7, 11}));
  REQUIRE(est.size() == 4);
  CHECK(est[0].c == 2);
  CHECK(est[1].c == 2);
  CHECK(est[2].c == 0);
  CHECK(est[3].c == 0);
  // 2q - 1 points when q = 1 mod 4, one point otherwise
  CHECK(est[0].count == 9);
  CHECK(est[2].count == 1);
  CHECK(est[0].residual == mpq_class(1, 5));
}

TEST_CASE("CSV export") {
  const auto t = h_sweep(cusp(), primes({3}), 2, {RingKind::Mixed});
  std::ostringstream out;
  write_csv(out, t);
  CHECK(out.str() == "scheme,q,m,kind,count,h_num,h_den\ncusp,3,1,mixed,3,1,1\ncusp,3,2,mixed,15,5,3\n");
}
