#include <doctest.h>

#include <cmath>

#include "singcount/error.hpp"
#include "singcount/zeta.hpp"
#include "../support/oracles.hpp"

using namespace singcount;

namespace {

// Series of num/den by long division, independent of RationalFit::expand.
std::vector<mpq_class> series_of(const std::vector<mpq_class>& num, const std::vector<mpq_class>& den, std::size_t n) {
  std::vector<mpq_class> out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    mpq_class v = k < num.size() ? num[k] : mpq_class(0);
    for (std::size_t j = 1; j < den.size() && j <= k; ++j) v -= den[j] * out[k - j];
    out[k] = v / den[0];
  }
  return out;
}

}  // namespace

TEST_CASE("Igusa series of a hyperplane") {
  const auto x0 = make_scheme("x=0", {"x"}, {"x"}, 0);
  for (std::uint64_t p : {3, 5}) {
    CAPTURE(p);
    const auto z = igusa_Z_series(x0, p, 19);
    REQUIRE(z.coeffs.size() == 20);
    const auto expected = series_of({1 - mpq_class(1, p)}, {1, -1}, 20);
    CHECK(z.coeffs == expected);
    // second route through the P-series
    const auto from_p = igusa_from_P(local_P_series(x0, p, 20));
    CHECK(from_p.coeffs == expected);
    const auto fit = pade_fit(z, 4);
    REQUIRE(fit.found);
    CHECK(fit.stable);
    CHECK(fit.num == std::vector<mpq_class>{1 - mpq_class(1, p)});
    CHECK(fit.den == std::vector<mpq_class>{1, -1});
    const auto roots = rational_roots(fit.den);
    REQUIRE(roots.size() == 1);
    CHECK(pole_exponent(roots[0].first, p, SeriesKind::Z) == -1);
  }
}

TEST_CASE("P-series and the two Igusa routes agree") {
  const auto cone = make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2);
  const auto cusp = make_scheme("cusp", {"x", "y"}, {"y^2 - x^3"}, 1);
  for (const auto* x : {&cone, &cusp})
    for (std::uint64_t p : {3, 5}) {
      const auto ps = local_P_series(*x, p, 5);
      CHECK(ps.coeffs[0] == 1);
      for (unsigned n = 1; n <= 3; ++n) {
        std::int64_t pn = 1;
        for (unsigned i = 0; i < n; ++i) pn *= static_cast<std::int64_t>(p);
        CHECK(ps.coeffs[n] == oracle::count_mod_n(x->system.polys, x->arity(), pn));
      }
      const auto direct = igusa_Z_series(*x, p, 4);
      const auto via_p = igusa_from_P(ps);
      CHECK(direct.coeffs == via_p.coeffs);
    }
}

TEST_CASE("rational reconstruction") {
  const std::vector<mpq_class> num{1, 2};
  const std::vector<mpq_class> den{1, -3, mpq_class(5, 7)};
  const auto a = series_of(num, den, 10);
  const auto fit = pade_fit(a, 3);
  REQUIRE(fit.found);
  CHECK(fit.stable);
  CHECK(fit.num == num);
  CHECK(fit.den == den);
  CHECK(fit.expand(10) == a);
  // not rational of low degree: the holdout catches it
  std::vector<mpq_class> fact{1};
  for (int k = 1; k < 10; ++k) fact.push_back(fact.back() * k);
  const auto bad = pade_fit(fact, 2);
  CHECK_FALSE(bad.stable);
  CHECK_THROWS_AS(pade_fit(a, 5), DomainError);

  // cone at p = 3: (1 - 9T^2) / ((1 - 9T)(1 - 27T^2)), pole at s = 2
  const auto cone = make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2);
  const auto cf = pade_fit(local_P_series(cone, 3, 8), 3);
  REQUIRE(cf.stable);
  CHECK(cf.num == std::vector<mpq_class>{1, 0, -9});
  CHECK(cf.den == std::vector<mpq_class>{1, -9, -27, 243});
  const auto roots = rational_roots(cf.den);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].first == mpq_class(1, 9));
  CHECK(pole_exponent(roots[0].first, 3, SeriesKind::P) == 2);
}

TEST_CASE("rational roots") {
  // (2T - 1)^2 (T + 3)(T^2 + 1)
  const std::vector<mpq_class> poly{3, -11, 11, -7, 8, 4};
  const auto roots = rational_roots(poly);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].first == -3);
  CHECK(roots[0].second == 1);
  CHECK(roots[1].first == mpq_class(1, 2));
  CHECK(roots[1].second == 2);
  CHECK(pole_exponent(mpq_class(1, 2), 3, SeriesKind::P) == std::nullopt);
  CHECK(pole_exponent(mpq_class(27), 3, SeriesKind::P) == -3);
  CHECK(pole_exponent(mpq_class(1, 3), 3, SeriesKind::Z) == 0);
}

TEST_CASE("global counts") {
  const auto cone = make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2);
  const auto counts = counts_up_to(cone, 30);
  REQUIRE(counts.size() == 31);
  for (std::uint64_t n = 1; n <= 30; ++n) CHECK(counts[n] == oracle::count_mod_n(cone.system.polys, 3, n));

  const auto a1 = affine_space(1);
  const auto est = abscissa_estimate(a1, 10000);
  CHECK(est.slope >= 1.9);
  CHECK(est.slope <= 2.1);
  const auto pt = abscissa_estimate(affine_space(0), 10000);
  CHECK(pt.slope >= 0.95);
  CHECK(pt.slope <= 1.05);

  for (const auto& v : cesaro_mean(a1, 20)) CHECK(v == 1);
  const auto ces = cesaro_from_counts({0, 1, 3, 5}, 1);
  CHECK(ces == std::vector<mpq_class>{1, mpq_class(5, 4), mpq_class(25, 18)});

  CHECK(primes_up_to(20) == std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19});
}

TEST_CASE("Euler products") {
  const auto a1 = affine_space(1);
  const double pi2_6 = M_PI * M_PI / 6;
  const auto e = global_euler_product(a1, 3.0, 100, 12);
  CHECK(std::fabs(e.value - pi2_6) < 0.01);
  CHECK_FALSE(e.divergence_warning);
  const auto e4 = global_euler_product(a1, 3.0, 100, 12, Normalization::P, {.threads = 4});
  CHECK(e4.value == e.value);
  const auto z = global_euler_product(a1, 3.0, 50, 10, Normalization::Z);
  CHECK(z.value > 1.0);
  CHECK_THROWS_AS(global_euler_product(a1, 2.0, 10, 4), DomainError);
}
