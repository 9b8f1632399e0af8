// Acceptance run: one PASS/FAIL line per criterion, transcripts compared across thread counts.
//
//   acceptance [--threads-list 1,4,8] [--only K] [--verbose] [--known-failure K]...
//
// Exit status is 0 when the failing criteria are exactly the --known-failure ones.
// Known failures still print FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "singcount/counting.hpp"
#include "singcount/diagnostics.hpp"
#include "singcount/error.hpp"
#include "singcount/groups.hpp"
#include "singcount/schemes.hpp"
#include "singcount/zeta.hpp"

using namespace singcount;

namespace {

// pinned limits
constexpr std::uint64_t kEngineCellLimit = 1'000'000;  // q^(m n)
constexpr double kEngineSeconds = 300;
constexpr double kAbscissaSeconds = 60;
constexpr double kZetaTableSeconds = 600;
constexpr double kAbscissaA1Lo = 1.9, kAbscissaA1Hi = 2.1;
constexpr double kAbscissaPointLo = 0.95, kAbscissaPointHi = 1.05;
constexpr double kEulerTolerance = 0.01;
constexpr std::uint64_t kAbscissaN = 10'000;
constexpr unsigned kIgusaLength = 20;

struct Outcome {
  bool pass = true;
  std::ostringstream log;  // deterministic transcript
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      log << "MISMATCH " << what << '\n';
    }
  }
};

std::vector<AffineScheme> corpus() {
  return {
      affine_space(2),
      make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2),
      make_scheme("cusp", {"x", "y"}, {"y^2 - x^3"}, 1),
      make_scheme("xy=0", {"x", "y"}, {"x*y"}, 1),
      make_scheme("x^2+y^2=0", {"x", "y"}, {"x^2 + y^2"}, 1),
      sl_scheme(2),
      def_scheme(GroupType::SL, 2, 1),
  };
}

bool fits(std::uint64_t q, std::uint64_t e, std::uint64_t limit) {
  unsigned __int128 v = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    v *= q;
    if (v > limit) return false;
  }
  return true;
}

std::vector<PrimePower> prime_powers_up_to(std::uint64_t limit) {
  std::vector<PrimePower> out;
  for (auto p : primes_up_to(limit))
    for (unsigned f = 1; fits(p, f, limit); ++f) out.push_back(PrimePower::make(p, f));
  std::sort(out.begin(), out.end(), [](const PrimePower& a, const PrimePower& b) { return a.q < b.q; });
  return out;
}

mpq_class Q(long a, long b = 1) {
  mpq_class r(a, b);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------

void engine_equivalence(Outcome& o, unsigned threads) {
  const CountOptions opts{.threads = threads};
  for (const auto& x : corpus()) {
    const std::uint64_t n = x.arity();
    std::size_t cells = 0;
    for (const auto& q : prime_powers_up_to(kEngineCellLimit)) {
      if (!fits(q.q, n, kEngineCellLimit)) break;
      for (auto kind : {RingKind::Mixed, RingKind::Equal})
        for (unsigned m = 1; fits(q.q, m * n, kEngineCellLimit); ++m) {
          const LocalRingSpec spec{q, m, kind};
          const auto brute = count_bruteforce(x, spec, opts).count;
          const auto lift = count_lift(x, spec, opts).count;
          o.require(brute == lift, x.name + " " + spec.to_string() + ": brute " + brute.get_str() + " lift " +
                                       lift.get_str());
          ++cells;
          if (n == 0) break;
        }
    }
    o.log << x.name << ": " << cells << " cells compared\n";
  }
}

void cone_ledger(Outcome& o, unsigned threads) {
  const auto cone = make_scheme("cone", {"x", "y", "z"}, {"x*y - z^2"}, 2);
  const auto t = h_sweep(cone, {PrimePower::make(3, 1), PrimePower::make(5, 1), PrimePower::make(7, 1)}, 4,
                         {RingKind::Mixed, RingKind::Equal}, Engine::Lift, {.threads = threads});
  for (const auto& c : t.cells) {
    if (!c.entry) {
      o.require(false, "cell failed: " + c.error);
      continue;
    }
    const long q = static_cast<long>(c.q.q);
    const mpq_class expected = c.m == 1 ? Q(1) : 1 + Q(1, q) - Q(1, q * q);
    o.log << to_string(c.kind) << " q=" << q << " m=" << c.m << " h=" << c.entry->h << '\n';
    o.require(c.entry->h == expected, std::string(to_string(c.kind)) + " q=" + std::to_string(q) + " m=" +
                                          std::to_string(c.m) + ": h = " + c.entry->h.get_str() + ", claimed " +
                                          expected.get_str());
  }
  const auto rep = rs_report(t);
  for (const auto& s : rep.stats) {
    const long q = static_cast<long>(s.q.q);
    o.log << to_string(s.kind) << " q=" << q << " s3=" << s.s3 << '\n';
    o.require(s.s3 == 1 - Q(1, q), "s3(" + std::to_string(q) + ") = " + s.s3.get_str() + ", claimed " +
                                       mpq_class(1 - Q(1, q)).get_str());
    o.require(s.s3 < 1, "s3 >= 1");
  }
  o.log << "verdict " << to_string(rep.verdict) << '\n';
  o.require(rep.verdict == Verdict::RsConsistent, "verdict");
}

void cusp_ledger(Outcome& o, unsigned threads) {
  const auto cusp = make_scheme("cusp", {"x", "y"}, {"y^2 - x^3"}, 1);
  const auto t = h_sweep(cusp, {PrimePower::make(3, 1), PrimePower::make(5, 1), PrimePower::make(7, 1)}, 2,
                         {RingKind::Mixed, RingKind::Equal}, Engine::Lift, {.threads = threads});
  for (std::uint64_t p : {3, 5, 7})
    for (auto kind : {RingKind::Mixed, RingKind::Equal}) {
      const auto* e = t.find(PrimePower::make(p, 1), 2, kind);
      o.require(e != nullptr, "missing cell");
      if (!e) continue;
      o.log << to_string(kind) << " q=" << p << " h(q,2)=" << e->h << '\n';
      o.require(e->h == 2 - Q(1, static_cast<long>(p)), "h(" + std::to_string(p) + ",2) = " + e->h.get_str());
    }
  const auto rep = rs_report(t);
  mpq_class prev = -1;
  for (const auto& s : rep.stats) {
    o.log << to_string(s.kind) << " q=" << s.q.q << " s3=" << s.s3 << '\n';
    o.require(s.s3 == static_cast<long>(s.q.q) - 1, "s3(" + std::to_string(s.q.q) + ") = " + s.s3.get_str());
    if (s.kind == RingKind::Mixed) {
      o.require(s.s3 > prev, "s3 does not grow");
      prev = s.s3;
    }
  }
  o.log << "verdict " << to_string(rep.verdict) << '\n';
  o.require(rep.verdict == Verdict::NotRs, "verdict is not not-RS");
}

void jet_identity(Outcome& o, unsigned threads) {
  const CountOptions opts{.threads = threads};
  for (const auto& x : corpus())
    for (unsigned m : {0U, 1U, 2U}) {
      const auto j = jet_scheme(x, m);
      for (std::uint64_t p : {2, 3, 5}) {
        const auto q = PrimePower::make(p, 1);
        const auto a = count_points(j, {q, 1, RingKind::Mixed}, Engine::Lift, opts).count;
        const auto b = count_points(x, {q, m + 1, RingKind::Equal}, Engine::Lift, opts).count;
        o.log << x.name << " q=" << p << " m=" << m << " jet=" << a << " ring=" << b << '\n';
        o.require(a == b, x.name + " q=" + std::to_string(p) + " m=" + std::to_string(m));
      }
    }
}

void mixed_equal(Outcome& o, unsigned threads) {
  const CountOptions opts{.threads = threads};
  for (const auto& x : corpus())
    for (std::uint64_t p : {3, 5, 7})
      for (unsigned m = 1; m <= 3; ++m) {
        const auto c = cross_check_rings(x, PrimePower::make(p, 1), m, Engine::Lift, opts);
        o.log << x.name << " q=" << p << " m=" << m << " mixed=" << c.mixed_count << " equal=" << c.equal_count
              << '\n';
        o.require(c.equal, x.name + " q=" + std::to_string(p) + " m=" + std::to_string(m));
      }
}

void igusa_closed_form(Outcome& o, unsigned threads) {
  const auto x0 = make_scheme("x=0", {"x"}, {"x"}, 0);
  const CountOptions opts{.threads = threads};
  for (std::uint64_t p : {3, 5}) {
    const mpq_class c = 1 - Q(1, static_cast<long>(p));
    // (1 - p^-1)/(1 - T), T = p^-(s+1)
    std::vector<mpq_class> expected(kIgusaLength, c);
    const auto z = igusa_Z_series(x0, p, kIgusaLength - 1, opts);
    o.require(z.coeffs == expected, "Z-series p=" + std::to_string(p));
    const auto via_p = igusa_from_P(local_P_series(x0, p, kIgusaLength, opts));
    o.require(via_p.coeffs == expected, "Z-series from P p=" + std::to_string(p));
    const auto fit = pade_fit(z, 4);
    o.require(fit.found && fit.stable, "fit not stable");
    o.require(fit.num == std::vector<mpq_class>{c} && fit.den == std::vector<mpq_class>{1, -1},
              "fit is not (1 - 1/p)/(1 - T)");
    const auto roots = rational_roots(fit.den);
    o.require(roots.size() == 1 && roots[0].second == 1, "denominator root not simple");
    // the P-series 1/(1 - p^-s) has its simple pole at s = 0 = dim
    const auto pfit = pade_fit(local_P_series(x0, p, 9, opts), 3);
    const auto proots = rational_roots(pfit.den);
    const bool simple_zero = pfit.stable && proots.size() == 1 && proots[0].second == 1 &&
                             pole_exponent(proots[0].first, p, SeriesKind::P) == 0;
    o.require(simple_zero, "P-series pole not simple at s = 0");
    o.log << "p=" << p << " Z num [" << fit.num[0] << "] den [1 -1] stable=" << fit.stable << " Z pole s="
          << pole_exponent(roots[0].first, p, SeriesKind::Z).value_or(999) << " P pole s=0 simple=" << simple_zero
          << '\n';
  }
}

void abscissa(Outcome& o, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto a1 = abscissa_estimate(affine_space(1), kAbscissaN, {.threads = threads});
  const auto pt = abscissa_estimate(affine_space(0), kAbscissaN, {.threads = threads});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[128];
  std::snprintf(buf, sizeof buf, "A^1 slope %.6f, point slope %.6f\n", a1.slope, pt.slope);
  o.log << buf;
  o.require(a1.slope >= kAbscissaA1Lo && a1.slope <= kAbscissaA1Hi, "A^1 slope out of range");
  o.require(pt.slope >= kAbscissaPointLo && pt.slope <= kAbscissaPointHi, "point slope out of range");
  o.require(secs < kAbscissaSeconds, "runtime limit");
}

void euler_product(Outcome& o, unsigned threads) {
  const auto e = global_euler_product(affine_space(1), 3.0, 100, 12, Normalization::P, {.threads = threads});
  const double target = M_PI * M_PI / 6;
  char buf[160];
  std::snprintf(buf, sizeof buf, "product %.12f, pi^2/6 %.12f, |diff| %.6f\n", e.value, target,
                std::fabs(e.value - target));
  o.log << buf;
  o.require(std::fabs(e.value - target) < kEulerTolerance, "outside tolerance");
}

FiniteGroup symmetric_group_3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::vector<std::uint32_t>> t(6, std::vector<std::uint32_t>(6));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      t[a][b] = static_cast<std::uint32_t>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return FiniteGroup::from_table(t, "S3");
}

void frobenius_identity(Outcome& o, unsigned threads) {
  const auto mixed = [](std::uint64_t p, unsigned m) { return LocalRingSpec{PrimePower::make(p, 1), m, RingKind::Mixed}; };
  const std::vector<FiniteGroup> groups{symmetric_group_3(), quaternion_group(),
                                        FiniteGroup::special_linear(2, mixed(3, 1)),
                                        FiniteGroup::special_linear(2, mixed(5, 1)),
                                        FiniteGroup::special_linear(2, mixed(3, 2))};
  std::map<std::pair<std::string, unsigned>, mpz_class> counts;
  for (const auto& g : groups) {
    const auto cc = conj_classes(g);
    const auto deg = character_degrees(g, cc);
    o.log << g.name() << " |G|=" << g.order() << " degrees";
    for (auto d : deg.degrees) o.log << ' ' << d;
    o.log << '\n';
    for (unsigned n : {1U, 2U}) {
      const auto lhs = def_count(g, cc, n, threads);
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), g.order(), 2 * n - 1);
      const mpq_class rhs = mpq_class(pw) * rep_zeta_eval(deg, static_cast<long>(2 * n - 2));
      o.log << "  n=" << n << " def_count=" << lhs << " |G|^(2n-1) sum d^-(2n-2)=" << rhs << '\n';
      o.require(mpq_class(lhs) == rhs, g.name() + " n=" + std::to_string(n));
      counts[{g.name(), n}] = lhs;
    }
  }
  o.require(counts[{"S3", 1}] == 18, "S3 n=1");
  o.require(counts[{"S3", 2}] == 486, "S3 n=2");
  o.require(counts[{"SL2(mixed:3^1:1)", 2}] == 53376, "SL2(F3) n=2");
}

void zeta_table(Outcome& o, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t p : {3, 5}) {
    const auto rows = compact_zeta_table(2, p, {1, 2}, 2, 100'000, threads);
    for (const auto& r : rows) {
      o.log << "SL2(Z/" << r.p << "^" << r.m << ") |G|=" << r.order << " zeta(2) frobenius=" << r.frobenius
            << " character=" << r.character << " q(zeta-1)=" << r.q_times_zeta_minus_1 << '\n';
      o.require(r.agree && r.frobenius == r.character, "p=" + std::to_string(p) + " m=" + std::to_string(r.m));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < kZetaTableSeconds, "runtime limit");
}

void word_probabilities(Outcome& o, unsigned threads) {
  const auto g = symmetric_group_3();
  const auto cc = conj_classes(g);
  std::vector<mpq_class> probs;
  mpq_class sum = 0;
  for (GroupElement x = 0; x < 6; ++x) {
    const auto w = word_prob(g, cc, 2, x, threads);
    probs.push_back(w.probability);
    sum += w.probability;
  }
  // brute force over all 6^4 tuples
  std::vector<std::uint64_t> hits(6, 0);
  for (GroupElement a = 0; a < 6; ++a)
    for (GroupElement b = 0; b < 6; ++b)
      for (GroupElement c = 0; c < 6; ++c)
        for (GroupElement d = 0; d < 6; ++d) hits[g.mul(g.commutator(a, b), g.commutator(c, d))]++;
  for (GroupElement x = 0; x < 6; ++x) {
    o.log << "element " << x << " order " << g.element_order(x) << " P=" << probs[x] << '\n';
    o.require(probs[x] == Q(static_cast<long>(hits[x]), 1296), "brute force disagrees at " + std::to_string(x));
    if (g.element_order(x) == 2) o.require(probs[x] == 0, "transposition probability");
  }
  auto sorted = probs;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  o.require(sorted == std::vector<mpq_class>{Q(3, 8), Q(5, 16), Q(5, 16), 0, 0, 0}, "distribution");
  o.require(sum == 1, "sum");
}

void lang_weil(Outcome& o, unsigned threads) {
  const auto x = make_scheme("x^2+y^2=0", {"x", "y"}, {"x^2 + y^2"}, 1);
  const auto est = lang_weil_c(x, {PrimePower::make(5, 1), PrimePower::make(13, 1), PrimePower::make(7, 1),
                                   PrimePower::make(11, 1)},
                               {.threads = threads});
  for (const auto& e : est) {
    const long expected = e.q.q % 4 == 1 ? 2 : 0;
    o.log << "q=" << e.q.q << " count=" << e.count << " c=" << e.c << '\n';
    o.require(e.c == expected, "q=" + std::to_string(e.q.q));
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&, unsigned)> run;
  double limit_seconds = 0;  // 0: no limit
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<unsigned> thread_counts{1, 4, 8};
  int only = 0;
  bool verbose = false;
  std::set<int> known_failures;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--known-failure" && i + 1 < argc) {
      known_failures.insert(std::atoi(argv[++i]));
    } else if (a == "--verbose") {
      verbose = true;
    } else if (a == "--threads-list" && i + 1 < argc) {
      thread_counts.clear();
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) thread_counts.push_back(static_cast<unsigned>(std::stoul(item)));
    } else {
      std::cerr << "usage: acceptance [--threads-list 1,4,8] [--only K] [--verbose] [--known-failure K]...\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "engine equivalence on the corpus, q^(mn) <= 1e6", engine_equivalence, kEngineSeconds},
      {2, "cone ledger h(q,m) = 1 + 1/q - 1/q^2, m = 2..4, RS-consistent", cone_ledger},
      {3, "cusp ledger h(q,2) = 2 - 1/q, s3 = q - 1, not-RS", cusp_ledger},
      {4, "jet identity |Jet_m X(F_q)| = |X(F_q[t]/t^(m+1))|", jet_identity},
      {5, "mixed/equal characteristic counts agree, q in {3,5,7}, m <= 3", mixed_equal},
      {6, "Igusa series of {x=0} and its rational fit", igusa_closed_form},
      {7, "abscissa estimates for A^1 and a point", abscissa, kAbscissaSeconds},
      {8, "Euler product of A^1 at s = 3 near pi^2/6", euler_product},
      {9, "Frobenius identity with Dixon character degrees", frobenius_identity},
      {10, "two-path zeta table for SL2, p in {3,5}, m in {1,2}", zeta_table, kZetaTableSeconds},
      {11, "commutator word probabilities on S3, n = 2", word_probabilities},
      {12, "Lang-Weil constant of x^2 + y^2", lang_weil},
  };

  std::set<int> failed;
  std::map<int, std::vector<std::string>> transcripts;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    for (std::size_t t = 0; t < thread_counts.size(); ++t) {
      Outcome o;
      const auto start = std::chrono::steady_clock::now();
      try {
        c.run(o, thread_counts[t]);
      } catch (const std::exception& e) {
        o.pass = false;
        o.log << "EXCEPTION " << e.what() << '\n';
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
        o.pass = false;
        o.log << "TIME LIMIT " << c.limit_seconds << " s exceeded\n";
      }
      transcripts[c.id].push_back(o.log.str());
      if (t != 0) continue;
      if (!o.pass) failed.insert(c.id);
      char timing[32];
      std::snprintf(timing, sizeof timing, "%.1f s", secs);
      std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.title << " (" << timing << ", threads "
                << thread_counts[0] << ")\n";
      if (verbose || !o.pass) {
        std::istringstream lines(o.log.str());
        std::string line;
        while (std::getline(lines, line))
          if (verbose || line.rfind("MISMATCH", 0) == 0 || line.rfind("EXCEPTION", 0) == 0 ||
              line.rfind("TIME", 0) == 0)
            std::cout << "      " << line << '\n';
      }
      std::cout.flush();
    }
  }

  if (!only || only == 13) {
    bool same = thread_counts.size() >= 2;
    for (const auto& [id, runs] : transcripts)
      for (std::size_t t = 1; t < runs.size(); ++t)
        if (runs[t] != runs[0]) {
          same = false;
          std::cout << "      criterion " << id << " differs between " << thread_counts[0] << " and " << thread_counts[t]
                    << " threads\n";
        }
    std::string list;
    for (auto t : thread_counts) list += (list.empty() ? "" : ",") + std::to_string(t);
    std::cout << (same ? "PASS" : "FAIL") << "  13. determinism: transcripts of criteria 1-12 identical across "
              << list << " threads\n";
    if (!same) failed.insert(13);
  }
  std::cout << (failed.empty() ? "all criteria passed" : std::to_string(failed.size()) + " criteria failed");
  for (int id : failed)
    if (known_failures.count(id)) std::cout << "; criterion " << id << " is a known failure";
  std::cout << '\n';
  std::set<int> expected;
  for (int id : known_failures)
    if (!only || id == only) expected.insert(id);
  return failed == expected ? 0 : 1;
}
