#include "singcount/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "singcount/error.hpp"
#include "singcount/parallel.hpp"

namespace singcount {

namespace {

mpz_class pow_ui(std::uint64_t base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

double log_mpz(const mpz_class& a) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, a.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

double to_double(const mpq_class& a) {
  if (a == 0) return 0.0;
  const double sign = a < 0 ? -1.0 : 1.0;
  const mpz_class num = abs(a.get_num());
  return sign * std::exp(log_mpz(num) - log_mpz(a.get_den()));
}

mpz_class count_Zpk(const AffineScheme& x, std::uint64_t p, unsigned k, const CountOptions& opts) {
  if (k == 0) return 1;
  return count_points(x, LocalRingSpec{PrimePower::make(p, 1), k, RingKind::Mixed}, Engine::Lift, opts).count;
}

// Solves A y = b (rows of A given densely) over Q; free unknowns are set to 0.
std::optional<std::vector<mpq_class>> solve_linear(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b,
                                                   std::size_t unknowns) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < unknowns && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[row]);
    std::swap(b[piv], b[row]);
    const mpq_class inv = 1 / a[row][col];
    for (std::size_t j = col; j < unknowns; ++j) a[row][j] *= inv;
    b[row] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const mpq_class f = a[r][col];
      for (std::size_t j = col; j < unknowns; ++j) a[r][j] -= f * a[row][j];
      b[r] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < rows; ++r)
    if (b[r] != 0) return std::nullopt;
  std::vector<mpq_class> y(unknowns, 0);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) y[pivot_col[r]] = b[r];
  return y;
}

void trim(std::vector<mpq_class>& v) {
  while (v.size() > 1 && v.back() == 0) v.pop_back();
}

mpq_class eval_poly_q(const std::vector<mpq_class>& poly, const mpq_class& t) {
  mpq_class acc = 0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = acc * t + poly[i];
  return acc;
}

std::vector<mpz_class> divisors(mpz_class n) {
  n = abs(n);
  std::vector<std::pair<mpz_class, unsigned>> factors;
  for (unsigned long d = 2; d < 1'000'000 && mpz_class(d) * d <= n; ++d) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), d) == 0) continue;
    unsigned k = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
      n /= d;
      ++k;
    }
    factors.emplace_back(d, k);
  }
  if (n > 1) {
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) throw Error("cannot factor " + n.get_str() + " for root search");
    factors.emplace_back(n, 1);
  }
  std::vector<mpz_class> out{1};
  for (const auto& [f, k] : factors) {
    const std::size_t base = out.size();
    mpz_class pw = 1;
    for (unsigned i = 1; i <= k; ++i) {
      pw *= f;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pw);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(SeriesKind k) { return k == SeriesKind::P ? "P" : "Z"; }

double LocalSeries::evaluate(double s) const {
  const double t = kind == SeriesKind::P ? std::pow(static_cast<double>(p), -s) : std::pow(static_cast<double>(p), -(s + 1));
  double acc = 0, tn = 1;
  for (const auto& c : coeffs) {
    acc += to_double(c) * tn;
    tn *= t;
  }
  return acc;
}

LocalSeries local_P_series(const AffineScheme& x, std::uint64_t p, unsigned m_max, const CountOptions& opts) {
  x.validate();
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  LocalSeries s{x.name, p, x.declared_dim, SeriesKind::P, {}};
  for (unsigned n = 0; n <= m_max; ++n) s.coeffs.emplace_back(count_Zpk(x, p, n, opts));
  return s;
}

LocalSeries igusa_Z_series(const AffineScheme& x, std::uint64_t p, unsigned m_max, const CountOptions& opts) {
  x.validate();
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  const unsigned long d = static_cast<unsigned long>(x.declared_dim);
  std::vector<mpq_class> h;
  for (unsigned n = 0; n <= m_max + 1; ++n) {
    mpq_class v(count_Zpk(x, p, n, opts), pow_ui(p, d * n));
    v.canonicalize();
    h.push_back(v);
  }
  LocalSeries s{x.name, p, x.declared_dim, SeriesKind::Z, {}};
  const mpq_class inv_p(1, static_cast<unsigned long>(p));
  for (unsigned n = 0; n <= m_max; ++n) s.coeffs.push_back(h[n] - h[n + 1] * inv_p);
  return s;
}

LocalSeries igusa_from_P(const LocalSeries& ps) {
  if (ps.kind != SeriesKind::P) throw DomainError("expected a P-series");
  if (ps.coeffs.size() < 2) throw DomainError("P-series too short");
  const std::size_t len = ps.coeffs.size();
  const unsigned long d = static_cast<unsigned long>(ps.dim);
  const mpq_class inv_p(1, static_cast<unsigned long>(ps.p));
  // P(s + d + 1) in T = p^-(s+1): coefficient n is c_n p^(-nd).
  // Laurent series stored with offset 1: index i holds T^(i-1).
  std::vector<mpq_class> shifted(len + 1, 0);
  for (std::size_t n = 0; n < len; ++n) {
    mpq_class v(ps.coeffs[n] / mpq_class(pow_ui(ps.p, d * n)));
    v.canonicalize();
    shifted[n + 1] = v;
  }
  // (1 - p^s) = 1 - p^-1 T^-1; multiply, then add p^s = p^-1 T^-1.
  std::vector<mpq_class> prod(len + 1, 0);
  for (std::size_t i = 0; i < len + 1; ++i) {
    prod[i] += shifted[i];
    if (i + 1 < len + 1) prod[i] -= inv_p * shifted[i + 1];
  }
  prod[0] += inv_p;
  if (prod[0] != 0) throw Error("T^-1 terms do not cancel (c_0 != 1?)");
  LocalSeries z{ps.scheme, ps.p, ps.dim, SeriesKind::Z, {}};
  // index len would need c_len, which is not available
  for (std::size_t i = 1; i < len; ++i) z.coeffs.push_back(prod[i]);
  return z;
}

std::vector<mpq_class> RationalFit::expand(std::size_t length) const {
  std::vector<mpq_class> e(length, 0);
  for (std::size_t k = 0; k < length; ++k) {
    mpq_class v = k < num.size() ? num[k] : mpq_class(0);
    for (std::size_t j = 1; j < den.size() && j <= k; ++j) v -= den[j] * e[k - j];
    e[k] = v;
  }
  return e;
}

RationalFit pade_fit(const std::vector<mpq_class>& a, unsigned max_deg, std::size_t holdout) {
  if (holdout == 0) throw DomainError("holdout must be at least 1");
  if (a.size() < 2 * static_cast<std::size_t>(max_deg) + 2)
    throw DomainError("series of length " + std::to_string(a.size()) + " too short for degree " +
                      std::to_string(max_deg) + " (need " + std::to_string(2 * max_deg + 2) + ")");
  if (a.size() <= holdout) throw DomainError("holdout leaves no coefficients to fit");
  const std::size_t train = a.size() - holdout;
  RationalFit fit;
  fit.match_length = train;
  fit.holdout = holdout;
  for (unsigned total = 0; total <= 2 * max_deg && !fit.found; ++total) {
    for (unsigned dd = 0; dd <= std::min(total, max_deg) && !fit.found; ++dd) {
      const unsigned dn = total - dd;
      if (dn > max_deg) continue;
      // sum_{j=1..dd} d_j a_{k-j} = -a_k for dn < k < train
      std::vector<std::vector<mpq_class>> rows;
      std::vector<mpq_class> rhs;
      for (std::size_t k = dn + 1; k < train; ++k) {
        std::vector<mpq_class> row(dd, 0);
        for (unsigned j = 1; j <= dd; ++j)
          if (j <= k) row[j - 1] = a[k - j];
        rows.push_back(std::move(row));
        rhs.push_back(-a[k]);
      }
      auto sol = solve_linear(rows, rhs, dd);
      if (!sol) continue;
      fit.den.assign(1, 1);
      for (const auto& v : *sol) fit.den.push_back(v);
      fit.num.assign(dn + 1, 0);
      for (std::size_t k = 0; k <= dn; ++k)
        for (std::size_t j = 0; j < fit.den.size() && j <= k; ++j) fit.num[k] += fit.den[j] * a[k - j];
      trim(fit.num);
      trim(fit.den);
      fit.found = true;
    }
  }
  if (fit.found) {
    const auto e = fit.expand(a.size());
    fit.stable = std::equal(e.begin(), e.end(), a.begin());
  }
  return fit;
}

RationalFit pade_fit(const LocalSeries& series, unsigned max_deg, std::size_t holdout) {
  return pade_fit(series.coeffs, max_deg, holdout);
}

std::vector<std::pair<mpq_class, unsigned>> rational_roots(const std::vector<mpq_class>& poly_in) {
  std::vector<mpq_class> poly = poly_in;
  trim(poly);
  std::vector<std::pair<mpq_class, unsigned>> out;
  if (poly.size() <= 1) return out;
  unsigned zero_mult = 0;
  while (poly.size() > 1 && poly.front() == 0) {
    poly.erase(poly.begin());
    ++zero_mult;
  }
  if (zero_mult) out.emplace_back(0, zero_mult);
  if (poly.size() <= 1) return out;
  mpz_class lcm = 1;
  for (const auto& c : poly) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> ints;
  for (const auto& c : poly) ints.push_back(mpz_class(c * lcm));
  std::vector<mpq_class> candidates;
  for (const auto& u : divisors(ints.front()))
    for (const auto& v : divisors(ints.back())) {
      mpq_class r(u, v);
      r.canonicalize();
      candidates.push_back(r);
      candidates.push_back(-r);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (const auto& r : candidates) {
    unsigned mult = 0;
    std::vector<mpq_class> cur = poly;
    while (cur.size() > 1 && eval_poly_q(cur, r) == 0) {
      // synthetic division by (T - r)
      std::vector<mpq_class> q(cur.size() - 1, 0);
      mpq_class carry = 0;
      for (std::size_t i = cur.size(); i-- > 1;) {
        carry = cur[i] + carry * r;
        q[i - 1] = carry;
      }
      cur = std::move(q);
      ++mult;
    }
    if (mult) out.emplace_back(r, mult);
  }
  return out;
}

std::optional<long> pole_exponent(const mpq_class& root, std::uint64_t p, SeriesKind kind) {
  if (root <= 0) return std::nullopt;
  // root = p^k
  mpz_class num = root.get_num(), den = root.get_den();
  long k = 0;
  while (num > 1 && mpz_divisible_ui_p(num.get_mpz_t(), p)) {
    num /= p;
    ++k;
  }
  while (den > 1 && mpz_divisible_ui_p(den.get_mpz_t(), p)) {
    den /= p;
    --k;
  }
  if (num != 1 || den != 1) return std::nullopt;
  return kind == SeriesKind::P ? -k : -k - 1;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

std::vector<mpz_class> counts_up_to(const AffineScheme& x, std::uint64_t N, const CountOptions& opts) {
  x.validate();
  std::vector<mpz_class> f(N + 1, 0);
  if (N == 0) return f;
  std::vector<std::uint64_t> spf(N + 1, 0);
  for (std::uint64_t i = 2; i <= N; ++i)
    if (spf[i] == 0)
      for (std::uint64_t j = i; j <= N; j += i)
        if (spf[j] == 0) spf[j] = i;
  f[1] = 1;
  for (std::uint64_t n = 2; n <= N; ++n) {
    const std::uint64_t p = spf[n];
    std::uint64_t rest = n;
    unsigned k = 0;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    f[n] = rest == 1 ? count_Zpk(x, p, k, opts) : mpz_class(f[n / rest] * f[rest]);
  }
  return f;
}

AbscissaEstimate abscissa_from_counts(const std::vector<mpz_class>& counts) {
  if (counts.size() < 3) throw DomainError("need counts up to at least N = 2");
  const std::uint64_t N = counts.size() - 1;
  AbscissaEstimate est;
  est.N = N;
  std::vector<double> log_s(N + 1, 0);
  mpz_class acc = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    acc += counts[n];
    if (acc <= 0) throw DomainError("partial sum vanishes at n = " + std::to_string(n));
    log_s[n] = log_mpz(acc);
  }
  for (std::uint64_t n = 2; n <= N; n *= 2) est.partial_exponents.emplace_back(n, log_s[n] / std::log(double(n)));
  if (est.partial_exponents.empty() || est.partial_exponents.back().first != N)
    est.partial_exponents.emplace_back(N, log_s[N] / std::log(double(N)));
  const std::uint64_t lo = std::max<std::uint64_t>(2, (N + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = 0;
  for (std::uint64_t n = lo; n <= N; ++n) {
    const double lx = std::log(double(n));
    sx += lx;
    sy += log_s[n];
    sxx += lx * lx;
    sxy += lx * log_s[n];
    cnt += 1;
  }
  const double denom = cnt * sxx - sx * sx;
  if (denom <= 0) throw DomainError("N too small for a slope estimate");
  est.slope = (cnt * sxy - sx * sy) / denom;
  return est;
}

AbscissaEstimate abscissa_estimate(const AffineScheme& x, std::uint64_t N, const CountOptions& opts) {
  return abscissa_from_counts(counts_up_to(x, N, opts));
}

std::vector<mpq_class> cesaro_from_counts(const std::vector<mpz_class>& counts, int dim) {
  std::vector<mpq_class> means;
  mpq_class acc = 0;
  for (std::size_t n = 1; n < counts.size(); ++n) {
    mpq_class h(counts[n], pow_ui(n, static_cast<unsigned long>(dim)));
    h.canonicalize();
    acc += h;
    mpq_class mean = acc / mpq_class(static_cast<unsigned long>(n));
    means.push_back(mean);
  }
  return means;
}

std::vector<mpq_class> cesaro_mean(const AffineScheme& x, std::uint64_t N, const CountOptions& opts) {
  return cesaro_from_counts(counts_up_to(x, N, opts), x.declared_dim);
}

EulerProduct global_euler_product(const AffineScheme& x, double s, std::uint64_t p_max, unsigned m_max,
                                  Normalization norm, const CountOptions& opts) {
  x.validate();
  if (!(s > x.declared_dim + 1))
    throw DomainError("s must exceed dim + 1 = " + std::to_string(x.declared_dim + 1));
  EulerProduct out;
  out.primes = primes_up_to(p_max);
  out.factors.assign(out.primes.size(), 1.0);
  CountOptions inner = opts;
  inner.threads = 1;
  // the Z route counts one level deeper
  const unsigned extra = norm == Normalization::Z ? 1 : 0;
  std::vector<unsigned> levels(out.primes.size());
  for (std::size_t i = 0; i < out.primes.size(); ++i) {
    unsigned fit = 0;
    for (unsigned __int128 v = out.primes[i]; v < (static_cast<unsigned __int128>(1) << kMaxRingBits); v *= out.primes[i]) ++fit;
    levels[i] = std::min(m_max, fit > extra ? fit - extra : 0U);
  }
  parallel_for(std::max(1U, opts.threads), out.primes.size(), [&](unsigned, std::size_t i) {
    const std::uint64_t p = out.primes[i];
    if (norm == Normalization::P) {
      out.factors[i] = local_P_series(x, p, levels[i], inner).evaluate(s);
    } else {
      const auto z = igusa_Z_series(x, p, levels[i], inner);
      if (z.coeffs.front() == 0) throw Error("Z_{X," + std::to_string(p) + "}(infinity) vanishes");
      out.factors[i] = z.evaluate(s) / to_double(z.coeffs.front());
    }
  });
  for (double f : out.factors) out.value *= f;
  const std::size_t half = out.factors.size() / 2;
  if (half >= 1) {
    double early = 0, late = 0;
    for (std::size_t i = 0; i < out.factors.size(); ++i)
      (i < half ? early : late) = std::max(i < half ? early : late, std::fabs(out.factors[i] - 1.0));
    out.divergence_warning = late > early;
  }
  const unsigned lowest = levels.empty() ? m_max : *std::min_element(levels.begin(), levels.end());
  out.note = "local factors truncated at level " + std::to_string(m_max) +
             (lowest < m_max ? " (down to " + std::to_string(lowest) + " where p^m exceeds 2^62)" : std::string()) +
             ", primes <= " + std::to_string(p_max) + "; pointwise at real s, no continuation";
  return out;
}

}  // namespace singcount
