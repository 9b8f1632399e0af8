#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "singcount/counting.hpp"

namespace singcount {

enum class SeriesKind {
  P,  ///< c_n = |X(Z/p^n)|, variable T = p^-s
  Z   ///< Igusa series, variable T = p^-(s+1)
};

std::string_view to_string(SeriesKind k);

struct LocalSeries {
  std::string scheme;
  std::uint64_t p = 0;
  int dim = 0;
  SeriesKind kind = SeriesKind::P;
  std::vector<mpq_class> coeffs;

  /// Truncated sum at real s, in double precision.
  double evaluate(double s) const;
};

/// c_0 = 1, c_n = |X(Z/p^n)| for 1 <= n <= m_max.
LocalSeries local_P_series(const AffineScheme& x, std::uint64_t p, unsigned m_max, const CountOptions& opts = {});

/// a_0..a_{m_max} with a_n = h(p^n) - h(p^{n+1}) / p and h(p^0) = 1; counts to level m_max + 1.
LocalSeries igusa_Z_series(const AffineScheme& x, std::uint64_t p, unsigned m_max, const CountOptions& opts = {});

/// Igusa series from a P-series by expanding (1 - p^s) P(s + d + 1) + p^s as a
/// Laurent series in T = p^-(s+1). Loses the last coefficient of the input;
/// throws Error if the T^-1 terms fail to cancel.
LocalSeries igusa_from_P(const LocalSeries& p_series);

/// N(T)/D(T) with D(0) = 1, exact rational coefficients, low degree first.
struct RationalFit {
  bool found = false;
  std::vector<mpq_class> num;
  std::vector<mpq_class> den;
  std::size_t match_length = 0;  ///< coefficients used to determine the fit
  std::size_t holdout = 0;       ///< further coefficients checked for stability
  bool stable = false;

  /// Coefficient of T^k in the expansion of N/D.
  std::vector<mpq_class> expand(std::size_t length) const;
};

/// Minimal total degree fit with deg N, deg D <= max_deg matching the first
/// (length - holdout) coefficients; stable iff it also matches the rest.
/// Requires length >= 2 * max_deg + 2 and holdout >= 1.
RationalFit pade_fit(const std::vector<mpq_class>& coeffs, unsigned max_deg, std::size_t holdout = 2);
RationalFit pade_fit(const LocalSeries& series, unsigned max_deg, std::size_t holdout = 2);

/// Rational roots of a polynomial (low degree first) with multiplicities.
std::vector<std::pair<mpq_class, unsigned>> rational_roots(const std::vector<mpq_class>& poly);

/// Exact s with p^-s = r (P) or p^-(s+1) = r (Z) for a root r = p^k; nullopt otherwise.
std::optional<long> pole_exponent(const mpq_class& root, std::uint64_t p, SeriesKind kind);

/// |X(Z/n)| for 1 <= n <= N (index 0 unused), from prime-power counts.
std::vector<mpz_class> counts_up_to(const AffineScheme& x, std::uint64_t N, const CountOptions& opts = {});

struct AbscissaEstimate {
  std::uint64_t N = 0;
  double slope = 0;
  /// log S(n) / log n at n = 2, 4, 8, ... and N, where S(n) = sum_{k <= n} |X(Z/k)|.
  std::vector<std::pair<std::uint64_t, double>> partial_exponents;
};

/// Least-squares slope of log S(n) against log n over N/2 <= n <= N.
AbscissaEstimate abscissa_estimate(const AffineScheme& x, std::uint64_t N, const CountOptions& opts = {});
AbscissaEstimate abscissa_from_counts(const std::vector<mpz_class>& counts);

/// Running means (1/n) sum_{k <= n} k^-d |X(Z/k)| for n = 1..N.
std::vector<mpq_class> cesaro_mean(const AffineScheme& x, std::uint64_t N, const CountOptions& opts = {});
std::vector<mpq_class> cesaro_from_counts(const std::vector<mpz_class>& counts, int dim);

enum class Normalization { P, Z };

struct EulerProduct {
  double value = 1.0;
  std::vector<std::uint64_t> primes;
  std::vector<double> factors;
  bool divergence_warning = false;
  std::string note;
};

/// Product over p <= p_max of the local factor truncated at level m_max:
/// P_{X,p}(s), or Z_{X,p}(s) / Z_{X,p}(infinity). Requires s > dim + 1.
EulerProduct global_euler_product(const AffineScheme& x, double s, std::uint64_t p_max, unsigned m_max,
                                  Normalization norm = Normalization::P, const CountOptions& opts = {});

std::vector<std::uint64_t> primes_up_to(std::uint64_t n);

}  // namespace singcount
