#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "singcount/counting.hpp"

namespace singcount {

/// One (q, m, kind) cell of a sweep. A cell whose count failed (budget, ...)
/// keeps the error text instead of an entry.
struct HCell {
  PrimePower q;
  unsigned m = 1;
  RingKind kind = RingKind::Mixed;
  std::optional<HEntry> entry;
  std::string error;
};

struct HTable {
  std::string scheme;
  int declared_dim = 0;
  bool dim_is_expected = false;
  SchemeFlags flags;
  std::vector<HCell> cells;

  const HEntry* find(const PrimePower& q, unsigned m, RingKind kind) const;
};

/// h_X over every q in `qs`, m in [1, m_max] and every kind. Cells are filled
/// in (q, kind, m) order; failures are recorded, not thrown.
HTable h_sweep(const AffineScheme& x, const std::vector<PrimePower>& qs, unsigned m_max,
               const std::vector<RingKind>& kinds = {RingKind::Mixed, RingKind::Equal}, Engine engine = Engine::Lift,
               const CountOptions& opts = {});

void write_csv(std::ostream& out, const HTable& table);

struct LangWeilEstimate {
  PrimePower q;
  mpz_class count;
  mpq_class ratio;     // |X(F_q)| / q^d
  mpz_class c;         // nearest integer to ratio, ties rounded up
  mpq_class residual;  // |ratio - c|
};

LangWeilEstimate lang_weil_estimate(const PrimePower& q, const mpz_class& count, int dim);
std::vector<LangWeilEstimate> lang_weil_c(const AffineScheme& x, const std::vector<PrimePower>& qs,
                                          const CountOptions& opts = {});

/// Statistics for one residue field size and ring kind. s1 and s2 carry a
/// square root, so their squares are kept exactly.
struct QStats {
  PrimePower q;
  RingKind kind = RingKind::Mixed;
  unsigned m_tested = 0;
  mpq_class h1;
  mpz_class c;            // nearest integer to h1
  mpq_class s1_squared;   // q (h(q,1) - 1)^2
  mpq_class s2_squared;   // max_m q (h(q,m) - 1)^2
  mpq_class s3;           // max_m q |h(q,m) - h(q,1)|
  mpq_class vertical_sup; // max_m h(q,m) over the tested m
  mpq_class vertical_deviation;  // |vertical_sup - 1|

  double s1() const;
  double s2() const;
};

enum class Verdict { RsConsistent, NotRs, HypothesisViolated, Insufficient };
std::string_view to_string(Verdict v);

struct RsThresholds {
  mpq_class s3_max = 10;
};

struct DiagnosticsReport {
  std::string scheme;
  int declared_dim = 0;
  bool dim_is_expected = false;
  SchemeFlags flags;
  std::vector<QStats> stats;  // sorted by (kind, q)
  Verdict verdict = Verdict::Insufficient;
  std::vector<std::string> reasons;
  static constexpr std::string_view kLabel = "empirical; hypotheses user-asserted, tested m-range only";
};

/// Verdicts:
///  - HypothesisViolated if some tested F_q gives c_X(q) != 1 (more or fewer
///    than one geometric component, so h does not measure singularities).
///  - NotRs if some s3(q) exceeds the threshold, or the vertical deviation
///    |sup_m h(q,m) - 1| grows between consecutive tested q of one kind.
///  - Insufficient if no cell was computed.
///  - RsConsistent otherwise.
DiagnosticsReport rs_report(const HTable& table, const RsThresholds& thresholds = {});

}  // namespace singcount
