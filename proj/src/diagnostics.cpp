#include "singcount/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "singcount/error.hpp"

namespace singcount {

namespace {

mpq_class abs_q(const mpq_class& a) { return a < 0 ? mpq_class(-a) : a; }

mpz_class nearest(const mpq_class& r) {
  mpq_class shifted = r + mpq_class(1, 2);
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return out;
}

mpq_class power_q(std::uint64_t q, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), q, e);
  return mpq_class(r);
}

double sqrt_q(const mpq_class& a) { return std::sqrt(a.get_d()); }

}  // namespace

const HEntry* HTable::find(const PrimePower& q, unsigned m, RingKind kind) const {
  for (const auto& c : cells)
    if (c.q == q && c.m == m && c.kind == kind && c.entry) return &*c.entry;
  return nullptr;
}

HTable h_sweep(const AffineScheme& x, const std::vector<PrimePower>& qs, unsigned m_max,
               const std::vector<RingKind>& kinds, Engine engine, const CountOptions& opts) {
  x.validate();
  HTable t{x.name, x.declared_dim, x.dim_is_expected, x.flags, {}};
  for (const auto& q : qs)
    for (auto kind : kinds)
      for (unsigned m = 1; m <= m_max; ++m) {
        HCell cell{q, m, kind, std::nullopt, {}};
        try {
          cell.entry = h_value(x, LocalRingSpec{q, m, kind}, engine, opts);
        } catch (const Error& e) {
          cell.error = e.what();
        }
        t.cells.push_back(std::move(cell));
      }
  return t;
}

void write_csv(std::ostream& out, const HTable& table) {
  out << "scheme,q,m,kind,count,h_num,h_den\n";
  for (const auto& c : table.cells) {
    if (!c.entry) continue;
    out << table.scheme << ',' << c.q.q << ',' << c.m << ',' << to_string(c.kind) << ',' << c.entry->count << ','
        << c.entry->h.get_num() << ',' << c.entry->h.get_den() << '\n';
  }
}

LangWeilEstimate lang_weil_estimate(const PrimePower& q, const mpz_class& count, int dim) {
  LangWeilEstimate e{q, count, mpq_class(count) / power_q(q.q, static_cast<unsigned long>(dim)), 0, 0};
  e.ratio.canonicalize();
  e.c = nearest(e.ratio);
  e.residual = abs_q(e.ratio - mpq_class(e.c));
  return e;
}

std::vector<LangWeilEstimate> lang_weil_c(const AffineScheme& x, const std::vector<PrimePower>& qs,
                                          const CountOptions& opts) {
  x.validate();
  std::vector<LangWeilEstimate> out;
  for (const auto& q : qs) {
    const auto r = count_points(x, LocalRingSpec{q, 1, RingKind::Mixed}, Engine::Lift, opts);
    out.push_back(lang_weil_estimate(q, r.count, x.declared_dim));
  }
  return out;
}

double QStats::s1() const { return sqrt_q(s1_squared); }
double QStats::s2() const { return sqrt_q(s2_squared); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::RsConsistent: return "RS-consistent";
    case Verdict::NotRs: return "not-RS";
    case Verdict::HypothesisViolated: return "hypothesis-violated";
    case Verdict::Insufficient: return "insufficient-data";
  }
  return "?";
}

DiagnosticsReport rs_report(const HTable& table, const RsThresholds& thresholds) {
  DiagnosticsReport rep;
  rep.scheme = table.scheme;
  rep.declared_dim = table.declared_dim;
  rep.dim_is_expected = table.dim_is_expected;
  rep.flags = table.flags;

  // (kind, q) -> entries by m
  std::map<std::pair<int, std::uint64_t>, std::vector<const HCell*>> groups;
  for (const auto& c : table.cells)
    if (c.entry) groups[{static_cast<int>(c.kind), c.q.q}].push_back(&c);

  for (const auto& [key, cells] : groups) {
    const HCell* first = nullptr;
    for (const auto* c : cells)
      if (c->m == 1) first = c;
    if (!first) {
      rep.reasons.push_back("q=" + std::to_string(key.second) + ": no residue-field value, skipped");
      continue;
    }
    QStats s;
    s.q = first->q;
    s.kind = first->kind;
    s.h1 = first->entry->h;
    s.c = nearest(s.h1);
    const mpq_class q(static_cast<unsigned long>(s.q.q));
    s.s1_squared = q * (s.h1 - 1) * (s.h1 - 1);
    s.s2_squared = 0;
    s.s3 = 0;
    s.vertical_sup = s.h1;
    for (const auto* c : cells) {
      const mpq_class& h = c->entry->h;
      s.m_tested = std::max(s.m_tested, c->m);
      s.s2_squared = std::max(s.s2_squared, mpq_class(q * (h - 1) * (h - 1)));
      s.s3 = std::max(s.s3, mpq_class(q * abs_q(h - s.h1)));
      s.vertical_sup = std::max(s.vertical_sup, h);
    }
    s.vertical_deviation = abs_q(s.vertical_sup - 1);
    rep.stats.push_back(std::move(s));
  }

  if (rep.stats.empty()) {
    rep.verdict = Verdict::Insufficient;
    rep.reasons.push_back("no computed cells");
    return rep;
  }

  bool violated = false;
  bool not_rs = false;
  for (const auto& s : rep.stats) {
    const std::string where = std::string(to_string(s.kind)) + " q=" + std::to_string(s.q.q);
    if (s.c != 1) {
      violated = true;
      rep.reasons.push_back(where + ": c_X(q) = " + s.c.get_str() + " != 1");
    }
    if (s.s3 > thresholds.s3_max) {
      not_rs = true;
      rep.reasons.push_back(where + ": s3 = " + s.s3.get_str() + " exceeds " + thresholds.s3_max.get_str());
    }
  }
  for (std::size_t i = 1; i < rep.stats.size(); ++i) {
    const auto& prev = rep.stats[i - 1];
    const auto& cur = rep.stats[i];
    if (prev.kind != cur.kind) continue;
    if (cur.vertical_deviation > prev.vertical_deviation) {
      not_rs = true;
      rep.reasons.push_back(std::string(to_string(cur.kind)) + ": |sup_m h - 1| grows from " +
                            prev.vertical_deviation.get_str() + " at q=" + std::to_string(prev.q.q) + " to " +
                            cur.vertical_deviation.get_str() + " at q=" + std::to_string(cur.q.q));
    }
  }
  if (violated)
    rep.verdict = Verdict::HypothesisViolated;
  else if (not_rs)
    rep.verdict = Verdict::NotRs;
  else
    rep.verdict = Verdict::RsConsistent;
  return rep;
}

}  // namespace singcount
