#include "singcount/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "singcount/cache.hpp"
#include "singcount/counting.hpp"
#include "singcount/diagnostics.hpp"
#include "singcount/error.hpp"
#include "singcount/groups.hpp"
#include "singcount/schemes.hpp"
#include "singcount/zeta.hpp"

namespace singcount {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Format { Text, Json, Csv };

struct Options {
  std::string scheme;
  std::string ring;
  std::string format = "text";
  std::uint64_t budget = 100'000'000;
  std::uint64_t node_budget = 200'000'000;
  std::uint64_t group_budget = 100'000;
  unsigned threads = 1;
  std::string cache;
  std::uint64_t p = 0;
  std::uint64_t p_max = 0;
  unsigned m = 1;
  unsigned m_max = 0;
  std::string q_list;
  std::string kinds = "mixed,equal";
  unsigned n = 0;
  std::optional<double> s;
  std::uint64_t N = 0;
  std::string engine = "lift";
  std::string type;
  std::optional<unsigned> dim;
  std::string table;
  std::string group;
  unsigned d = 2;
  unsigned max_deg = 4;
  std::size_t holdout = 2;
  std::string norm = "P";
  std::string route = "group";
  std::optional<GroupElement> element;
};

Format format_of(const Options& o, std::initializer_list<Format> allowed) {
  Format f;
  if (o.format == "text")
    f = Format::Text;
  else if (o.format == "json")
    f = Format::Json;
  else if (o.format == "csv")
    f = Format::Csv;
  else
    throw UsageError("unknown format '" + o.format + "'");
  for (auto a : allowed)
    if (a == f) return f;
  throw UsageError("format '" + o.format + "' is not available for this subcommand");
}

template <class T>
const T& need(const std::optional<T>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required option ") + flag);
  return *v;
}

void need_set(bool set, const char* flag) {
  if (!set) throw UsageError(std::string("missing required option ") + flag);
}

std::string q_str(const mpq_class& v) { return v.get_str(); }
std::string z_str(const mpz_class& v) { return v.get_str(); }

std::string d_str(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

Json q_list_json(const std::vector<mpq_class>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(q_str(x));
  return a;
}

std::string join_q(const std::vector<mpq_class>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + q_str(v[i]);
  return s;
}

std::vector<std::uint64_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad entry '") + item + "' in " + flag);
    }
  }
  if (out.empty()) throw UsageError(std::string("empty list for ") + flag);
  return out;
}

std::vector<PrimePower> q_values(const Options& o) {
  need_set(!o.q_list.empty(), "--q-list");
  std::vector<PrimePower> out;
  for (auto q : parse_list(o.q_list, "--q-list")) out.push_back(PrimePower::from_value(q));
  return out;
}

std::vector<RingKind> kind_values(const Options& o) {
  std::vector<RingKind> out;
  std::stringstream ss(o.kinds);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "mixed")
      out.push_back(RingKind::Mixed);
    else if (item == "equal")
      out.push_back(RingKind::Equal);
    else
      throw UsageError("unknown ring kind '" + item + "'");
  }
  return out;
}

struct Context {
  Options o;
  std::unique_ptr<FileCountCache> cache;
  std::ostream* out;
  std::ostream* err;

  CountOptions count_options() const {
    CountOptions c;
    c.budget = o.budget;
    c.node_budget = o.node_budget;
    c.threads = std::max(1U, o.threads);
    c.cache = cache.get();
    return c;
  }
  AffineScheme scheme() const {
    need_set(!o.scheme.empty(), "--scheme");
    return load_scheme_file(o.scheme);
  }
  LocalRingSpec ring() const {
    need_set(!o.ring.empty(), "--ring");
    return LocalRingSpec::parse(o.ring);
  }
  Engine engine() const {
    try {
      return parse_engine(o.engine);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  FiniteGroup group() const {
    const int chosen = !o.table.empty() + !o.group.empty() + !o.ring.empty();
    if (chosen != 1) throw UsageError("choose exactly one of --table, --group, --ring");
    if (!o.table.empty()) {
      std::ifstream in(o.table);
      if (!in) throw DomainError("cannot open group table " + o.table);
      return read_group_table(in, o.table);
    }
    if (!o.group.empty()) {
      if (o.group == "Q8") return quaternion_group();
      if (o.group == "S3") return FiniteGroup::special_linear(2, LocalRingSpec::parse("mixed:2^1:1"), o.group_budget);
      throw UsageError("unknown group '" + o.group + "' (known: Q8, S3)");
    }
    return FiniteGroup::special_linear(o.d, ring(), o.group_budget);
  }
  std::ostream& os() const { return *out; }
};

// ---------------------------------------------------------------------------

void cmd_count(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  const auto spec = c.ring();
  const auto r = count_points(x, spec, c.engine(), c.count_options());
  if (f == Format::Text) {
    c.os() << r.count << '\n';
  } else if (f == Format::Csv) {
    c.os() << "scheme,ring,engine,count\n" << x.name << ',' << spec.to_string() << ',' << to_string(r.engine) << ','
           << r.count << '\n';
  } else {
    Json j;
    j["scheme"] = x.name;
    j["ring"] = spec.to_string();
    j["engine"] = to_string(r.engine);
    j["count"] = z_str(r.count);
    c.os() << j.dump() << '\n';
  }
}

void cmd_h(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  const auto spec = c.ring();
  const auto e = h_value(x, spec, c.engine(), c.count_options());
  if (f == Format::Text) {
    c.os() << e.h << '\n';
  } else if (f == Format::Csv) {
    c.os() << "scheme,q,m,kind,count,h_num,h_den\n"
           << x.name << ',' << e.q.q << ',' << e.m << ',' << to_string(e.kind) << ',' << e.count << ','
           << e.h.get_num() << ',' << e.h.get_den() << '\n';
  } else {
    Json j;
    j["scheme"] = x.name;
    j["ring"] = spec.to_string();
    j["declared_dim"] = x.declared_dim;
    j["count"] = z_str(e.count);
    j["h"] = q_str(e.h);
    c.os() << j.dump() << '\n';
  }
}

void cmd_jet(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  const auto j = jet_scheme(x, c.o.m);
  if (c.o.q_list.empty()) {
    if (f == Format::Csv) throw UsageError("csv output of jet needs --q-list");
    c.os() << scheme_to_json(j).dump(f == Format::Text ? 2 : -1) << '\n';
    return;
  }
  struct Row {
    PrimePower q;
    mpz_class jet, ring;
  };
  std::vector<Row> rows;
  for (const auto& q : q_values(c.o)) {
    const auto a = count_points(j, LocalRingSpec{q, 1, RingKind::Mixed}, c.engine(), c.count_options()).count;
    const auto b = count_points(x, LocalRingSpec{q, c.o.m + 1, RingKind::Equal}, c.engine(), c.count_options()).count;
    rows.push_back({q, a, b});
  }
  if (f == Format::Csv) {
    c.os() << "scheme,q,m,jet_count,ring_count,equal\n";
    for (const auto& r : rows)
      c.os() << x.name << ',' << r.q.q << ',' << c.o.m << ',' << r.jet << ',' << r.ring << ','
             << (r.jet == r.ring ? "true" : "false") << '\n';
  } else if (f == Format::Json) {
    Json a = Json::array();
    for (const auto& r : rows)
      a.push_back({{"q", r.q.q}, {"m", c.o.m}, {"jet_count", z_str(r.jet)}, {"ring_count", z_str(r.ring)},
                   {"equal", r.jet == r.ring}});
    c.os() << Json{{"scheme", x.name}, {"rows", a}}.dump() << '\n';
  } else {
    for (const auto& r : rows)
      c.os() << "q=" << r.q.q << " m=" << c.o.m << " |Jet_m(F_q)|=" << r.jet << " |X(F_q[t]/t^" << c.o.m + 1
             << ")|=" << r.ring << (r.jet == r.ring ? " equal" : " DIFFER") << '\n';
  }
}

void cmd_diagnose(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.m_max > 0, "--m-max");
  const auto table = h_sweep(x, q_values(c.o), c.o.m_max, kind_values(c.o), c.engine(), c.count_options());
  for (const auto& cell : table.cells)
    if (!cell.entry)
      *c.err << "warning: " << to_string(cell.kind) << " q=" << cell.q.q << " m=" << cell.m << ": " << cell.error
             << '\n';
  if (f == Format::Csv) {
    write_csv(c.os(), table);
    return;
  }
  const auto rep = rs_report(table);
  if (f == Format::Json) {
    Json j;
    j["scheme"] = rep.scheme;
    j["declared_dim"] = rep.declared_dim;
    j["dim_is_expected"] = rep.dim_is_expected;
    j["hypotheses"] = {{"lci", rep.flags.lci},
                       {"reduced", rep.flags.reduced},
                       {"abs_irreducible", rep.flags.abs_irreducible},
                       {"status", "user-asserted"}};
    j["label"] = DiagnosticsReport::kLabel;
    Json cells = Json::array();
    for (const auto& cell : table.cells) {
      Json e{{"q", cell.q.q}, {"m", cell.m}, {"kind", to_string(cell.kind)}};
      if (cell.entry) {
        e["count"] = z_str(cell.entry->count);
        e["h"] = q_str(cell.entry->h);
      } else {
        e["error"] = cell.error;
      }
      cells.push_back(e);
    }
    j["cells"] = cells;
    Json stats = Json::array();
    for (const auto& s : rep.stats)
      stats.push_back({{"kind", to_string(s.kind)},
                       {"q", s.q.q},
                       {"m_tested", s.m_tested},
                       {"h1", q_str(s.h1)},
                       {"c", z_str(s.c)},
                       {"s1_squared", q_str(s.s1_squared)},
                       {"s2_squared", q_str(s.s2_squared)},
                       {"s3", q_str(s.s3)},
                       {"vertical_sup", q_str(s.vertical_sup)}});
    j["stats"] = stats;
    j["verdict"] = to_string(rep.verdict);
    j["reasons"] = rep.reasons;
    c.os() << j.dump() << '\n';
    return;
  }
  auto& os = c.os();
  os << "scheme " << rep.scheme << ", " << (rep.dim_is_expected ? "expected" : "declared") << " dim "
     << rep.declared_dim << '\n';
  os << "hypotheses (user-asserted): lci=" << rep.flags.lci << " reduced=" << rep.flags.reduced
     << " abs_irreducible=" << rep.flags.abs_irreducible << '\n';
  os << "label: " << DiagnosticsReport::kLabel << '\n';
  for (const auto& cell : table.cells)
    if (cell.entry)
      os << "  " << to_string(cell.kind) << " q=" << cell.q.q << " m=" << cell.m << " count=" << cell.entry->count
         << " h=" << cell.entry->h << '\n';
  for (const auto& s : rep.stats)
    os << to_string(s.kind) << " q=" << s.q.q << ": c=" << s.c << " s1^2=" << s.s1_squared
       << " s2^2=" << s.s2_squared << " s3=" << s.s3 << " sup_m h=" << s.vertical_sup << " (m<=" << s.m_tested
       << ")\n";
  os << "verdict: " << to_string(rep.verdict) << '\n';
  for (const auto& r : rep.reasons) os << "  " << r << '\n';
}

void emit_series(const Context& c, Format f, const LocalSeries& series) {
  const auto fit = series.coeffs.size() >= 2 * c.o.max_deg + 2 ? pade_fit(series, c.o.max_deg, c.o.holdout)
                                                                 : RationalFit{};
  std::vector<std::pair<mpq_class, unsigned>> roots;
  if (fit.found) roots = rational_roots(fit.den);
  if (f == Format::Csv) {
    c.os() << "scheme,p,kind,n,coefficient\n";
    for (std::size_t i = 0; i < series.coeffs.size(); ++i)
      c.os() << series.scheme << ',' << series.p << ',' << to_string(series.kind) << ',' << i << ','
             << series.coeffs[i] << '\n';
    return;
  }
  if (f == Format::Json) {
    Json j;
    j["scheme"] = series.scheme;
    j["p"] = series.p;
    j["kind"] = to_string(series.kind);
    j["coefficients"] = q_list_json(series.coeffs);
    Json jf{{"found", fit.found}};
    if (fit.found) {
      jf["num"] = q_list_json(fit.num);
      jf["den"] = q_list_json(fit.den);
      jf["match_length"] = fit.match_length;
      jf["holdout"] = fit.holdout;
      jf["stable"] = fit.stable;
      Json poles = Json::array();
      for (const auto& [r, mult] : roots) {
        Json pj{{"root", q_str(r)}, {"multiplicity", mult}};
        if (auto s = pole_exponent(r, series.p, series.kind)) pj["s"] = *s;
        poles.push_back(pj);
      }
      jf["poles"] = poles;
    }
    j["fit"] = jf;
    c.os() << j.dump() << '\n';
    return;
  }
  auto& os = c.os();
  os << to_string(series.kind) << "-series of " << series.scheme << " at p=" << series.p << '\n';
  os << "coefficients: " << join_q(series.coeffs) << '\n';
  if (!fit.found) {
    os << "fit: none with degree <= " << c.o.max_deg << '\n';
    return;
  }
  os << "fit: num [" << join_q(fit.num) << "] den [" << join_q(fit.den) << "] "
     << (fit.stable ? "stable" : "UNSTABLE") << " (matched " << fit.match_length << ", holdout " << fit.holdout
     << ")\n";
  for (const auto& [r, mult] : roots) {
    os << "pole: T=" << r << " multiplicity " << mult;
    if (auto s = pole_exponent(r, series.p, series.kind)) os << " s=" << *s;
    os << '\n';
  }
}

void cmd_zeta_local(const Context& c, SeriesKind kind) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.p > 0, "--p");
  need_set(c.o.m_max > 0, "--m-max");
  const auto series = kind == SeriesKind::P ? local_P_series(x, c.o.p, c.o.m_max, c.count_options())
                                            : igusa_Z_series(x, c.o.p, c.o.m_max, c.count_options());
  emit_series(c, f, series);
}

void cmd_zeta_global(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.p_max > 0, "--p-max");
  need_set(c.o.m_max > 0, "--m-max");
  Normalization norm;
  if (c.o.norm == "P")
    norm = Normalization::P;
  else if (c.o.norm == "Z")
    norm = Normalization::Z;
  else
    throw UsageError("--norm must be P or Z");
  const auto e = global_euler_product(x, need(c.o.s, "--s"), c.o.p_max, c.o.m_max, norm, c.count_options());
  if (e.divergence_warning) *c.err << "warning: local factors do not settle towards 1; the product may diverge\n";
  if (f == Format::Csv) {
    c.os() << "p,factor\n";
    for (std::size_t i = 0; i < e.primes.size(); ++i) c.os() << e.primes[i] << ',' << d_str(e.factors[i]) << '\n';
  } else if (f == Format::Json) {
    Json j{{"scheme", x.name}, {"s", *c.o.s}, {"value", e.value}, {"approximate", true},
           {"divergence_warning", e.divergence_warning}, {"note", e.note}};
    c.os() << j.dump() << '\n';
  } else {
    c.os() << d_str(e.value) << '\n' << "note: " << e.note << " (approximate)\n";
  }
}

void cmd_abscissa(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.N > 0, "--N");
  const auto e = abscissa_estimate(x, c.o.N, c.count_options());
  if (f == Format::Csv) {
    c.os() << "n,log_partial_sum_over_log_n\n";
    for (const auto& [n, v] : e.partial_exponents) c.os() << n << ',' << d_str(v) << '\n';
  } else if (f == Format::Json) {
    Json pe = Json::array();
    for (const auto& [n, v] : e.partial_exponents) pe.push_back({n, v});
    c.os() << Json{{"scheme", x.name}, {"N", e.N}, {"slope", e.slope}, {"approximate", true}, {"partial", pe}}.dump()
           << '\n';
  } else {
    c.os() << d_str(e.slope) << '\n';
  }
}

void cmd_cesaro(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.N > 0, "--N");
  const auto means = cesaro_mean(x, c.o.N, c.count_options());
  if (f == Format::Csv) {
    c.os() << "n,mean\n";
    for (std::size_t i = 0; i < means.size(); ++i) c.os() << i + 1 << ',' << means[i] << '\n';
  } else if (f == Format::Json) {
    c.os() << Json{{"scheme", x.name}, {"N", c.o.N}, {"means", q_list_json(means)}}.dump() << '\n';
  } else {
    c.os() << means.back() << " ~ " << d_str(means.back().get_d()) << '\n';
  }
}

void cmd_repzeta(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  if (!c.o.type.empty()) {
    if (c.o.type != "SL2") throw UsageError("only --type SL2 is tabulated");
    need_set(c.o.m_max > 0, "--m-max");
    need_set(c.o.n > 0, "--n");
    std::vector<unsigned> ms;
    for (unsigned m = 1; m <= c.o.m_max; ++m) ms.push_back(m);
    std::vector<ZetaRow> rows;
    for (auto q : parse_list(c.o.q_list, "--q-list")) {
      const auto part = compact_zeta_table(2, q, ms, c.o.n, c.o.group_budget, c.o.threads);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    if (f == Format::Csv) {
      write_csv(c.os(), rows);
    } else if (f == Format::Json) {
      Json a = Json::array();
      for (const auto& r : rows)
        a.push_back({{"type", r.type}, {"p", r.p}, {"m", r.m}, {"n", r.n}, {"order", r.order},
                     {"zeta_frobenius", q_str(r.frobenius)}, {"zeta_character", q_str(r.character)},
                     {"agree", r.agree}, {"q_times_zeta_minus_1", q_str(r.q_times_zeta_minus_1)}});
      c.os() << a.dump() << '\n';
    } else {
      for (const auto& r : rows)
        c.os() << r.type << "(Z/" << r.p << "^" << r.m << ") |G|=" << r.order << " zeta(" << 2 * r.n - 2
               << ")=" << r.frobenius << (r.agree ? " (both routes agree)" : " ROUTES DIFFER: character path ")
               << (r.agree ? std::string() : q_str(r.character)) << " q(zeta-1)=" << r.q_times_zeta_minus_1
               << '\n';
    }
    return;
  }
  const auto g = c.group();
  const auto cc = conj_classes(g);
  const auto deg = character_degrees(g, cc);
  if (f == Format::Csv) {
    c.os() << "degree,multiplicity\n";
    for (auto d = deg.degrees.begin(); d != deg.degrees.end(); d = std::upper_bound(d, deg.degrees.end(), *d))
      c.os() << *d << ',' << deg.r(*d) << '\n';
    return;
  }
  std::optional<mpq_class> exact;
  std::optional<double> approx;
  if (c.o.n > 0) exact = rep_zeta_eval(deg, static_cast<long>(2 * c.o.n - 2));
  if (c.o.s) {
    if (*c.o.s == static_cast<long>(*c.o.s))
      exact = rep_zeta_eval(deg, static_cast<long>(*c.o.s));
    else
      approx = rep_zeta_eval(deg, *c.o.s);
  }
  if (f == Format::Json) {
    Json j{{"group", g.name()}, {"order", g.order()}, {"classes", cc.count()}, {"degrees", deg.degrees},
           {"prime", deg.prime}};
    if (exact) j["zeta"] = q_str(*exact);
    if (approx) j["zeta_approx"] = *approx;
    c.os() << j.dump() << '\n';
    return;
  }
  c.os() << "degrees:";
  for (auto d : deg.degrees) c.os() << ' ' << d;
  c.os() << '\n';
  if (exact) c.os() << "zeta: " << *exact << '\n';
  if (approx) c.os() << "zeta: " << d_str(*approx) << " (approximate)\n";
}

void cmd_def_count(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json});
  need_set(c.o.n > 0, "--n");
  mpz_class count;
  std::string name;
  if (c.o.route == "group") {
    const auto g = c.group();
    name = g.name();
    count = def_count(g, c.o.n, c.o.threads);
  } else if (c.o.route == "scheme") {
    const auto x = def_scheme(GroupType::SL, c.o.d, c.o.n);
    const auto spec = c.ring();
    name = x.name + " over " + spec.to_string();
    count = count_points(x, spec, c.engine(), c.count_options()).count;
  } else {
    throw UsageError("--route must be group or scheme");
  }
  if (f == Format::Json)
    c.os() << Json{{"group", name}, {"n", c.o.n}, {"route", c.o.route}, {"count", z_str(count)}}.dump() << '\n';
  else
    c.os() << count << '\n';
}

void cmd_word_prob(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  need_set(c.o.n > 0, "--n");
  const auto g = c.group();
  const auto cc = conj_classes(g);
  const auto probs = word_prob_by_class(g, cc, c.o.n, c.o.threads);
  std::vector<std::uint32_t> classes;
  if (c.o.element) {
    if (*c.o.element >= g.order()) throw DomainError("element index out of range");
    classes.push_back(cc.class_of[*c.o.element]);
  } else {
    for (std::uint32_t k = 0; k < cc.count(); ++k) classes.push_back(k);
  }
  if (f == Format::Csv) {
    c.os() << "class,representative,size,probability,ratio\n";
    for (auto k : classes)
      c.os() << k << ',' << cc.representative[k] << ',' << cc.size[k] << ',' << probs[k].probability << ','
             << probs[k].ratio << '\n';
  } else if (f == Format::Json) {
    Json a = Json::array();
    for (auto k : classes)
      a.push_back({{"class", k}, {"representative", g.format(cc.representative[k])}, {"size", cc.size[k]},
                   {"probability", q_str(probs[k].probability)}, {"ratio", q_str(probs[k].ratio)}});
    c.os() << Json{{"group", g.name()}, {"n", c.o.n}, {"classes", a}}.dump() << '\n';
  } else {
    for (auto k : classes)
      c.os() << "class " << k << " rep " << g.format(cc.representative[k]) << " size " << cc.size[k] << ": "
             << probs[k].probability << " (|G| * P = " << probs[k].ratio << ")\n";
  }
}

void cmd_adelic(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json});
  need_set(c.o.n > 0, "--n");
  need_set(c.o.p_max > 0, "--p-max");
  const auto a = adelic_product(c.o.d, c.o.n, c.o.p_max, c.o.m, c.o.group_budget, c.o.threads);
  if (f == Format::Json) {
    Json factors = Json::array();
    for (std::size_t i = 0; i < a.primes.size(); ++i) factors.push_back({a.primes[i], q_str(a.factors[i])});
    c.os() << Json{{"value", a.value}, {"exact", q_str(a.exact)}, {"approximate", true}, {"factors", factors},
                   {"note", a.note}}
                  .dump()
           << '\n';
  } else {
    c.os() << d_str(a.value) << '\n' << "exact: " << a.exact << '\n' << "note: " << a.note << '\n';
  }
}

void cmd_rs_threshold(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json});
  need_set(!c.o.type.empty(), "--type");
  const auto t = rs_threshold(c.o.type, c.o.dim);
  if (f == Format::Json)
    c.os() << Json{{"type", c.o.type}, {"threshold", t}}.dump() << '\n';
  else
    c.os() << t << '\n';
}

void cmd_cross_check(const Context& c) {
  const auto f = format_of(c.o, {Format::Text, Format::Json, Format::Csv});
  const auto x = c.scheme();
  need_set(c.o.m_max > 0, "--m-max");
  struct Row {
    PrimePower q;
    unsigned m;
    CrossCheck r;
  };
  std::vector<Row> rows;
  for (const auto& q : q_values(c.o))
    for (unsigned m = 1; m <= c.o.m_max; ++m) rows.push_back({q, m, cross_check_rings(x, q, m, c.engine(), c.count_options())});
  if (f == Format::Csv) {
    c.os() << "scheme,q,m,mixed,equal,agree\n";
    for (const auto& r : rows)
      c.os() << x.name << ',' << r.q.q << ',' << r.m << ',' << r.r.mixed_count << ',' << r.r.equal_count << ','
             << (r.r.equal ? "true" : "false") << '\n';
  } else if (f == Format::Json) {
    Json a = Json::array();
    for (const auto& r : rows)
      a.push_back({{"q", r.q.q}, {"m", r.m}, {"mixed", z_str(r.r.mixed_count)}, {"equal", z_str(r.r.equal_count)},
                   {"agree", r.r.equal}});
    c.os() << Json{{"scheme", x.name}, {"rows", a}}.dump() << '\n';
  } else {
    for (const auto& r : rows)
      c.os() << "q=" << r.q.q << " m=" << r.m << " mixed=" << r.r.mixed_count << " equal=" << r.r.equal_count
             << (r.r.equal ? " agree" : " DIFFER (bad prime)") << '\n';
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact point counts over finite local rings and singularity diagnostics", "singcount"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* s) {
    s->add_option("--format", o.format, "text, json or csv")->capture_default_str();
    s->add_option("--budget", o.budget, "enumeration budget")->capture_default_str();
    s->add_option("--node-budget", o.node_budget, "lift tree node budget")->capture_default_str();
    s->add_option("--threads", o.threads, "worker threads")->capture_default_str();
    s->add_option("--cache", o.cache, "cache directory (default: $SINGCOUNT_CACHE)");
    s->add_option("--engine", o.engine, "lift or brute")->capture_default_str();
  };
  auto group_opts = [&o](CLI::App* s) {
    s->add_option("--table", o.table, "group multiplication table file");
    s->add_option("--group", o.group, "built-in group: Q8, S3");
    s->add_option("--ring", o.ring, "SL_d over this ring");
    s->add_option("--d", o.d, "matrix size")->capture_default_str();
    s->add_option("--group-budget", o.group_budget, "largest group order")->capture_default_str();
  };

  struct Sub {
    const char* name;
    const char* help;
    std::function<void(const Context&)> run;
  };
  std::vector<Sub> subs{
      {"count", "|X(R)|", cmd_count},
      {"h", "h_X(R) = |X(R)| / |R|^dim", cmd_h},
      {"jet", "jet scheme, or jet/ring count identity with --q-list", cmd_jet},
      {"diagnose", "h sweep and singularity verdict", cmd_diagnose},
      {"zeta-local", "local P-series and rational fit", [](const Context& c) { cmd_zeta_local(c, SeriesKind::P); }},
      {"igusa", "Igusa Z-series and rational fit", [](const Context& c) { cmd_zeta_local(c, SeriesKind::Z); }},
      {"zeta-global", "truncated Euler product at real s", cmd_zeta_global},
      {"abscissa", "abscissa of convergence estimate", cmd_abscissa},
      {"cesaro", "Cesaro means of k^-d |X(Z/k)|", cmd_cesaro},
      {"repzeta", "character degrees and representation zeta values", cmd_repzeta},
      {"def-count", "#{2n-tuples with product of commutators 1}", cmd_def_count},
      {"word-prob", "commutator word probabilities by class", cmd_word_prob},
      {"adelic", "finite-level product of zeta_{SL_d(Z/p^m)}", cmd_adelic},
      {"rs-threshold", "genus threshold for a root type", cmd_rs_threshold},
      {"cross-check", "Galois ring vs F_q[t]/t^m counts", cmd_cross_check},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    sub->add_option("--scheme", o.scheme, "scheme JSON file");
    if (std::string_view(s.name) == "repzeta" || std::string_view(s.name) == "def-count" ||
        std::string_view(s.name) == "word-prob")
      group_opts(sub);
    else
      sub->add_option("--ring", o.ring, "ring spec kind:p^f:m");
    sub->add_option("--p", o.p, "prime");
    sub->add_option("--p-max", o.p_max, "largest prime");
    sub->add_option("--m", o.m, "level")->capture_default_str();
    sub->add_option("--m-max", o.m_max, "largest level");
    sub->add_option("--q-list", o.q_list, "comma-separated residue field sizes");
    sub->add_option("--kinds", o.kinds, "ring kinds")->capture_default_str();
    sub->add_option("--n", o.n, "genus");
    sub->add_option("--s", o.s, "real evaluation point");
    sub->add_option("--N", o.N, "cutoff");
    sub->add_option("--type", o.type, "root type or group type");
    sub->add_option("--dim", o.dim, "dimension of the Lie algebra");
    sub->add_option("--max-deg", o.max_deg, "rational fit degree bound")->capture_default_str();
    sub->add_option("--holdout", o.holdout, "coefficients held out of the fit")->capture_default_str();
    sub->add_option("--norm", o.norm, "Euler product normalisation P or Z")->capture_default_str();
    sub->add_option("--route", o.route, "group or scheme")->capture_default_str();
    sub->add_option("--element", o.element, "element index");
    handles.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Context ctx{o, nullptr, &out, &err};
    std::string cache_dir = o.cache;
    if (cache_dir.empty())
      if (const char* env = std::getenv("SINGCOUNT_CACHE")) cache_dir = env;
    if (!cache_dir.empty()) ctx.cache = std::make_unique<FileCountCache>(cache_dir, std::string(kCountVersion), &err);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (handles[i]->parsed()) subs[i].run(ctx);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace singcount
