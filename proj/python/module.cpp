#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "singcount/cli.hpp"
#include "singcount/counting.hpp"
#include "singcount/diagnostics.hpp"
#include "singcount/error.hpp"
#include "singcount/groups.hpp"
#include "singcount/schemes.hpp"
#include "singcount/zeta.hpp"

namespace py = pybind11;
using namespace singcount;

namespace {

py::object to_int(const mpz_class& z) { return py::module_::import("builtins").attr("int")(z.get_str()); }

py::object to_fraction(const mpq_class& q) {
  return py::module_::import("fractions").attr("Fraction")(to_int(q.get_num()), to_int(q.get_den()));
}

py::list to_fractions(const std::vector<mpq_class>& v) {
  py::list out;
  for (const auto& x : v) out.append(to_fraction(x));
  return out;
}

CountOptions options(unsigned threads, std::uint64_t budget, std::uint64_t node_budget) {
  CountOptions o;
  o.threads = threads;
  o.budget = budget;
  o.node_budget = node_budget;
  return o;
}

std::vector<PrimePower> prime_powers(const std::vector<std::uint64_t>& qs) {
  std::vector<PrimePower> out;
  for (auto q : qs) out.push_back(PrimePower::from_value(q));
  return out;
}

std::vector<RingKind> parse_kinds(const std::vector<std::string>& kinds) {
  std::vector<RingKind> out;
  for (const auto& k : kinds) {
    if (k == "mixed")
      out.push_back(RingKind::Mixed);
    else if (k == "equal")
      out.push_back(RingKind::Equal);
    else
      throw DomainError("unknown ring kind '" + k + "'");
  }
  return out;
}

FiniteGroup group_from(const std::string& name, unsigned d, std::uint64_t budget) {
  if (name == "Q8") return quaternion_group();
  if (name == "S3") return FiniteGroup::special_linear(2, LocalRingSpec::parse("mixed:2^1:1"), budget);
  return FiniteGroup::special_linear(d, LocalRingSpec::parse(name), budget);
}

}  // namespace

PYBIND11_MODULE(_singcount, m) {
  m.doc() = "Exact point counts over finite local rings and representation zeta values";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());

  py::class_<AffineScheme>(m, "Scheme")
      .def_readonly("name", &AffineScheme::name)
      .def_readonly("declared_dim", &AffineScheme::declared_dim)
      .def_property_readonly("arity", &AffineScheme::arity)
      .def_property_readonly("num_equations", &AffineScheme::num_equations)
      .def("canonical_form", &AffineScheme::canonical_form)
      .def("__repr__", [](const AffineScheme& x) {
        return "<Scheme " + x.name + ": " + std::to_string(x.arity()) + " vars, " +
               std::to_string(x.num_equations()) + " equations, dim " + std::to_string(x.declared_dim) + ">";
      });

  m.def("make_scheme",
        [](std::string name, std::vector<std::string> vars, const std::vector<std::string>& polys, int dim) {
          return make_scheme(std::move(name), std::move(vars), polys, dim);
        },
        py::arg("name"), py::arg("vars"), py::arg("polys"), py::arg("dim"));
  m.def("load_scheme", [](const std::string& doc) { return load_scheme(doc); }, py::arg("document"));
  m.def("load_scheme_file", &load_scheme_file, py::arg("path"));
  m.def("affine_space", &affine_space, py::arg("d"));
  m.def("jet_scheme", &jet_scheme, py::arg("scheme"), py::arg("m"));
  m.def("sl_scheme", &sl_scheme, py::arg("d"));
  m.def("def_scheme", [](unsigned d, unsigned n) { return def_scheme(GroupType::SL, d, n); }, py::arg("d"),
        py::arg("n"));

  m.def("count",
        [](const AffineScheme& x, const std::string& ring, const std::string& engine, unsigned threads,
           std::uint64_t budget, std::uint64_t node_budget) {
          const auto spec = LocalRingSpec::parse(ring);
          const auto opts = options(threads, budget, node_budget);
          CountResult r;
          {
            py::gil_scoped_release release;
            r = count_points(x, spec, parse_engine(engine), opts);
          }
          return to_int(r.count);
        },
        py::arg("scheme"), py::arg("ring"), py::arg("engine") = "lift", py::arg("threads") = 1,
        py::arg("budget") = CountOptions{}.budget, py::arg("node_budget") = CountOptions{}.node_budget);

  m.def("h",
        [](const AffineScheme& x, const std::string& ring, unsigned threads) {
          const auto e = h_value(x, LocalRingSpec::parse(ring), Engine::Lift, options(threads, CountOptions{}.budget,
                                                                                       CountOptions{}.node_budget));
          return to_fraction(e.h);
        },
        py::arg("scheme"), py::arg("ring"), py::arg("threads") = 1);

  m.def("count_composite",
        [](const AffineScheme& x, std::uint64_t n) { return to_int(count_composite(x, n)); }, py::arg("scheme"),
        py::arg("n"));

  m.def("cross_check",
        [](const AffineScheme& x, std::uint64_t q, unsigned level) {
          const auto c = cross_check_rings(x, PrimePower::from_value(q), level);
          py::dict d;
          d["mixed"] = to_int(c.mixed_count);
          d["equal"] = to_int(c.equal_count);
          d["agree"] = c.equal;
          return d;
        },
        py::arg("scheme"), py::arg("q"), py::arg("m"));

  m.def("diagnose",
        [](const AffineScheme& x, const std::vector<std::uint64_t>& qs, unsigned m_max,
           const std::vector<std::string>& kinds) {
          const auto table = h_sweep(x, prime_powers(qs), m_max, parse_kinds(kinds));
          const auto rep = rs_report(table);
          py::dict d;
          d["verdict"] = std::string(to_string(rep.verdict));
          d["reasons"] = rep.reasons;
          py::list stats;
          for (const auto& s : rep.stats) {
            py::dict row;
            row["q"] = s.q.q;
            row["kind"] = std::string(to_string(s.kind));
            row["c"] = to_int(s.c);
            row["s3"] = to_fraction(s.s3);
            stats.append(row);
          }
          d["stats"] = stats;
          py::list cells;
          for (const auto& c : table.cells) {
            py::dict row;
            row["q"] = c.q.q;
            row["m"] = c.m;
            row["kind"] = std::string(to_string(c.kind));
            if (c.entry) {
              row["count"] = to_int(c.entry->count);
              row["h"] = to_fraction(c.entry->h);
            } else {
              row["error"] = c.error;
            }
            cells.append(row);
          }
          d["cells"] = cells;
          return d;
        },
        py::arg("scheme"), py::arg("qs"), py::arg("m_max"), py::arg("kinds") = std::vector<std::string>{"mixed", "equal"});

  m.def("lang_weil_c",
        [](const AffineScheme& x, const std::vector<std::uint64_t>& qs) {
          py::dict d;
          for (const auto& e : lang_weil_c(x, prime_powers(qs))) d[py::int_(e.q.q)] = to_int(e.c);
          return d;
        },
        py::arg("scheme"), py::arg("qs"));

  m.def("local_p_series",
        [](const AffineScheme& x, std::uint64_t p, unsigned m_max) {
          return to_fractions(local_P_series(x, p, m_max).coeffs);
        },
        py::arg("scheme"), py::arg("p"), py::arg("m_max"));
  m.def("igusa_z_series",
        [](const AffineScheme& x, std::uint64_t p, unsigned m_max) {
          return to_fractions(igusa_Z_series(x, p, m_max).coeffs);
        },
        py::arg("scheme"), py::arg("p"), py::arg("m_max"));
  m.def("pade_fit",
        [](const std::vector<std::string>& coeffs, unsigned max_deg, std::size_t holdout) {
          std::vector<mpq_class> c;
          for (const auto& s : coeffs) {
            mpq_class v(s);
            v.canonicalize();
            c.push_back(v);
          }
          const auto fit = pade_fit(c, max_deg, holdout);
          py::dict d;
          d["found"] = fit.found;
          d["stable"] = fit.stable;
          d["num"] = to_fractions(fit.num);
          d["den"] = to_fractions(fit.den);
          return d;
        },
        py::arg("coeffs"), py::arg("max_deg"), py::arg("holdout") = 2,
        "Coefficients are given as strings such as \"2/3\".");

  m.def("abscissa_estimate", [](const AffineScheme& x, std::uint64_t n) { return abscissa_estimate(x, n).slope; },
        py::arg("scheme"), py::arg("N"));
  m.def("euler_product",
        [](const AffineScheme& x, double s, std::uint64_t p_max, unsigned m_max) {
          return global_euler_product(x, s, p_max, m_max).value;
        },
        py::arg("scheme"), py::arg("s"), py::arg("p_max"), py::arg("m_max") = 12);

  m.def("def_count",
        [](const std::string& group, unsigned n, unsigned d, std::uint64_t budget, unsigned threads) {
          const auto g = group_from(group, d, budget);
          return to_int(def_count(g, n, threads));
        },
        py::arg("group"), py::arg("n"), py::arg("d") = 2, py::arg("group_budget") = 100'000, py::arg("threads") = 1,
        "group is \"Q8\", \"S3\" or a ring spec such as \"mixed:3^1:1\" for SL_d over that ring.");
  m.def("character_degrees",
        [](const std::string& group, unsigned d, std::uint64_t budget) {
          const auto g = group_from(group, d, budget);
          return character_degrees(g, conj_classes(g)).degrees;
        },
        py::arg("group"), py::arg("d") = 2, py::arg("group_budget") = 100'000);
  m.def("word_prob",
        [](const std::string& group, unsigned n, unsigned d, std::uint64_t budget) {
          const auto g = group_from(group, d, budget);
          const auto cc = conj_classes(g);
          py::list out;
          for (GroupElement x = 0; x < g.order(); ++x) out.append(to_fraction(word_prob(g, cc, n, x).probability));
          return out;
        },
        py::arg("group"), py::arg("n"), py::arg("d") = 2, py::arg("group_budget") = 100'000,
        "Probability of each group element, indexed by element.");
  m.def("zeta_table",
        [](std::uint64_t p, const std::vector<unsigned>& ms, unsigned n, unsigned d) {
          py::list out;
          for (const auto& r : compact_zeta_table(d, p, ms, n)) {
            py::dict row;
            row["p"] = r.p;
            row["m"] = r.m;
            row["order"] = r.order;
            row["frobenius"] = to_fraction(r.frobenius);
            row["character"] = to_fraction(r.character);
            row["q_times_zeta_minus_1"] = to_fraction(r.q_times_zeta_minus_1);
            row["agree"] = r.agree;
            out.append(row);
          }
          return out;
        },
        py::arg("p"), py::arg("ms"), py::arg("n") = 2, py::arg("d") = 2);
  m.def("rs_threshold", &rs_threshold, py::arg("type"), py::arg("dim") = std::nullopt);

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = dispatch(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command-line invocation; returns (exit code, stdout, stderr).");
}
