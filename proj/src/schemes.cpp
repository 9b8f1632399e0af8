#include "singcount/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "singcount/error.hpp"

namespace singcount {

using nlohmann::json;

void AffineScheme::validate() const {
  system.validate();
  if (declared_dim < 0) throw DomainError("declared dimension must be nonnegative");
  if (static_cast<std::size_t>(declared_dim) > arity())
    throw DomainError("declared dimension " + std::to_string(declared_dim) + " exceeds the number of variables " +
                      std::to_string(arity()));
}

std::string AffineScheme::canonical_form() const {
  std::string s = "vars=";
  for (const auto& v : system.vars) s += v + ",";
  s += ";polys=";
  for (const auto& p : system.polys) s += p.to_string(system.vars) + ";";
  s += "dim=" + std::to_string(declared_dim);
  return s;
}

AffineScheme make_scheme(std::string name, std::vector<std::string> vars, const std::vector<std::string>& polys,
                         int declared_dim, SchemeFlags flags) {
  AffineScheme x;
  x.name = std::move(name);
  x.system.vars = std::move(vars);
  for (const auto& text : polys) x.system.polys.push_back(parse_polynomial(text, x.system.vars));
  x.declared_dim = declared_dim;
  x.flags = flags;
  x.validate();
  return x;
}

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

AffineScheme load_scheme(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(document, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed scheme document: " + std::string(e.what()), line, col);
  }
  if (!doc.is_object()) throw ParseError("scheme document must be a JSON object", 1, 1);
  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw ParseError(std::string("scheme document is missing \"") + key + "\"", 1, 1);
    return doc.at(key);
  };
  AffineScheme x;
  try {
    x.name = doc.value("name", std::string("scheme"));
    x.system.vars = require("vars").get<std::vector<std::string>>();
    const auto polys = require("polys").get<std::vector<std::string>>();
    x.declared_dim = require("dim").get<int>();
    x.flags.lci = doc.value("lci", false);
    x.flags.reduced = doc.value("reduced", false);
    x.flags.abs_irreducible = doc.value("irreducible", false);
    for (std::size_t i = 0; i < polys.size(); ++i) {
      try {
        x.system.polys.push_back(parse_polynomial(polys[i], x.system.vars));
      } catch (const ParseError& e) {
        throw ParseError("polynomial " + std::to_string(i + 1) + ": " + e.what(), i + 1, e.column());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad scheme document: ") + e.what(), 1, 1);
  }
  for (const auto& v : x.system.vars) {
    const bool ok = !v.empty() && (std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_') &&
                    std::all_of(v.begin(), v.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    if (!ok) throw ParseError("invalid variable name '" + v + "'", 1, 1);
  }
  x.validate();
  return x;
}

AffineScheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open scheme file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scheme(ss.str());
}

json scheme_to_json(const AffineScheme& x) {
  json j;
  j["name"] = x.name;
  j["vars"] = x.system.vars;
  std::vector<std::string> polys;
  for (const auto& p : x.system.polys) polys.push_back(p.to_string(x.system.vars));
  j["polys"] = polys;
  j["dim"] = x.declared_dim;
  j["dim_is_expected"] = x.dim_is_expected;
  j["lci"] = x.flags.lci;
  j["reduced"] = x.flags.reduced;
  j["irreducible"] = x.flags.abs_irreducible;
  return j;
}

AffineScheme affine_space(unsigned d) {
  AffineScheme x;
  x.name = "A^" + std::to_string(d);
  for (unsigned i = 0; i < d; ++i) x.system.vars.push_back("x" + std::to_string(i + 1));
  x.declared_dim = static_cast<int>(d);
  x.flags = {true, true, true};
  return x;
}

AffineScheme jet_scheme(const AffineScheme& x, unsigned m) {
  x.validate();
  AffineScheme j;
  j.name = "Jet_" + std::to_string(m) + "(" + x.name + ")";
  j.system = jet_expand(x.system, m);
  j.declared_dim = static_cast<int>(m + 1) * x.declared_dim;
  j.flags = x.flags;
  j.dim_is_expected = true;
  return j;
}

AffineScheme distinguished_open(const AffineScheme& x, const IntPoly& g) {
  if (g.arity() != x.arity()) throw DomainError("localizing polynomial has the wrong arity");
  AffineScheme u = x;
  u.name = "D(" + g.to_string(x.system.vars) + ") in " + x.name;
  std::string w = "w";
  while (std::find(u.system.vars.begin(), u.system.vars.end(), w) != u.system.vars.end()) w += "_";
  const std::size_t n = x.arity();
  std::vector<std::size_t> embed(n);
  for (std::size_t i = 0; i < n; ++i) embed[i] = i;
  u.system.vars.push_back(w);
  for (auto& p : u.system.polys) p = p.remap(n + 1, embed);
  const IntPoly gw = g.remap(n + 1, embed);
  u.system.polys.push_back(IntPoly::variable(n + 1, n) * gw - IntPoly::constant(n + 1, 1));
  return u;
}

namespace {

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

AffineScheme singular_subscheme(const AffineScheme& x) {
  x.validate();
  const std::size_t n = x.arity();
  const std::size_t l = x.num_equations();
  const std::size_t c = n - static_cast<std::size_t>(x.declared_dim);
  if (c > l)
    throw DomainError("codimension " + std::to_string(c) + " exceeds the number of equations " + std::to_string(l) +
                      "; the declared dimension is inconsistent");
  AffineScheme s = x;
  s.name = "Sing(" + x.name + ")";
  if (c == 0) {
    s.system.polys.push_back(IntPoly::constant(n, 1));
    return s;
  }
  const auto jac = jacobian(x.system);
  for_each_subset(l, c, [&](const std::vector<std::size_t>& rows) {
    for_each_subset(n, c, [&](const std::vector<std::size_t>& cols) {
      std::vector<std::vector<IntPoly>> sub(c, std::vector<IntPoly>(c));
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) sub[i][j] = jac[rows[i]][cols[j]];
      IntPoly minor = determinant(sub);
      if (minor.is_zero()) return;
      if (std::find(s.system.polys.begin(), s.system.polys.end(), minor) == s.system.polys.end())
        s.system.polys.push_back(std::move(minor));
    });
  });
  return s;
}

namespace {

using PolyMatrix = std::vector<std::vector<IntPoly>>;

PolyMatrix matmul(const PolyMatrix& a, const PolyMatrix& b) {
  const std::size_t d = a.size();
  const std::size_t arity = a[0][0].arity();
  PolyMatrix r(d, std::vector<IntPoly>(d, IntPoly(arity)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

PolyMatrix adjugate(const PolyMatrix& a) {
  const std::size_t d = a.size();
  const std::size_t arity = a[0][0].arity();
  PolyMatrix adj(d, std::vector<IntPoly>(d, IntPoly(arity)));
  if (d == 1) {
    adj[0][0] = IntPoly::constant(arity, 1);
    return adj;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      PolyMatrix minor;
      for (std::size_t r = 0; r < d; ++r) {
        if (r == i) continue;
        std::vector<IntPoly> row;
        for (std::size_t c = 0; c < d; ++c)
          if (c != j) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      IntPoly cof = determinant(minor);
      // adj = transpose of the cofactor matrix
      adj[j][i] = ((i + j) % 2 == 0) ? cof : -cof;
    }
  return adj;
}

}  // namespace

AffineScheme sl_scheme(unsigned d) {
  if (d < 1) throw DomainError("SL_d needs d >= 1");
  AffineScheme x;
  x.name = "SL_" + std::to_string(d);
  for (unsigned r = 0; r < d; ++r)
    for (unsigned c = 0; c < d; ++c) x.system.vars.push_back("a" + std::to_string(r + 1) + std::to_string(c + 1));
  PolyMatrix m(d, std::vector<IntPoly>(d));
  for (unsigned r = 0; r < d; ++r)
    for (unsigned c = 0; c < d; ++c) m[r][c] = IntPoly::variable(d * d, r * d + c);
  x.system.polys.push_back(determinant(m) - IntPoly::constant(d * d, 1));
  x.declared_dim = static_cast<int>(d * d - 1);
  x.flags = {true, true, true};
  return x;
}

AffineScheme def_scheme(GroupType type, unsigned d, unsigned n) {
  if (type != GroupType::SL) throw DomainError("unsupported group type");
  if (d < 2) throw DomainError("def_scheme needs d >= 2");
  if (n < 1) throw DomainError("def_scheme needs genus n >= 1");
  const std::size_t dd = std::size_t{d} * d;
  const std::size_t arity = 2 * n * dd;
  AffineScheme x;
  x.name = "Def(SL_" + std::to_string(d) + "," + std::to_string(n) + ")";
  std::vector<PolyMatrix> g(n), h(n);
  for (unsigned i = 0; i < n; ++i) {
    for (int which = 0; which < 2; ++which) {
      PolyMatrix& mat = which == 0 ? g[i] : h[i];
      mat.assign(d, std::vector<IntPoly>(d));
      const char letter = which == 0 ? 'g' : 'h';
      const std::size_t base = (2 * i + which) * dd;
      for (unsigned r = 0; r < d; ++r)
        for (unsigned c = 0; c < d; ++c) {
          x.system.vars.push_back(std::string(1, letter) + std::to_string(i + 1) + "_" + std::to_string(r + 1) +
                                  std::to_string(c + 1));
          mat[r][c] = IntPoly::variable(arity, base + r * d + c);
        }
    }
  }
  const IntPoly one = IntPoly::constant(arity, 1);
  for (unsigned i = 0; i < n; ++i) {
    x.system.polys.push_back(determinant(g[i]) - one);
    x.system.polys.push_back(determinant(h[i]) - one);
  }
  PolyMatrix lhs, rhs;
  if (n == 1) {
    // [g,h] = 1  <=>  gh = hg
    lhs = matmul(g[0], h[0]);
    rhs = matmul(h[0], g[0]);
  } else {
    // [g1,h1]...[gk,hk] = [hn,gn]...[h(k+1),g(k+1)], k = ceil(n/2)
    const unsigned k = (n + 1) / 2;
    auto commutator = [&](const PolyMatrix& a, const PolyMatrix& b) {
      return matmul(matmul(matmul(a, b), adjugate(a)), adjugate(b));
    };
    lhs = commutator(g[0], h[0]);
    for (unsigned i = 1; i < k; ++i) lhs = matmul(lhs, commutator(g[i], h[i]));
    rhs = commutator(h[n - 1], g[n - 1]);
    for (unsigned i = n - 1; i-- > k;) rhs = matmul(rhs, commutator(h[i], g[i]));
  }
  for (unsigned r = 0; r < d; ++r)
    for (unsigned c = 0; c < d; ++c) {
      IntPoly e = lhs[r][c] - rhs[r][c];
      if (!e.is_zero()) x.system.polys.push_back(std::move(e));
    }
  x.declared_dim = static_cast<int>((2 * n - 1) * (dd - 1));
  x.flags = {false, false, false};
  return x;
}

}  // namespace singcount
