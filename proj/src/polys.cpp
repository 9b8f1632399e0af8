#include "singcount/polys.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_map>

#include "singcount/error.hpp"

namespace singcount {

bool GrLexDescending::operator()(const Exponents& a, const Exponents& b) const {
  const auto da = std::accumulate(a.begin(), a.end(), 0U);
  const auto db = std::accumulate(b.begin(), b.end(), 0U);
  if (da != db) return da > db;
  return a > b;
}

IntPoly IntPoly::constant(std::size_t arity, const mpz_class& c) {
  IntPoly p(arity);
  p.add_term(Exponents(arity, 0), c);
  return p;
}

IntPoly IntPoly::variable(std::size_t arity, std::size_t index) {
  IntPoly p(arity);
  Exponents e(arity, 0);
  e.at(index) = 1;
  p.add_term(e, 1);
  return p;
}

bool IntPoly::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(),
                                                              terms_.begin()->first.end(),
                                                              [](unsigned e) { return e == 0; }));
}

mpz_class IntPoly::constant_term() const {
  auto it = terms_.find(Exponents(arity_, 0));
  return it == terms_.end() ? mpz_class(0) : it->second;
}

unsigned IntPoly::total_degree() const noexcept {
  if (terms_.empty()) return 0;
  const auto& e = terms_.begin()->first;
  return std::accumulate(e.begin(), e.end(), 0U);
}

unsigned IntPoly::degree_in(std::size_t var) const noexcept {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

std::vector<std::size_t> IntPoly::support() const {
  std::vector<bool> used(arity_, false);
  for (const auto& [e, c] : terms_)
    for (std::size_t i = 0; i < arity_; ++i)
      if (e[i]) used[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < arity_; ++i)
    if (used[i]) out.push_back(i);
  return out;
}

void IntPoly::add_term(const Exponents& e, const mpz_class& c) {
  if (e.size() != arity_) throw DomainError("exponent vector has wrong arity");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

IntPoly IntPoly::derivative(std::size_t var) const {
  IntPoly d(arity_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents e2 = e;
    --e2[var];
    d.add_term(e2, c * e[var]);
  }
  return d;
}

IntPoly IntPoly::remap(std::size_t arity, std::span<const std::size_t> map) const {
  if (map.size() != arity_) throw DomainError("variable map has wrong size");
  IntPoly r(arity);
  for (const auto& [e, c] : terms_) {
    Exponents e2(arity, 0);
    for (std::size_t i = 0; i < arity_; ++i)
      if (e[i]) e2.at(map[i]) += e[i];
    r.add_term(e2, c);
  }
  return r;
}

IntPoly IntPoly::pow(unsigned e) const {
  IntPoly result = constant(arity_, 1);
  IntPoly base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
  if (o.arity_ != arity_) throw DomainError("arity mismatch in polynomial sum");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
  if (o.arity_ != arity_) throw DomainError("arity mismatch in polynomial difference");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.arity_ != b.arity_) throw DomainError("arity mismatch in polynomial product");
  IntPoly r(a.arity_);
  Exponents e(a.arity_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

IntPoly operator-(const IntPoly& a) {
  IntPoly r(a.arity_);
  for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, -c);
  return r;
}

std::string IntPoly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    mpz_class mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += mono;
    } else {
      out += mag.get_str() + "*" + mono;
    }
  }
  return out;
}

void PolySystem::validate() const {
  for (const auto& p : polys)
    if (p.arity() != vars.size()) throw DomainError("polynomial arity does not match the variable list");
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars) : text_(text), vars_(vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) index_.emplace(vars[i], i);
  }

  IntPoly parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    IntPoly p = expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    return p;
  }

 private:
  IntPoly expr() {
    IntPoly acc = term();
    while (true) {
      skip_ws();
      if (at_end()) break;
      const char c = peek();
      if (c != '+' && c != '-') break;
      advance();
      IntPoly rhs = term();
      if (c == '+') {
        acc += rhs;
      } else {
        acc -= rhs;
      }
    }
    return acc;
  }

  IntPoly term() {
    IntPoly acc = unary();
    while (true) {
      skip_ws();
      if (at_end() || peek() != '*') break;
      advance();
      acc = acc * unary();
    }
    return acc;
  }

  IntPoly unary() {
    skip_ws();
    if (at_end()) fail("expected an operand");
    if (peek() == '-') {
      advance();
      return -unary();
    }
    if (peek() == '+') {
      advance();
      return unary();
    }
    return power();
  }

  IntPoly power() {
    IntPoly base = primary();
    skip_ws();
    if (!at_end() && peek() == '^') {
      advance();
      skip_ws();
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
        fail("exponent must be a nonnegative integer literal");
      const std::string digits = take_while([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (digits.size() > 6) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(digits)));
      skip_ws();
      if (!at_end() && peek() == '^') fail("chained exponents need parentheses");
    }
    return base;
  }

  IntPoly primary() {
    skip_ws();
    if (at_end()) fail("expected an operand");
    const char c = peek();
    if (c == '(') {
      advance();
      IntPoly inner = expr();
      skip_ws();
      if (at_end() || peek() != ')') fail("expected ')'");
      advance();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::string digits = take_while([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
      return IntPoly::constant(vars_.size(), mpz_class(digits));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto line = line_, col = col_;
      const std::string name =
          take_while([](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
      auto it = index_.find(name);
      if (it == index_.end()) throw ParseError("unknown variable '" + name + "'", line, col);
      return IntPoly::variable(vars_.size(), it->second);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  template <class Pred>
  std::string take_while(Pred pred) {
    std::string s;
    while (!at_end() && pred(peek())) {
      s += peek();
      advance();
    }
    return s;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

IntPoly parse_polynomial(std::string_view text, std::span<const std::string> vars) { return Parser(text, vars).parse(); }

// ---------------------------------------------------------------------------

Element eval_poly(const IntPoly& p, const Ring& ring, std::span<const Element> point) {
  if (point.size() != p.arity())
    throw DomainError("point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                      std::to_string(p.arity()) + " variables");
  Element acc = ring.zero();
  for (const auto& [e, c] : p.terms()) {
    Element t = ring.from_integer(c);
    for (std::size_t i = 0; i < e.size() && t != 0; ++i)
      if (e[i]) t = ring.mul(t, ring.pow(point[i], e[i]));
    acc = ring.add(acc, t);
  }
  return acc;
}

std::vector<std::vector<IntPoly>> jacobian(const PolySystem& s) {
  std::vector<std::vector<IntPoly>> j;
  j.reserve(s.polys.size());
  for (const auto& f : s.polys) {
    std::vector<IntPoly> row;
    row.reserve(s.arity());
    for (std::size_t v = 0; v < s.arity(); ++v) row.push_back(f.derivative(v));
    j.push_back(std::move(row));
  }
  return j;
}

PolySystem jet_expand(const PolySystem& s, unsigned order) {
  s.validate();
  const std::size_t n = s.arity();
  const std::size_t width = order + 1;
  const std::size_t out_arity = n * width;

  PolySystem out;
  out.vars.reserve(out_arity);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = s.vars[i] + "_" + std::to_string(j);
      // Avoid clashing with an input variable literally named like a jet coordinate.
      while (std::find(s.vars.begin(), s.vars.end(), name) != s.vars.end()) name += "_";
      out.vars.push_back(std::move(name));
    }
  }

  using Series = std::vector<IntPoly>;  // coefficients of t^0..t^order
  auto series_mul = [&](const Series& a, const Series& b) {
    Series r(width, IntPoly(out_arity));
    for (std::size_t i = 0; i < width; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; i + j < width; ++j) {
        if (b[j].is_zero()) continue;
        r[i + j] += a[i] * b[j];
      }
    }
    return r;
  };

  std::vector<Series> var_series(n);
  for (std::size_t i = 0; i < n; ++i) {
    var_series[i].assign(width, IntPoly(out_arity));
    for (std::size_t j = 0; j < width; ++j) var_series[i][j] = IntPoly::variable(out_arity, j * n + i);
  }

  std::vector<Series> expanded;
  for (const auto& f : s.polys) {
    Series acc(width, IntPoly(out_arity));
    for (const auto& [e, c] : f.terms()) {
      Series term(width, IntPoly(out_arity));
      term[0] = IntPoly::constant(out_arity, c);
      for (std::size_t i = 0; i < n; ++i)
        for (unsigned k = 0; k < e[i]; ++k) term = series_mul(term, var_series[i]);
      for (std::size_t j = 0; j < width; ++j) acc[j] += term[j];
    }
    expanded.push_back(std::move(acc));
  }
  for (std::size_t j = 0; j < width; ++j)
    for (auto& series : expanded) out.polys.push_back(std::move(series[j]));
  return out;
}

IntPoly determinant(const std::vector<std::vector<IntPoly>>& matrix) {
  const std::size_t c = matrix.size();
  if (c == 0) return IntPoly::constant(0, 1);
  const std::size_t arity = matrix[0][0].arity();
  if (c > 20) throw DomainError("determinant of a matrix this large is not supported");
  // det of rows [r, c) restricted to the column set `mask` (|mask| = c - r).
  std::unordered_map<std::uint32_t, IntPoly> memo;
  auto rec = [&](auto&& self, std::size_t r, std::uint32_t mask) -> IntPoly {
    if (r == c) return IntPoly::constant(arity, 1);
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    IntPoly acc(arity);
    int sign = 1;
    for (std::size_t col = 0; col < c; ++col) {
      if (!(mask & (1U << col))) continue;
      if (!matrix[r][col].is_zero()) {
        IntPoly minor = self(self, r + 1, mask & ~(1U << col));
        if (!minor.is_zero()) {
          IntPoly t = matrix[r][col] * minor;
          if (sign > 0) {
            acc += t;
          } else {
            acc -= t;
          }
        }
      }
      sign = -sign;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return rec(rec, 0, (c == 32 ? 0xFFFFFFFFU : (1U << c) - 1));
}

CompiledPoly::CompiledPoly(const IntPoly& p, const Ring& ring) {
  offsets_.push_back(0);
  for (const auto& [e, c] : p.terms()) {
    const Element coef = ring.from_integer(c);
    if (coef == 0) continue;
    coefs_.push_back(coef);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      factors_.emplace_back(static_cast<std::uint32_t>(i), e[i]);
      max_var_ = std::max<std::ptrdiff_t>(max_var_, static_cast<std::ptrdiff_t>(i));
    }
    offsets_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }
}

Element CompiledPoly::eval(const Ring& ring, std::span<const Element> x) const noexcept {
  Element acc = 0;
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    Element v = coefs_[t];
    for (auto k = offsets_[t]; k < offsets_[t + 1] && v != 0; ++k) {
      const auto [var, e] = factors_[k];
      const Element b = x[var];
      if (e == 1) {
        v = ring.mul(v, b);
      } else if (e == 2) {
        v = ring.mul(v, ring.mul(b, b));
      } else {
        v = ring.mul(v, ring.pow(b, e));
      }
    }
    acc = ring.add(acc, v);
  }
  return acc;
}

}  // namespace singcount
