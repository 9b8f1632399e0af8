#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "singcount/rings.hpp"

namespace singcount {

using Exponents = std::vector<unsigned>;

/// Graded lexicographic order, larger monomials first.
struct GrLexDescending {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Multivariate polynomial with arbitrary-precision integer coefficients.
/// Zero coefficients are never stored; every exponent vector has length arity().
class IntPoly {
 public:
  using TermMap = std::map<Exponents, mpz_class, GrLexDescending>;

  IntPoly() = default;
  explicit IntPoly(std::size_t arity) : arity_(arity) {}

  static IntPoly constant(std::size_t arity, const mpz_class& c);
  static IntPoly variable(std::size_t arity, std::size_t index);

  std::size_t arity() const noexcept { return arity_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Constant term (zero when absent).
  mpz_class constant_term() const;
  unsigned total_degree() const noexcept;
  unsigned degree_in(std::size_t var) const noexcept;
  /// Sorted indices of variables that occur with a nonzero exponent.
  std::vector<std::size_t> support() const;

  /// Adds c * x^e; removes the term when the coefficient cancels.
  void add_term(const Exponents& e, const mpz_class& c);

  IntPoly derivative(std::size_t var) const;
  /// Re-embeds into `arity` variables, old variable i becoming new variable map[i].
  IntPoly remap(std::size_t arity, std::span<const std::size_t> map) const;
  IntPoly pow(unsigned e) const;

  IntPoly& operator+=(const IntPoly& o);
  IntPoly& operator-=(const IntPoly& o);
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a);
  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.arity_ == b.arity_ && a.terms_ == b.terms_; }

  /// Human-readable form in grlex order, e.g. "x*y - z^2".
  std::string to_string(std::span<const std::string> names) const;

 private:
  std::size_t arity_ = 0;
  TermMap terms_;
};

/// An ordered list of polynomials over a shared variable list.
struct PolySystem {
  std::vector<std::string> vars;
  std::vector<IntPoly> polys;

  std::size_t arity() const noexcept { return vars.size(); }
  /// Throws DomainError if some polynomial has the wrong arity.
  void validate() const;
};

/// Parses an expression over the given variables.
///
/// Grammar: integer literals, identifiers [a-zA-Z_][a-zA-Z0-9_]*, binary + - *,
/// unary + -, parentheses and `^` followed by a nonnegative integer literal.
IntPoly parse_polynomial(std::string_view text, std::span<const std::string> vars);

/// Exact image of p at a point of R^n.
Element eval_poly(const IntPoly& p, const Ring& ring, std::span<const Element> point);

/// Entry (i, j) is d f_i / d x_j.
std::vector<std::vector<IntPoly>> jacobian(const PolySystem& s);

/// Truncated Taylor substitution x_i = sum_j x_{i,j} t^j mod t^{order+1}.
///
/// Output variables are ordered x_{0,0}..x_{n-1,0}, x_{0,1}, ... and named
/// "<name>_<j>". Output polynomials are the coefficients of t^0 for every input
/// polynomial, then of t^1, and so on, so the first slice reproduces `s`.
PolySystem jet_expand(const PolySystem& s, unsigned order);

/// Determinant of a square matrix of polynomials (fraction-free expansion).
IntPoly determinant(const std::vector<std::vector<IntPoly>>& matrix);

/// A polynomial with coefficients reduced into a fixed ring, laid out for fast evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  CompiledPoly(const IntPoly& p, const Ring& ring);

  Element eval(const Ring& ring, std::span<const Element> x) const noexcept;
  bool is_zero() const noexcept { return coefs_.empty(); }
  /// Largest variable index occurring, or -1 for a constant.
  std::ptrdiff_t max_var() const noexcept { return max_var_; }

 private:
  std::vector<Element> coefs_;
  std::vector<std::uint32_t> offsets_;  // term t uses factors_[offsets_[t] .. offsets_[t+1])
  std::vector<std::pair<std::uint32_t, std::uint32_t>> factors_;  // (variable, exponent)
  std::ptrdiff_t max_var_ = -1;
};

}  // namespace singcount
