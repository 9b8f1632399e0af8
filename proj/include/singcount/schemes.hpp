#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "singcount/polys.hpp"

namespace singcount {

/// Hypotheses the user asserts about the generic fiber. They are never checked,
/// only echoed into every report.
struct SchemeFlags {
  bool lci = false;
  bool reduced = false;
  bool abs_irreducible = false;

  friend bool operator==(const SchemeFlags&, const SchemeFlags&) = default;
};

/// Affine scheme over Z cut out by a polynomial system, with a declared
/// dimension of its generic fiber.
struct AffineScheme {
  std::string name;
  PolySystem system;
  int declared_dim = 0;
  SchemeFlags flags;
  /// True when declared_dim is an expected value (jet schemes) rather than user input.
  bool dim_is_expected = false;

  std::size_t arity() const noexcept { return system.arity(); }
  std::size_t num_equations() const noexcept { return system.polys.size(); }
  /// Throws DomainError unless 0 <= declared_dim <= arity and all arities agree.
  void validate() const;
  /// Stable textual form used for cache keys.
  std::string canonical_form() const;
};

/// Builds a scheme from expression strings.
AffineScheme make_scheme(std::string name, std::vector<std::string> vars, const std::vector<std::string>& polys,
                         int declared_dim, SchemeFlags flags = {});

/// Parses a scheme document:
/// {"name": ..., "vars": [...], "polys": [...], "dim": d, "lci": b, "reduced": b, "irreducible": b}.
/// Errors carry a line/column: of the JSON syntax error, or of the offending
/// position inside a polynomial string (line = index of the polynomial + 1).
AffineScheme load_scheme(std::string_view document);
AffineScheme load_scheme_file(const std::string& path);
nlohmann::json scheme_to_json(const AffineScheme& x);

/// A^d with no equations.
AffineScheme affine_space(unsigned d);

/// The m-th jet scheme; declared dimension (m+1) * dim X is the expected one.
AffineScheme jet_scheme(const AffineScheme& x, unsigned m);

/// The open subscheme g != 0, realised by a new variable w and the equation w*g - 1.
AffineScheme distinguished_open(const AffineScheme& x, const IntPoly& g);

/// X together with all c x c minors of its Jacobian, c = arity - declared_dim.
AffineScheme singular_subscheme(const AffineScheme& x);

enum class GroupType { SL };

/// Hom(pi_1(closed genus-n surface), SL_d): 2n matrices of determinant 1 whose
/// product of commutators is the identity. Inverses are adjugates.
AffineScheme def_scheme(GroupType type, unsigned d, unsigned n);

/// SL_d as a scheme in d^2 variables.
AffineScheme sl_scheme(unsigned d);

}  // namespace singcount
