#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "singcount/rings.hpp"
#include "singcount/schemes.hpp"

namespace singcount {

using GroupElement = std::uint32_t;

/// A finite group on elements 0..order-1 with 0 the identity. Built either
/// from a multiplication table or as SL_d over a finite local ring.
class FiniteGroup {
 public:
  /// Validates closure, associativity, identity and inverses. The identity
  /// may be any index; elements are relabelled so that it becomes 0.
  static FiniteGroup from_table(const std::vector<std::vector<std::uint32_t>>& table, std::string name);

  /// SL_d(R) as the closure of the elementary matrices I + b E_ij, b running
  /// over an additive basis of R. Throws BudgetError past `budget` elements.
  static FiniteGroup special_linear(unsigned d, const LocalRingSpec& spec, std::uint64_t budget = 100'000);

  const std::string& name() const noexcept { return name_; }
  std::size_t order() const noexcept { return inverse_.size(); }
  GroupElement identity() const noexcept { return 0; }
  GroupElement mul(GroupElement a, GroupElement b) const;
  GroupElement inv(GroupElement a) const noexcept { return inverse_[a]; }
  GroupElement commutator(GroupElement a, GroupElement b) const { return mul(mul(a, b), mul(inv(a), inv(b))); }
  std::uint64_t element_order(GroupElement a) const;
  const std::vector<GroupElement>& generators() const noexcept { return generators_; }
  bool is_matrix_group() const noexcept { return ring_ != nullptr; }
  /// Matrix entries (row-major) for matrix groups, the index otherwise.
  std::string format(GroupElement a) const;

 private:
  FiniteGroup() = default;
  void finish(std::size_t table_limit);
  std::uint64_t key(const Element* m) const;
  GroupElement lookup(std::uint64_t k) const;

  std::string name_;
  std::vector<GroupElement> inverse_;
  std::vector<GroupElement> generators_;
  std::vector<GroupElement> table_;  // order^2 entries when small enough

  // matrix representation
  std::shared_ptr<const Ring> ring_;
  unsigned d_ = 0;
  std::vector<Element> entries_;  // order * d * d
  std::vector<std::int32_t> dense_index_;
  std::unordered_map<std::uint64_t, GroupElement> sparse_index_;
};

/// Reads `order n` followed by n rows of n indices (0-based).
FiniteGroup read_group_table(std::istream& in, std::string name);
FiniteGroup quaternion_group();

struct ConjugacyClasses {
  std::vector<std::uint32_t> class_of;        // element -> class
  std::vector<GroupElement> representative;   // smallest element of each class
  std::vector<std::uint64_t> size;
  std::vector<std::uint32_t> inverse_class;   // class of x^-1

  std::size_t count() const noexcept { return size.size(); }
};

/// Orbits under conjugation by the generators; class 0 is the identity and
/// classes are numbered by their smallest element.
ConjugacyClasses conj_classes(const FiniteGroup& g);

/// Values of a class function, one per conjugacy class.
struct ClassFunction {
  std::vector<mpz_class> values;

  mpz_class total(const ConjugacyClasses& cc) const;  // sum over all group elements
  friend bool operator==(const ClassFunction&, const ClassFunction&) = default;
};

/// M(g) = #{(x, y) : [x, y] = g}. For each class representative x_D every y is
/// tried and the hit is weighted by |D|, using [x^h, y^h] = [x, y]^h.
ClassFunction commutator_distribution(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned threads = 1);

/// All |G|^2 pairs; reference implementation. Throws BudgetError past `pair_budget`.
ClassFunction commutator_distribution_exhaustive(const FiniteGroup& g, const ConjugacyClasses& cc,
                                                 std::uint64_t pair_budget = 100'000'000);

/// (M1 * M2)(g) = sum_h M1(h) M2(h^-1 g), evaluated at class representatives.
ClassFunction word_convolve(const FiniteGroup& g, const ConjugacyClasses& cc, const ClassFunction& m1,
                            const ClassFunction& m2, unsigned threads = 1);

/// M_n(g) = #{(g_i, h_i) : [g_1,h_1]...[g_n,h_n] = g}; M_0 is the delta at 1.
ClassFunction word_distribution(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads = 1);

/// M_n(1).
mpz_class def_count(const FiniteGroup& g, unsigned n, unsigned threads = 1);
mpz_class def_count(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads = 1);

/// def_count / |G|^(2n-1), n >= 1.
mpq_class frobenius_zeta(const FiniteGroup& g, unsigned n, unsigned threads = 1);
mpq_class frobenius_zeta(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads = 1);

struct CharDegrees {
  std::vector<std::uint64_t> degrees;  // ascending
  std::string source;
  std::uint64_t prime = 0;  // the field F_l used

  std::uint64_t r(std::uint64_t n) const;  // multiplicity of n
  friend bool operator==(const CharDegrees& a, const CharDegrees& b) { return a.degrees == b.degrees; }
};

/// Irreducible character degrees by the Burnside-Dixon method: common
/// eigenvectors of the class multiplication matrices over F_l, with l prime,
/// l = 1 mod exponent(G) and l > |G| so that d^2 is read off exactly.
CharDegrees character_degrees(const FiniteGroup& g, const ConjugacyClasses& cc, std::uint64_t seed = 0x5eed);

/// sum_i d_i^-s for integer s.
mpq_class rep_zeta_eval(const CharDegrees& deg, long s);
double rep_zeta_eval(const CharDegrees& deg, double s);

struct WordProbability {
  mpq_class probability;  // M_n(g) / |G|^(2n)
  mpq_class ratio;        // probability * |G|
};

WordProbability word_prob(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, GroupElement x,
                          unsigned threads = 1);
/// One entry per conjugacy class.
std::vector<WordProbability> word_prob_by_class(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n,
                                                unsigned threads = 1);

struct ZetaRow {
  std::string type;
  std::uint64_t p = 0;
  unsigned m = 1;
  unsigned n = 2;
  std::uint64_t order = 0;
  mpq_class frobenius;  // def_count / |G|^(2n-1)
  mpq_class character;  // sum d^-(2n-2)
  mpq_class q_times_zeta_minus_1;
  bool agree = false;
};

/// zeta_{SL_d(Z/p^m)}(2n-2) by the commutator count and by character degrees.
std::vector<ZetaRow> compact_zeta_table(unsigned d, std::uint64_t p, const std::vector<unsigned>& ms, unsigned n,
                                        std::uint64_t group_budget = 100'000, unsigned threads = 1);

void write_csv(std::ostream& out, const std::vector<ZetaRow>& rows);

struct AdelicProduct {
  mpq_class exact = 1;
  double value = 1.0;
  std::vector<std::uint64_t> primes;
  std::vector<mpq_class> factors;
  std::string note;
};

/// prod_{p <= p_max} zeta_{SL_d(Z/p^m)}(2n-2) via the commutator count.
AdelicProduct adelic_product(unsigned d, unsigned n, std::uint64_t p_max, unsigned m,
                             std::uint64_t group_budget = 100'000, unsigned threads = 1);

/// Genus threshold: 12 for types A, B, D; 21 for C; ceil(3 (dim g + 1) / 2)
/// for exceptional types, where dim g must be supplied.
unsigned rs_threshold(std::string_view type, std::optional<unsigned> dim = std::nullopt);

}  // namespace singcount
