#pragma once

#include <cstdint>
#include <memory>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace singcount {

/// Canonical index of a ring element, in [0, |R|).
///
/// For Z/p^m this is the residue itself. For the other rings it is the
/// mixed-radix encoding of the coordinate vector (see Ring).
using Element = std::uint64_t;

enum class RingKind { Mixed, Equal };

std::string_view to_string(RingKind kind);

bool is_prime(std::uint64_t n);

struct PrimePower {
  std::uint64_t p = 2;
  unsigned f = 1;
  std::uint64_t q = 2;

  /// Throws DomainError if p is not prime or p^f does not fit in 62 bits.
  static PrimePower make(std::uint64_t p, unsigned f);
  /// Factors q as p^f; throws DomainError unless q is a prime power.
  static PrimePower from_value(std::uint64_t q);

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Z_q / m^m (Mixed) or F_q[t] / t^m (Equal).
struct LocalRingSpec {
  PrimePower q;
  unsigned m = 1;
  RingKind kind = RingKind::Mixed;

  /// Parses `mixed:p^f:m` / `equal:p^f:m`.
  static LocalRingSpec parse(std::string_view text);
  std::string to_string() const;
  mpz_class cardinality() const;

  friend bool operator==(const LocalRingSpec&, const LocalRingSpec&) = default;
};

/// Default ceiling on log2 |R|; elements must fit a 64-bit index.
inline constexpr unsigned kMaxRingBits = 62;

/// A finite local ring with residue field F_q.
///
/// Mixed characteristic is realised as (Z/p^m)[u]/(h(u)), equal characteristic
/// as ((Z/p)[u]/(h(u)))[t]/(t^m), where h is the lexicographically least monic
/// irreducible polynomial of degree f over F_p (coefficient vectors compared as
/// base-p numbers c_0 + c_1 p + ... ).
///
/// Encoding of an Element:
///   Mixed: limbs a_0..a_{f-1} in Z/p^m, index = sum a_i (p^m)^i.
///   Equal: coefficients b_0..b_{m-1} in F_q of 1, t, ..., t^{m-1},
///          index = sum b_j q^j, and an F_q value b = sum c_i u^i is sum c_i p^i.
/// Both kinds encode the residue field F_q identically.
///
/// Immutable after construction and safe to share between threads.
class Ring {
 public:
  explicit Ring(const LocalRingSpec& spec, unsigned max_bits = kMaxRingBits);

  const LocalRingSpec& spec() const noexcept { return spec_; }
  std::uint64_t p() const noexcept { return spec_.q.p; }
  unsigned f() const noexcept { return spec_.q.f; }
  std::uint64_t q() const noexcept { return spec_.q.q; }
  unsigned length() const noexcept { return spec_.m; }
  RingKind kind() const noexcept { return spec_.kind; }
  std::uint64_t cardinality() const noexcept { return card_; }
  /// Additive order of 1: p^m (Mixed) or p (Equal).
  std::uint64_t characteristic() const noexcept { return digit_base_mixed_ ? modulus_ : spec_.q.p; }
  /// Defining polynomial of F_q over F_p, low degree first, monic term omitted.
  std::span<const std::uint64_t> defining_polynomial() const noexcept { return h_; }

  Element zero() const noexcept { return 0; }
  Element one() const noexcept { return 1; }

  Element add(Element a, Element b) const noexcept {
    if (scalar_) {
      const Element s = a + b;
      return s >= modulus_ ? s - modulus_ : s;
    }
    return add_slow(a, b);
  }
  Element sub(Element a, Element b) const noexcept { return add(a, neg(b)); }
  Element neg(Element a) const noexcept {
    if (scalar_) return a == 0 ? 0 : modulus_ - a;
    return neg_slow(a);
  }
  Element mul(Element a, Element b) const noexcept {
    if (scalar_) {
      if (modulus_ <= 0xFFFFFFFFULL) return a * b % modulus_;
      return static_cast<Element>(static_cast<unsigned __int128>(a) * b % modulus_);
    }
    return mul_slow(a, b);
  }
  Element pow(Element a, std::uint64_t e) const noexcept;

  /// Reduction of an integer into the prime subring.
  Element from_integer(const mpz_class& n) const;
  Element from_integer(std::int64_t n) const;

  bool is_unit(Element a) const noexcept { return residue(a) != 0; }
  /// Multiplicative inverse; a must be a unit.
  Element inverse(Element a) const;

  /// The ring homomorphism R -> F_q; result uses the residue-field encoding.
  Element residue(Element a) const noexcept;
  /// pi^k * lift(v) for v in F_q (pi = p or t); requires k < m.
  Element embed_digit(Element v, unsigned k) const noexcept;
  /// For a in pi^k R, the class of a / pi^k modulo pi, as an element of F_q.
  Element digit(Element a, unsigned k) const noexcept;
  /// a modulo pi^k, canonical representative.
  Element truncate(Element a, unsigned k) const noexcept;
  /// Largest k with a in pi^k R (m for zero).
  unsigned valuation(Element a) const noexcept;

  /// The residue field F_q as a ring of length 1 (same encoding as residue()).
  Ring residue_field() const;

  /// Deterministic enumeration 0, 1, ..., |R|-1; throws BudgetError above the budget.
  std::ranges::iota_view<Element, Element> elements(std::uint64_t budget) const;

  std::string format(Element a) const;

  // F_q arithmetic on residue-field encoded values.
  Element fq_add(Element a, Element b) const noexcept;
  Element fq_neg(Element a) const noexcept;
  Element fq_mul(Element a, Element b) const noexcept;
  Element fq_inv(Element a) const noexcept;

 private:
  Element add_slow(Element a, Element b) const noexcept;
  Element neg_slow(Element a) const noexcept;
  Element mul_slow(Element a, Element b) const noexcept;
  Element fq_mul_compute(Element a, Element b) const noexcept;

  LocalRingSpec spec_;
  std::uint64_t card_ = 0;
  std::uint64_t modulus_ = 0;  // p^m (Mixed) or p (Equal): modulus of one base digit
  bool digit_base_mixed_ = true;
  bool scalar_ = false;  // single digit: Z/p^m or F_p
  unsigned width_ = 1;   // number of base digits
  std::vector<std::uint64_t> h_;
  std::vector<std::uint64_t> pow_p_;  // p^0 .. p^m
  std::vector<std::uint32_t> fq_table_;  // q*q multiplication table of F_q when q is small and f > 1
};

using RingHandle = std::shared_ptr<const Ring>;

RingHandle make_ring(const LocalRingSpec& spec, unsigned max_bits = kMaxRingBits);

}  // namespace singcount
