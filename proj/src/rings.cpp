#include "singcount/rings.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>

#include "singcount/error.hpp"

namespace singcount {

namespace {

constexpr unsigned kMaxDigits = 64;
using Digits = std::array<std::uint64_t, kMaxDigits>;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// Polynomials over F_p, coefficient vectors low degree first, no trailing zeros.
using FpPoly = std::vector<std::uint64_t>;

void trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly poly_mod(FpPoly a, const FpPoly& b, std::uint64_t p) {
  trim(a);
  const std::uint64_t lead_inv = [&] {
    // b is monic in every call site except gcd; invert via Fermat.
    std::uint64_t r = 1, base = b.back(), e = p - 2;
    while (e) {
      if (e & 1) r = mulmod(r, base, p);
      base = mulmod(base, base, p);
      e >>= 1;
    }
    return r;
  }();
  while (a.size() >= b.size()) {
    const std::uint64_t c = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[shift + i] = (a[shift + i] + p - mulmod(c, b[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

FpPoly poly_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& h, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  return poly_mod(std::move(r), h, p);
}

// x^(p^k) mod h
FpPoly frobenius_power(const FpPoly& h, std::uint64_t p, unsigned k) {
  FpPoly x = poly_mod(FpPoly{0, 1}, h, p);
  for (unsigned i = 0; i < k; ++i) {
    FpPoly result{1};
    FpPoly base = x;
    std::uint64_t e = p;
    while (e) {
      if (e & 1) result = poly_mulmod(result, base, h, p);
      base = poly_mulmod(base, base, h, p);
      e >>= 1;
    }
    x = std::move(result);
  }
  return x;
}

FpPoly poly_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FpPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Rabin's irreducibility test for a monic polynomial of degree f.
bool is_irreducible(const FpPoly& h, std::uint64_t p) {
  const unsigned f = static_cast<unsigned>(h.size() - 1);
  FpPoly xq = frobenius_power(h, p, f);
  FpPoly x = poly_mod(FpPoly{0, 1}, h, p);
  if (xq != x) return false;
  for (unsigned r = 2; r <= f; ++r) {
    if (f % r != 0 || !is_prime(r)) continue;
    FpPoly g = frobenius_power(h, p, f / r);
    g.resize(std::max<std::size_t>(g.size(), 2), 0);
    g[1] = (g[1] + p - 1) % p;
    trim(g);
    if (poly_gcd(h, g, p).size() != 1) return false;
  }
  return true;
}

std::vector<std::uint64_t> least_irreducible(std::uint64_t p, unsigned f) {
  if (f == 1) return {0};
  std::vector<std::uint64_t> c(f, 0);
  while (true) {
    FpPoly h(c.begin(), c.end());
    h.push_back(1);
    if (h[0] != 0 && is_irreducible(h, p)) return c;
    // next coefficient vector in base-p counting order
    unsigned i = 0;
    while (i < f && ++c[i] == p) c[i++] = 0;
    if (i == f) throw DomainError("no irreducible polynomial found");
  }
}

unsigned parse_unsigned(std::string_view s, std::string_view what) {
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "' in ring spec", 1, 1);
  return v;
}

}  // namespace

std::string_view to_string(RingKind kind) { return kind == RingKind::Mixed ? "mixed" : "equal"; }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % d == 0) return n == d;
  }
  // Deterministic Miller-Rabin for 64-bit inputs.
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto powmod = [n](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= n;
    while (e) {
      if (e & 1) r = mulmod(r, b, n);
      b = mulmod(b, b, n);
      e >>= 1;
    }
    return r;
  };
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimePower PrimePower::make(std::uint64_t p, unsigned f) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  if (f == 0) throw DomainError("extension degree must be at least 1");
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), p, f);
  if (mpz_sizeinbase(q.get_mpz_t(), 2) > kMaxRingBits) throw BudgetError("prime power too large");
  return PrimePower{p, f, q.get_ui()};
}

PrimePower PrimePower::from_value(std::uint64_t q) {
  if (q < 2) throw DomainError(std::to_string(q) + " is not a prime power");
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return make(q, 1);
  unsigned f = 0;
  std::uint64_t r = q;
  while (r % p == 0) {
    r /= p;
    ++f;
  }
  if (r != 1) throw DomainError(std::to_string(q) + " is not a prime power");
  return make(p, f);
}

LocalRingSpec LocalRingSpec::parse(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw ParseError("ring spec must look like mixed:p^f:m", 1, 1);
  const auto kind_s = text.substr(0, c1);
  const auto pf = text.substr(c1 + 1, c2 - c1 - 1);
  const auto m_s = text.substr(c2 + 1);
  LocalRingSpec spec;
  if (kind_s == "mixed") {
    spec.kind = RingKind::Mixed;
  } else if (kind_s == "equal") {
    spec.kind = RingKind::Equal;
  } else {
    throw ParseError("ring kind must be 'mixed' or 'equal'", 1, 1);
  }
  const auto caret = pf.find('^');
  const unsigned p = parse_unsigned(pf.substr(0, caret), "prime");
  const unsigned f = caret == std::string_view::npos ? 1 : parse_unsigned(pf.substr(caret + 1), "degree");
  spec.q = PrimePower::make(p, f);
  spec.m = parse_unsigned(m_s, "length");
  if (spec.m == 0) throw DomainError("ring length m must be at least 1");
  return spec;
}

std::string LocalRingSpec::to_string() const {
  return std::string(singcount::to_string(kind)) + ":" + std::to_string(q.p) + "^" + std::to_string(q.f) + ":" +
         std::to_string(m);
}

mpz_class LocalRingSpec::cardinality() const {
  mpz_class c;
  mpz_ui_pow_ui(c.get_mpz_t(), q.q, m);
  return c;
}

Ring::Ring(const LocalRingSpec& spec, unsigned max_bits) : spec_(spec) {
  if (!is_prime(spec.q.p)) throw DomainError(std::to_string(spec.q.p) + " is not prime");
  if (spec.m == 0) throw DomainError("ring length m must be at least 1");
  const mpz_class card = spec.cardinality();
  if (mpz_sizeinbase(card.get_mpz_t(), 2) > std::min(max_bits, kMaxRingBits))
    throw BudgetError("ring " + spec.to_string() + " exceeds the size budget of 2^" + std::to_string(max_bits));
  card_ = card.get_ui();
  const std::uint64_t p = spec.q.p;
  pow_p_.resize(spec.m + 1);
  pow_p_[0] = 1;
  for (unsigned k = 1; k <= spec.m; ++k) pow_p_[k] = pow_p_[k - 1] * p;
  if (spec.kind == RingKind::Mixed) {
    modulus_ = pow_p_[spec.m];
    width_ = spec.q.f;
    digit_base_mixed_ = true;
  } else {
    modulus_ = p;
    width_ = spec.q.f * spec.m;
    digit_base_mixed_ = false;
  }
  scalar_ = width_ == 1;
  h_ = least_irreducible(p, spec.q.f);
  if (spec.q.f > 1 && spec.q.q <= 1024) {
    const auto q = spec.q.q;
    fq_table_.resize(q * q);
    for (std::uint64_t a = 0; a < q; ++a)
      for (std::uint64_t b = 0; b < q; ++b) fq_table_[a * q + b] = static_cast<std::uint32_t>(fq_mul_compute(a, b));
  }
}

RingHandle make_ring(const LocalRingSpec& spec, unsigned max_bits) { return std::make_shared<const Ring>(spec, max_bits); }

namespace {

inline void decode(Element a, std::uint64_t base, unsigned width, Digits& d) {
  for (unsigned i = 0; i < width; ++i) {
    d[i] = a % base;
    a /= base;
  }
}

inline Element encode(const Digits& d, std::uint64_t base, unsigned width) {
  Element a = 0;
  for (unsigned i = width; i-- > 0;) a = a * base + d[i];
  return a;
}

}  // namespace

Element Ring::add_slow(Element a, Element b) const noexcept {
  Digits x, y;
  decode(a, modulus_, width_, x);
  decode(b, modulus_, width_, y);
  for (unsigned i = 0; i < width_; ++i) {
    const auto s = x[i] + y[i];
    x[i] = s >= modulus_ ? s - modulus_ : s;
  }
  return encode(x, modulus_, width_);
}

Element Ring::neg_slow(Element a) const noexcept {
  Digits x;
  decode(a, modulus_, width_, x);
  for (unsigned i = 0; i < width_; ++i) x[i] = x[i] == 0 ? 0 : modulus_ - x[i];
  return encode(x, modulus_, width_);
}

Element Ring::fq_add(Element a, Element b) const noexcept {
  const auto p = spec_.q.p;
  if (spec_.q.f == 1) {
    const auto s = a + b;
    return s >= p ? s - p : s;
  }
  Digits x, y;
  decode(a, p, spec_.q.f, x);
  decode(b, p, spec_.q.f, y);
  for (unsigned i = 0; i < spec_.q.f; ++i) {
    const auto s = x[i] + y[i];
    x[i] = s >= p ? s - p : s;
  }
  return encode(x, p, spec_.q.f);
}

Element Ring::fq_neg(Element a) const noexcept {
  const auto p = spec_.q.p;
  if (spec_.q.f == 1) return a == 0 ? 0 : p - a;
  Digits x;
  decode(a, p, spec_.q.f, x);
  for (unsigned i = 0; i < spec_.q.f; ++i) x[i] = x[i] == 0 ? 0 : p - x[i];
  return encode(x, p, spec_.q.f);
}

Element Ring::fq_mul_compute(Element a, Element b) const noexcept {
  const auto p = spec_.q.p;
  const unsigned f = spec_.q.f;
  Digits x, y;
  decode(a, p, f, x);
  decode(b, p, f, y);
  std::array<std::uint64_t, 2 * kMaxDigits> prod{};
  for (unsigned i = 0; i < f; ++i) {
    if (x[i] == 0) continue;
    for (unsigned j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + mulmod(x[i], y[j], p)) % p;
  }
  for (unsigned d = 2 * f - 2; d >= f; --d) {
    const auto c = prod[d];
    if (c == 0) continue;
    prod[d] = 0;
    for (unsigned i = 0; i < f; ++i) prod[d - f + i] = (prod[d - f + i] + p - mulmod(c, h_[i], p)) % p;
  }
  Digits r{};
  std::copy_n(prod.begin(), f, r.begin());
  return encode(r, p, f);
}

Element Ring::fq_mul(Element a, Element b) const noexcept {
  if (spec_.q.f == 1) return mulmod(a, b, spec_.q.p);
  if (!fq_table_.empty()) return fq_table_[a * spec_.q.q + b];
  return fq_mul_compute(a, b);
}

Element Ring::fq_inv(Element a) const noexcept {
  Element r = 1;
  Element base = a;
  std::uint64_t e = spec_.q.q - 2;
  while (e) {
    if (e & 1) r = fq_mul(r, base);
    base = fq_mul(base, base);
    e >>= 1;
  }
  return r;
}

Element Ring::mul_slow(Element a, Element b) const noexcept {
  const unsigned f = spec_.q.f;
  if (digit_base_mixed_) {
    Digits x, y;
    decode(a, modulus_, f, x);
    decode(b, modulus_, f, y);
    std::array<std::uint64_t, 2 * kMaxDigits> prod{};
    const auto M = modulus_;
    for (unsigned i = 0; i < f; ++i) {
      if (x[i] == 0) continue;
      for (unsigned j = 0; j < f; ++j) {
        const auto t = prod[i + j] + mulmod(x[i], y[j], M);
        prod[i + j] = t >= M ? t - M : t;
      }
    }
    for (unsigned d = 2 * f - 2; d >= f; --d) {
      const auto c = prod[d];
      if (c == 0) continue;
      prod[d] = 0;
      for (unsigned i = 0; i < f; ++i) {
        const auto t = mulmod(c, h_[i], M);
        prod[d - f + i] = prod[d - f + i] >= t ? prod[d - f + i] - t : prod[d - f + i] + M - t;
      }
    }
    Digits r{};
    std::copy_n(prod.begin(), f, r.begin());
    return encode(r, M, f);
  }
  const unsigned m = spec_.m;
  const auto q = spec_.q.q;
  Digits x, y, r{};
  decode(a, q, m, x);
  decode(b, q, m, y);
  for (unsigned i = 0; i < m; ++i) {
    if (x[i] == 0) continue;
    for (unsigned j = 0; i + j < m; ++j) {
      if (y[j] == 0) continue;
      r[i + j] = fq_add(r[i + j], fq_mul(x[i], y[j]));
    }
  }
  return encode(r, q, m);
}

Element Ring::pow(Element a, std::uint64_t e) const noexcept {
  Element r = one();
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Element Ring::from_integer(const mpz_class& n) const {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), n.get_mpz_t(), characteristic());
  return r.get_ui();
}

Element Ring::from_integer(std::int64_t n) const {
  const auto c = static_cast<std::int64_t>(characteristic());
  auto r = n % c;
  if (r < 0) r += c;
  return static_cast<Element>(r);
}

Element Ring::inverse(Element a) const {
  if (!is_unit(a)) throw DomainError("element " + format(a) + " is not a unit");
  // |R^*| = (q - 1) q^(m-1)
  std::uint64_t order = spec_.q.q - 1;
  for (unsigned k = 1; k < spec_.m; ++k) order *= spec_.q.q;
  return pow(a, order - 1);
}

Element Ring::residue(Element a) const noexcept {
  if (digit_base_mixed_) {
    if (spec_.q.f == 1) return a % spec_.q.p;
    Digits x;
    decode(a, modulus_, spec_.q.f, x);
    for (unsigned i = 0; i < spec_.q.f; ++i) x[i] %= spec_.q.p;
    return encode(x, spec_.q.p, spec_.q.f);
  }
  return a % spec_.q.q;
}

Element Ring::embed_digit(Element v, unsigned k) const noexcept {
  if (digit_base_mixed_) {
    if (spec_.q.f == 1) return v * pow_p_[k];
    Digits x;
    decode(v, spec_.q.p, spec_.q.f, x);
    for (unsigned i = 0; i < spec_.q.f; ++i) x[i] *= pow_p_[k];
    return encode(x, modulus_, spec_.q.f);
  }
  Element s = v;
  for (unsigned i = 0; i < k; ++i) s *= spec_.q.q;
  return s;
}

Element Ring::digit(Element a, unsigned k) const noexcept {
  if (digit_base_mixed_) {
    if (spec_.q.f == 1) return (a / pow_p_[k]) % spec_.q.p;
    Digits x;
    decode(a, modulus_, spec_.q.f, x);
    for (unsigned i = 0; i < spec_.q.f; ++i) x[i] = (x[i] / pow_p_[k]) % spec_.q.p;
    return encode(x, spec_.q.p, spec_.q.f);
  }
  for (unsigned i = 0; i < k; ++i) a /= spec_.q.q;
  return a % spec_.q.q;
}

Element Ring::truncate(Element a, unsigned k) const noexcept {
  if (k >= spec_.m) return a;
  if (digit_base_mixed_) {
    if (spec_.q.f == 1) return a % pow_p_[k];
    Digits x;
    decode(a, modulus_, spec_.q.f, x);
    for (unsigned i = 0; i < spec_.q.f; ++i) x[i] %= pow_p_[k];
    return encode(x, modulus_, spec_.q.f);
  }
  Element s = 1;
  for (unsigned i = 0; i < k; ++i) s *= spec_.q.q;
  return a % s;
}

unsigned Ring::valuation(Element a) const noexcept {
  if (a == 0) return spec_.m;
  if (digit_base_mixed_) {
    Digits x;
    decode(a, modulus_, spec_.q.f, x);
    unsigned v = spec_.m;
    for (unsigned i = 0; i < spec_.q.f; ++i) {
      if (x[i] == 0) continue;
      unsigned k = 0;
      while (x[i] % spec_.q.p == 0) {
        x[i] /= spec_.q.p;
        ++k;
      }
      v = std::min(v, k);
    }
    return v;
  }
  unsigned k = 0;
  while (a % spec_.q.q == 0) {
    a /= spec_.q.q;
    ++k;
  }
  return k;
}

Ring Ring::residue_field() const { return Ring(LocalRingSpec{spec_.q, 1, spec_.kind}); }

std::ranges::iota_view<Element, Element> Ring::elements(std::uint64_t budget) const {
  if (card_ > budget)
    throw BudgetError("enumerating " + spec_.to_string() + " needs " + std::to_string(card_) +
                      " elements, budget is " + std::to_string(budget));
  return std::ranges::iota_view<Element, Element>(0, card_);
}

std::string Ring::format(Element a) const {
  if (scalar_) return std::to_string(a);
  Digits x;
  const bool mixed = digit_base_mixed_;
  const unsigned n = mixed ? spec_.q.f : spec_.m;
  decode(a, mixed ? modulus_ : spec_.q.q, n, x);
  std::string s = "[";
  for (unsigned i = 0; i < n; ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s + "]";
}

}  // namespace singcount
