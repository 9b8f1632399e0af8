#include "singcount/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "singcount/error.hpp"
#include "singcount/parallel.hpp"

namespace singcount {

namespace {

constexpr std::size_t kTableLimit = 2048;
constexpr std::uint64_t kDenseKeyLimit = 1ULL << 26;

mpz_class pow_ui(std::uint64_t base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<std::uint32_t>>& t, std::string name) {
  const std::size_t n = t.size();
  if (n == 0) throw DomainError("empty multiplication table");
  for (const auto& row : t) {
    if (row.size() != n) throw DomainError("multiplication table is not square");
    for (auto v : row)
      if (v >= n) throw DomainError("table entry " + std::to_string(v) + " out of range");
  }
  std::size_t e = n;
  for (std::size_t a = 0; a < n && e == n; ++a) {
    bool ok = true;
    for (std::size_t b = 0; b < n && ok; ++b) ok = t[a][b] == b && t[b][a] == b;
    if (ok) e = a;
  }
  if (e == n) throw DomainError("table has no identity element");
  // relabel: swap e and 0
  auto relabel = [&](std::uint32_t x) -> std::uint32_t {
    if (x == e) return 0;
    if (x == 0) return static_cast<std::uint32_t>(e);
    return x;
  };
  FiniteGroup g;
  g.name_ = std::move(name);
  g.table_.assign(n * n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) g.table_[relabel(a) * n + relabel(b)] = relabel(t[a][b]);
  g.inverse_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t b = 0;
    while (b < n && g.table_[a * n + b] != 0) ++b;
    if (b == n || g.table_[b * n + a] != 0) throw DomainError("element " + std::to_string(a) + " has no inverse");
    g.inverse_[a] = static_cast<GroupElement>(b);
  }
  auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
    const auto ab_c = g.table_[g.table_[a * n + b] * n + c];
    const auto a_bc = g.table_[a * n + g.table_[b * n + c]];
    if (ab_c != a_bc) throw DomainError("multiplication table is not associative");
  };
  if (n <= 256) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) check(a, b, c);
  } else {
    std::mt19937_64 rng(n);
    for (int i = 0; i < 1'000'000; ++i) check(rng() % n, rng() % n, rng() % n);
  }
  // greedy generating set
  std::vector<bool> in(n, false);
  in[0] = true;
  std::vector<GroupElement> members{0};
  for (GroupElement x = 1; x < n; ++x) {
    if (in[x]) continue;
    g.generators_.push_back(x);
    // closure of members under right multiplication by all generators
    std::deque<GroupElement> queue(members.begin(), members.end());
    while (!queue.empty()) {
      const auto y = queue.front();
      queue.pop_front();
      for (auto s : g.generators_) {
        const auto z = g.table_[y * n + s];
        if (!in[z]) {
          in[z] = true;
          members.push_back(z);
          queue.push_back(z);
        }
      }
    }
  }
  return g;
}

FiniteGroup FiniteGroup::special_linear(unsigned d, const LocalRingSpec& spec, std::uint64_t budget) {
  if (d < 1) throw DomainError("matrix size must be at least 1");
  FiniteGroup g;
  g.ring_ = make_ring(spec);
  g.d_ = d;
  const Ring& r = *g.ring_;
  g.name_ = "SL" + std::to_string(d) + "(" + spec.to_string() + ")";
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  {
    mpz_class keys = pow_ui(r.cardinality(), dd);
    if (keys >= mpz_class(1) << 63) throw DomainError("matrix keys of " + g.name_ + " do not fit 63 bits");
    if (keys <= kDenseKeyLimit) g.dense_index_.assign(keys.get_ui(), -1);
  }
  auto insert = [&](const Element* m) -> std::pair<GroupElement, bool> {
    const auto k = g.key(m);
    if (!g.dense_index_.empty()) {
      auto& slot = g.dense_index_[k];
      if (slot >= 0) return {static_cast<GroupElement>(slot), false};
      slot = static_cast<std::int32_t>(g.entries_.size() / dd);
    } else {
      auto [it, fresh] = g.sparse_index_.emplace(k, static_cast<GroupElement>(g.entries_.size() / dd));
      if (!fresh) return {it->second, false};
    }
    if (g.entries_.size() / dd >= budget)
      throw BudgetError(g.name_ + " has more than " + std::to_string(budget) + " elements");
    g.entries_.insert(g.entries_.end(), m, m + dd);
    return {static_cast<GroupElement>(g.entries_.size() / dd - 1), true};
  };

  // elementary generators I + b E_ij with b = pi^j u^k
  std::vector<Element> additive;
  for (unsigned level = 0; level < r.length(); ++level)
    for (unsigned k = 0; k < r.f(); ++k) {
      Element u = 1;
      for (unsigned i = 0; i < k; ++i) u *= r.p();  // F_q index of u^k
      additive.push_back(r.embed_digit(u, level));
    }
  std::vector<std::vector<Element>> gens, gen_inverses;
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = 0; j < d; ++j) {
      if (i == j) continue;
      for (auto b : additive) {
        std::vector<Element> m(dd, 0), mi(dd, 0);
        for (unsigned k = 0; k < d; ++k) m[k * d + k] = mi[k * d + k] = 1;
        m[i * d + j] = b;
        mi[i * d + j] = r.neg(b);
        gens.push_back(std::move(m));
        gen_inverses.push_back(std::move(mi));
      }
    }
  std::vector<Element> id(dd, 0);
  for (unsigned k = 0; k < d; ++k) id[k * d + k] = 1;
  insert(id.data());
  std::vector<GroupElement> parent{0};
  std::vector<std::uint32_t> via{0};
  std::vector<Element> prod(dd);
  for (std::size_t head = 0; head < g.entries_.size() / dd; ++head) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      const Element* a = &g.entries_[head * dd];
      for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j) {
          Element acc = 0;
          for (unsigned k = 0; k < d; ++k) acc = r.add(acc, r.mul(a[i * d + k], gens[s][k * d + j]));
          prod[i * d + j] = acc;
        }
      auto [idx, fresh] = insert(prod.data());
      if (fresh) {
        parent.push_back(static_cast<GroupElement>(head));
        via.push_back(static_cast<std::uint32_t>(s));
      }
    }
  }
  const std::size_t n = g.entries_.size() / dd;
  for (const auto& m : gens) g.generators_.push_back(g.lookup(g.key(m.data())));
  std::vector<GroupElement> gen_inv;
  for (const auto& m : gen_inverses) gen_inv.push_back(g.lookup(g.key(m.data())));
  // x = parent * s, so x^-1 = s^-1 * parent^-1; parents precede children
  g.inverse_.assign(n, 0);
  for (std::size_t x = 1; x < n; ++x) g.inverse_[x] = g.mul(gen_inv[via[x]], g.inverse_[parent[x]]);
  g.finish(kTableLimit);
  return g;
}

void FiniteGroup::finish(std::size_t table_limit) {
  const std::size_t n = order();
  if (!table_.empty() || n > table_limit) return;
  std::vector<GroupElement> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = mul(static_cast<GroupElement>(a), static_cast<GroupElement>(b));
  table_ = std::move(t);
}

std::uint64_t FiniteGroup::key(const Element* m) const {
  std::uint64_t k = 0;
  const std::uint64_t base = ring_->cardinality();
  for (std::size_t i = static_cast<std::size_t>(d_) * d_; i-- > 0;) k = k * base + m[i];
  return k;
}

GroupElement FiniteGroup::lookup(std::uint64_t k) const {
  if (!dense_index_.empty()) {
    const auto v = dense_index_[k];
    if (v < 0) throw Error("matrix outside " + name_);
    return static_cast<GroupElement>(v);
  }
  const auto it = sparse_index_.find(k);
  if (it == sparse_index_.end()) throw Error("matrix outside " + name_);
  return it->second;
}

GroupElement FiniteGroup::mul(GroupElement a, GroupElement b) const {
  if (!table_.empty()) return table_[static_cast<std::size_t>(a) * order() + b];
  const Ring& r = *ring_;
  const unsigned d = d_;
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const Element* x = &entries_[a * dd];
  const Element* y = &entries_[b * dd];
  Element prod[64];
  std::vector<Element> big;
  Element* out = prod;
  if (dd > 64) {
    big.resize(dd);
    out = big.data();
  }
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = 0; j < d; ++j) {
      Element acc = 0;
      for (unsigned k = 0; k < d; ++k) acc = r.add(acc, r.mul(x[i * d + k], y[k * d + j]));
      out[i * d + j] = acc;
    }
  return lookup(key(out));
}

std::uint64_t FiniteGroup::element_order(GroupElement a) const {
  std::uint64_t k = 1;
  GroupElement x = a;
  while (x != 0) {
    x = mul(x, a);
    ++k;
  }
  return k;
}

std::string FiniteGroup::format(GroupElement a) const {
  if (!ring_) return std::to_string(a);
  std::string s = "[";
  for (unsigned i = 0; i < d_; ++i) {
    s += i ? ",[" : "[";
    for (unsigned j = 0; j < d_; ++j) {
      if (j) s += ",";
      s += ring_->format(entries_[a * d_ * d_ + i * d_ + j]);
    }
    s += "]";
  }
  return s + "]";
}

FiniteGroup read_group_table(std::istream& in, std::string name) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word) || word != "order") throw ParseError("expected 'order n'", 1, 1);
  if (!(in >> n) || n == 0) throw ParseError("expected a positive group order", 1, 7);
  std::vector<std::vector<std::uint32_t>> t(n, std::vector<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> t[i][j]))
        throw ParseError("table ends early or holds a non-integer", static_cast<int>(i + 2), static_cast<int>(j + 1));
  if (in >> word) throw ParseError("trailing data after the table", static_cast<int>(n + 2), 1);
  return FiniteGroup::from_table(t, std::move(name));
}

FiniteGroup quaternion_group() {
  // elements (sign, unit) with units 1, i, j, k: index = 4 * sign + unit
  static const int unit_mul[4][4][2] = {
      {{0, 0}, {0, 1}, {0, 2}, {0, 3}},
      {{0, 1}, {1, 0}, {0, 3}, {1, 2}},
      {{0, 2}, {1, 3}, {1, 0}, {0, 1}},
      {{0, 3}, {0, 2}, {1, 1}, {1, 0}},
  };
  std::vector<std::vector<std::uint32_t>> t(8, std::vector<std::uint32_t>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const auto& r = unit_mul[a % 4][b % 4];
      const int sign = (a / 4 + b / 4 + r[0]) % 2;
      t[a][b] = static_cast<std::uint32_t>(4 * sign + r[1]);
    }
  return FiniteGroup::from_table(t, "Q8");
}

// ---------------------------------------------------------------------------
// classes and class functions

ConjugacyClasses conj_classes(const FiniteGroup& g) {
  const std::size_t n = g.order();
  ConjugacyClasses cc;
  cc.class_of.assign(n, UINT32_MAX);
  std::vector<GroupElement> gens = g.generators();
  std::vector<GroupElement> gen_inv;
  for (auto s : gens) gen_inv.push_back(g.inv(s));
  for (GroupElement x = 0; x < n; ++x) {
    if (cc.class_of[x] != UINT32_MAX) continue;
    const auto id = static_cast<std::uint32_t>(cc.size.size());
    cc.class_of[x] = id;
    cc.representative.push_back(x);
    std::uint64_t size = 1;
    std::deque<GroupElement> queue{x};
    while (!queue.empty()) {
      const auto y = queue.front();
      queue.pop_front();
      for (std::size_t s = 0; s < gens.size(); ++s) {
        const auto z = g.mul(g.mul(gens[s], y), gen_inv[s]);
        if (cc.class_of[z] == UINT32_MAX) {
          cc.class_of[z] = id;
          ++size;
          queue.push_back(z);
        }
      }
    }
    cc.size.push_back(size);
  }
  for (auto rep : cc.representative) cc.inverse_class.push_back(cc.class_of[g.inv(rep)]);
  return cc;
}

mpz_class ClassFunction::total(const ConjugacyClasses& cc) const {
  mpz_class t = 0;
  for (std::size_t c = 0; c < values.size(); ++c) t += values[c] * mpz_class(std::to_string(cc.size[c]));
  return t;
}

namespace {

ClassFunction per_element(const std::vector<mpz_class>& class_totals, const ConjugacyClasses& cc) {
  ClassFunction f;
  for (std::size_t c = 0; c < cc.count(); ++c) {
    mpz_class v = class_totals[c];
    const mpz_class sz(std::to_string(cc.size[c]));
    if (v % sz != 0) throw Error("class total not divisible by the class size");
    f.values.push_back(v / sz);
  }
  return f;
}

mpz_class mpz_u64(std::uint64_t v) { return mpz_class(std::to_string(v)); }

}  // namespace

ClassFunction commutator_distribution(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned threads) {
  const std::size_t n = g.order();
  const std::size_t k = cc.count();
  std::vector<std::vector<std::uint64_t>> hits(k, std::vector<std::uint64_t>(k, 0));
  parallel_for(std::max(1U, threads), k, [&](unsigned, std::size_t d) {
    const auto x = cc.representative[d];
    const auto x_inv = g.inv(x);
    auto& row = hits[d];
    for (GroupElement y = 0; y < n; ++y) row[cc.class_of[g.mul(g.mul(x, y), g.mul(x_inv, g.inv(y)))]]++;
  });
  std::vector<mpz_class> totals(k, 0);
  for (std::size_t d = 0; d < k; ++d)
    for (std::size_t c = 0; c < k; ++c)
      if (hits[d][c]) totals[c] += mpz_u64(cc.size[d]) * mpz_u64(hits[d][c]);
  return per_element(totals, cc);
}

ClassFunction commutator_distribution_exhaustive(const FiniteGroup& g, const ConjugacyClasses& cc,
                                                 std::uint64_t pair_budget) {
  const std::size_t n = g.order();
  if (static_cast<unsigned __int128>(n) * n > pair_budget)
    throw BudgetError("commutator enumeration needs " + std::to_string(n) + "^2 pairs, budget is " +
                      std::to_string(pair_budget));
  std::vector<std::uint64_t> hits(cc.count(), 0);
  for (GroupElement x = 0; x < n; ++x)
    for (GroupElement y = 0; y < n; ++y) hits[cc.class_of[g.commutator(x, y)]]++;
  std::vector<mpz_class> totals;
  for (auto h : hits) totals.push_back(mpz_u64(h));
  return per_element(totals, cc);
}

ClassFunction word_convolve(const FiniteGroup& g, const ConjugacyClasses& cc, const ClassFunction& m1,
                            const ClassFunction& m2, unsigned threads) {
  const std::size_t n = g.order();
  const std::size_t k = cc.count();
  if (m1.values.size() != k || m2.values.size() != k) throw DomainError("class functions of a different group");
  std::vector<mpz_class> out(k, 0);
  parallel_for(std::max(1U, threads), k, [&](unsigned, std::size_t c) {
    const auto target = cc.representative[c];
    std::vector<std::uint64_t> pairs(k * k, 0);
    for (GroupElement h = 0; h < n; ++h) pairs[cc.class_of[h] * k + cc.class_of[g.mul(g.inv(h), target)]]++;
    mpz_class acc = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (pairs[a * k + b]) acc += m1.values[a] * m2.values[b] * mpz_u64(pairs[a * k + b]);
    out[c] = acc;
  });
  return ClassFunction{std::move(out)};
}

ClassFunction word_distribution(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads) {
  ClassFunction m;
  m.values.assign(cc.count(), 0);
  m.values[0] = 1;
  if (n == 0) return m;
  const ClassFunction comm = commutator_distribution(g, cc, threads);
  m = comm;
  for (unsigned i = 1; i < n; ++i) m = word_convolve(g, cc, m, comm, threads);
  return m;
}

mpz_class def_count(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads) {
  return word_distribution(g, cc, n, threads).values[0];
}

mpz_class def_count(const FiniteGroup& g, unsigned n, unsigned threads) {
  return def_count(g, conj_classes(g), n, threads);
}

mpq_class frobenius_zeta(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, unsigned threads) {
  if (n == 0) throw DomainError("genus must be at least 1");
  mpq_class z(def_count(g, cc, n, threads), pow_ui(g.order(), 2UL * n - 1));
  z.canonicalize();
  return z;
}

mpq_class frobenius_zeta(const FiniteGroup& g, unsigned n, unsigned threads) {
  return frobenius_zeta(g, conj_classes(g), n, threads);
}

// ---------------------------------------------------------------------------
// character degrees

namespace {

struct ModP {
  std::uint64_t l;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % l; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + l - b) % l; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % l);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  std::uint64_t inv(std::uint64_t a) const { return pow(a, l - 2); }
};

using Matrix = std::vector<std::vector<std::uint64_t>>;

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(Matrix& a, std::size_t cols, const ModP& f) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t piv = row;
    while (piv < a.size() && a[piv][col] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[row]);
    const auto inv = f.inv(a[row][col]);
    for (auto& v : a[row]) v = f.mul(v, inv);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][col] == 0) continue;
      const auto factor = a[r][col];
      for (std::size_t j = 0; j < cols; ++j) a[r][j] = f.sub(a[r][j], f.mul(factor, a[row][j]));
    }
    pivots.push_back(col);
    ++row;
  }
  a.resize(row);
  return pivots;
}

// Null space basis of a (rows x cols).
Matrix kernel(Matrix a, std::size_t cols, const ModP& f) {
  const auto pivots = rref(a, cols, f);
  Matrix basis;
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  for (std::size_t fc = 0; fc < cols; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<std::uint64_t> v(cols, 0);
    v[fc] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = f.sub(0, a[r][fc]);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Characteristic polynomial via Hessenberg reduction; coefficients low degree first, monic.
std::vector<std::uint64_t> charpoly(Matrix h, const ModP& f) {
  const std::size_t n = h.size();
  for (std::size_t j = 0; j + 2 < n + 0 && j + 1 < n; ++j) {
    std::size_t i = j + 1;
    while (i < n && h[i][j] == 0) ++i;
    if (i == n) continue;
    if (i != j + 1) {
      std::swap(h[i], h[j + 1]);
      for (std::size_t r = 0; r < n; ++r) std::swap(h[r][i], h[r][j + 1]);
    }
    const auto inv = f.inv(h[j + 1][j]);
    for (std::size_t r = j + 2; r < n; ++r) {
      if (h[r][j] == 0) continue;
      const auto factor = f.mul(h[r][j], inv);
      for (std::size_t c = 0; c < n; ++c) h[r][c] = f.sub(h[r][c], f.mul(factor, h[j + 1][c]));
      for (std::size_t c = 0; c < n; ++c) h[c][j + 1] = f.add(h[c][j + 1], f.mul(factor, h[c][r]));
    }
  }
  // p_0 = 1, p_{m+1} = (x - h_mm) p_m - sum_{i<m} (prod_{k=i+1..m} h_{k,k-1}) h_{i,m} p_i
  std::vector<std::vector<std::uint64_t>> p(n + 1);
  p[0] = {1};
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<std::uint64_t> next(m + 2, 0);
    for (std::size_t d = 0; d <= m; ++d) {
      next[d + 1] = f.add(next[d + 1], p[m][d]);
      next[d] = f.sub(next[d], f.mul(h[m][m], p[m][d]));
    }
    std::uint64_t prod = 1;
    for (std::size_t i = m; i-- > 0;) {
      prod = f.mul(prod, h[i + 1][i]);
      if (prod == 0) break;
      const auto c = f.mul(prod, h[i][m]);
      for (std::size_t d = 0; d < p[i].size(); ++d) next[d] = f.sub(next[d], f.mul(c, p[i][d]));
    }
    p[m + 1] = std::move(next);
  }
  return p[n];
}

std::uint64_t eval_mod(const std::vector<std::uint64_t>& poly, std::uint64_t x, const ModP& f) {
  std::uint64_t acc = 0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = f.add(f.mul(acc, x), poly[i]);
  return acc;
}

struct DixonFailure {};

std::vector<std::uint64_t> dixon_at(const FiniteGroup& g, const ConjugacyClasses& cc, std::uint64_t l,
                                    std::mt19937_64& rng) {
  const ModP f{l};
  const std::size_t k = cc.count();
  const std::size_t n = g.order();
  // c[j][i][kk] = #{x in C_j : x^-1 z_kk in C_i}
  std::vector<std::uint64_t> c(k * k * k, 0);
  for (std::size_t kk = 0; kk < k; ++kk) {
    const auto z = cc.representative[kk];
    for (GroupElement x = 0; x < n; ++x) c[(cc.class_of[x] * k + cc.class_of[g.mul(g.inv(x), z)]) * k + kk]++;
  }
  auto apply = [&](const std::vector<std::uint64_t>& coef, const std::vector<std::uint64_t>& v) {
    std::vector<std::uint64_t> out(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
      if (coef[j] == 0) continue;
      for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t kk = 0; kk < k; ++kk)
          if (v[kk]) acc = f.add(acc, f.mul(c[(j * k + i) * k + kk] % l, v[kk]));
        out[i] = f.add(out[i], f.mul(coef[j], acc));
      }
    }
    return out;
  };

  std::vector<Matrix> pending;
  {
    Matrix full(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) full[i][i] = 1;
    pending.push_back(std::move(full));
  }
  std::vector<std::vector<std::uint64_t>> lines;
  while (!pending.empty()) {
    Matrix basis = std::move(pending.back());
    pending.pop_back();
    const auto pivots = rref(basis, k, f);
    const std::size_t w = basis.size();
    if (w == 1) {
      lines.push_back(basis[0]);
      continue;
    }
    bool split = false;
    for (int attempt = 0; attempt < 24 && !split; ++attempt) {
      std::vector<std::uint64_t> coef(k);
      for (auto& v : coef) v = rng() % l;
      // restriction: column b = coordinates of A basis_b, read at the pivots
      Matrix r(w, std::vector<std::uint64_t>(w, 0));
      for (std::size_t b = 0; b < w; ++b) {
        const auto image = apply(coef, basis[b]);
        for (std::size_t a = 0; a < w; ++a) r[a][b] = image[pivots[a]];
      }
      const auto poly = charpoly(r, f);
      std::vector<std::uint64_t> roots;
      for (std::uint64_t x = 0; x < l; ++x)
        if (eval_mod(poly, x, f) == 0) roots.push_back(x);
      if (roots.size() < 2) continue;
      std::vector<Matrix> parts;
      std::size_t total = 0;
      for (auto lambda : roots) {
        Matrix shifted = r;
        for (std::size_t a = 0; a < w; ++a) shifted[a][a] = f.sub(shifted[a][a], lambda);
        const Matrix ker = kernel(shifted, w, f);
        Matrix sub;
        for (const auto& y : ker) {
          std::vector<std::uint64_t> v(k, 0);
          for (std::size_t a = 0; a < w; ++a)
            if (y[a])
              for (std::size_t i = 0; i < k; ++i) v[i] = f.add(v[i], f.mul(y[a], basis[a][i]));
          sub.push_back(std::move(v));
        }
        total += sub.size();
        parts.push_back(std::move(sub));
      }
      if (total != w) throw DixonFailure{};
      for (auto& part : parts) pending.push_back(std::move(part));
      split = true;
    }
    if (!split) throw DixonFailure{};
  }
  if (lines.size() != k) throw DixonFailure{};

  std::vector<std::uint64_t> degrees;
  for (auto& v : lines) {
    if (v[0] == 0) throw DixonFailure{};
    const auto norm = f.inv(v[0]);
    for (auto& x : v) x = f.mul(x, norm);
    std::uint64_t s = 0;
    for (std::size_t kk = 0; kk < k; ++kk)
      s = f.add(s, f.mul(f.mul(v[kk], v[cc.inverse_class[kk]]), f.inv(cc.size[kk] % l)));
    if (s == 0) throw DixonFailure{};
    const std::uint64_t d2 = f.mul(n % l, f.inv(s));
    std::uint64_t d = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(d2)));
    while (d * d > d2) --d;
    while ((d + 1) * (d + 1) <= d2) ++d;
    if (d == 0 || d * d != d2 || n % d != 0) throw DixonFailure{};
    degrees.push_back(d);
  }
  std::sort(degrees.begin(), degrees.end());
  std::uint64_t sum = 0;
  for (auto d : degrees) sum += d * d;
  if (sum != n) throw DixonFailure{};
  return degrees;
}

}  // namespace

std::uint64_t CharDegrees::r(std::uint64_t n) const {
  return static_cast<std::uint64_t>(std::count(degrees.begin(), degrees.end(), n));
}

CharDegrees character_degrees(const FiniteGroup& g, const ConjugacyClasses& cc, std::uint64_t seed) {
  std::uint64_t exponent = 1;
  for (auto rep : cc.representative) exponent = std::lcm(exponent, g.element_order(rep));
  std::uint64_t l = exponent * (g.order() / exponent + 1) + 1;
  std::mt19937_64 rng(seed);
  for (int tries = 0; tries < 8; ++tries, l += exponent) {
    while (!is_prime(l)) l += exponent;
    try {
      return CharDegrees{dixon_at(g, cc, l, rng), "dixon", l};
    } catch (const DixonFailure&) {
    }
  }
  throw Error("character degree computation failed for " + g.name());
}

mpq_class rep_zeta_eval(const CharDegrees& deg, long s) {
  mpq_class acc = 0;
  for (auto d : deg.degrees) {
    const mpz_class pw = pow_ui(d, static_cast<unsigned long>(s < 0 ? -s : s));
    acc += s >= 0 ? mpq_class(1, pw) : mpq_class(pw);
  }
  acc.canonicalize();
  return acc;
}

double rep_zeta_eval(const CharDegrees& deg, double s) {
  double acc = 0;
  for (auto d : deg.degrees) acc += std::pow(static_cast<double>(d), -s);
  return acc;
}

std::vector<WordProbability> word_prob_by_class(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n,
                                                unsigned threads) {
  const auto m = word_distribution(g, cc, n, threads);
  const mpz_class denom = pow_ui(g.order(), 2UL * n);
  std::vector<WordProbability> out;
  for (const auto& v : m.values) {
    mpq_class pr(v, denom);
    pr.canonicalize();
    out.push_back({pr, pr * mpq_class(mpz_u64(g.order()))});
  }
  return out;
}

WordProbability word_prob(const FiniteGroup& g, const ConjugacyClasses& cc, unsigned n, GroupElement x,
                          unsigned threads) {
  if (x >= g.order()) throw DomainError("element index out of range");
  return word_prob_by_class(g, cc, n, threads)[cc.class_of[x]];
}

std::vector<ZetaRow> compact_zeta_table(unsigned d, std::uint64_t p, const std::vector<unsigned>& ms, unsigned n,
                                        std::uint64_t group_budget, unsigned threads) {
  if (n == 0) throw DomainError("genus must be at least 1");
  std::vector<ZetaRow> rows;
  for (auto m : ms) {
    const auto g = FiniteGroup::special_linear(d, LocalRingSpec{PrimePower::make(p, 1), m, RingKind::Mixed},
                                               group_budget);
    const auto cc = conj_classes(g);
    ZetaRow row;
    row.type = "SL" + std::to_string(d);
    row.p = p;
    row.m = m;
    row.n = n;
    row.order = g.order();
    row.frobenius = frobenius_zeta(g, cc, n, threads);
    row.character = rep_zeta_eval(character_degrees(g, cc), static_cast<long>(2 * n - 2));
    row.q_times_zeta_minus_1 = mpq_class(mpz_u64(p)) * (row.frobenius - 1);
    row.agree = row.frobenius == row.character;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ZetaRow>& rows) {
  out << "type,p,m,n,zeta_num,zeta_den,q_times_zeta_minus_1\n";
  for (const auto& r : rows)
    out << r.type << ',' << r.p << ',' << r.m << ',' << r.n << ',' << r.frobenius.get_num() << ','
        << r.frobenius.get_den() << ',' << r.q_times_zeta_minus_1 << '\n';
}

AdelicProduct adelic_product(unsigned d, unsigned n, std::uint64_t p_max, unsigned m, std::uint64_t group_budget,
                             unsigned threads) {
  if (n == 0) throw DomainError("genus must be at least 1");
  AdelicProduct out;
  for (std::uint64_t p = 2; p <= p_max; ++p) {
    if (!is_prime(p)) continue;
    const auto g = FiniteGroup::special_linear(d, LocalRingSpec{PrimePower::make(p, 1), m, RingKind::Mixed},
                                               group_budget);
    const auto z = frobenius_zeta(g, n, threads);
    out.primes.push_back(p);
    out.factors.push_back(z);
    out.exact *= z;
  }
  out.exact.canonicalize();
  out.value = out.exact.get_d();
  out.note = "finite level m = " + std::to_string(m) + ", primes <= " + std::to_string(p_max) +
             "; truncated surrogate of the adelic product";
  return out;
}

unsigned rs_threshold(std::string_view type_in, std::optional<unsigned> dim) {
  std::string type;
  for (char ch : type_in) type += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (type.empty()) throw DomainError("empty root type");
  const char family = type[0];
  const std::string rank = type.substr(1);
  if (!std::all_of(rank.begin(), rank.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw DomainError("unknown root type '" + std::string(type_in) + "'");
  switch (family) {
    case 'A':
    case 'B':
    case 'D':
      return 12;
    case 'C':
      return 21;
    case 'E':
    case 'F':
    case 'G': {
      static const std::pair<const char*, unsigned> known[] = {{"E6", 78}, {"E7", 133}, {"E8", 248}, {"F4", 52}, {"G2", 14}};
      if (!dim) throw DomainError("exceptional type " + type + " needs the dimension of its Lie algebra");
      if (!rank.empty()) {
        bool found = false;
        for (const auto& [name, dg] : known)
          if (type == name) {
            found = true;
            if (*dim != dg)
              throw DomainError(type + " has dimension " + std::to_string(dg) + ", not " + std::to_string(*dim));
          }
        if (!found) throw DomainError("unknown exceptional type '" + type + "'");
      }
      return (3 * (*dim + 1) + 1) / 2;
    }
    default:
      throw DomainError("unknown root type '" + std::string(type_in) + "'");
  }
}

}  // namespace singcount
