#include "singcount/counting.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>

#include "singcount/error.hpp"
#include "singcount/parallel.hpp"

namespace singcount {

std::string_view to_string(Engine e) { return e == Engine::BruteForce ? "brute" : "lift"; }

Engine parse_engine(std::string_view s) {
  if (s == "brute" || s == "bruteforce" || s == "brute-force") return Engine::BruteForce;
  if (s == "lift") return Engine::Lift;
  throw DomainError("unknown engine '" + std::string(s) + "' (expected brute or lift)");
}

std::string count_cache_key(const AffineScheme& x, const LocalRingSpec& spec, Engine engine) {
  return std::string(kCountVersion) + "|" + x.canonical_form() + "|" + spec.to_string() + "|" +
         std::string(to_string(engine));
}

namespace {

// Polynomials restricted to the variables that actually occur.
struct Reduced {
  std::size_t arity = 0;
  std::size_t unused = 0;
  std::vector<IntPoly> polys;
};

Reduced reduce(const AffineScheme& x) {
  x.validate();
  const std::size_t n = x.arity();
  std::vector<bool> used(n, false);
  for (const auto& p : x.system.polys)
    for (auto v : p.support()) used[v] = true;
  std::vector<std::size_t> map(n, 0);
  Reduced r;
  for (std::size_t i = 0; i < n; ++i)
    if (used[i]) map[i] = r.arity++;
  r.unused = n - r.arity;
  for (const auto& p : x.system.polys) {
    if (p.is_zero()) continue;
    r.polys.push_back(p.remap(r.arity, map));
  }
  return r;
}

constexpr std::uint64_t kBatch = 4096;

// Work counter shared by all workers. The total amount of work does not depend
// on the thread count, so whether a budget trips is deterministic.
class SharedBudget {
 public:
  SharedBudget(std::uint64_t limit, std::string what) : limit_(limit), what_(std::move(what)) {}

  void flush(std::uint64_t& local) {
    const std::uint64_t total = used_.fetch_add(local) + local;
    local = 0;
    if (total > limit_) throw BudgetError(what_ + " exceeded the budget of " + std::to_string(limit_));
  }

 private:
  std::atomic<std::uint64_t> used_{0};
  std::uint64_t limit_;
  std::string what_;
};

// Backtracking plan: variables in a fixed order, each equation checked at the
// position of its last variable. Over a field, runs of trailing positions in
// which every equation closing there is affine-linear are solved by
// elimination instead of enumerated (jet schemes are built this way, one
// t-slice per run). A last variable that is merely linear in some equation is
// pinned by that equation.
struct LinearBlock {
  std::size_t begin = 0, end = 0;  // positions [begin, end)
  std::vector<CompiledPoly> constant;              // per equation: part free of block variables
  std::vector<std::vector<CompiledPoly>> coef;     // per equation, per block variable
};

struct Plan {
  std::size_t n = 0;
  std::vector<std::size_t> order;
  std::vector<CompiledPoly> eqs;
  std::vector<std::vector<std::uint32_t>> checks;
  std::vector<std::uint32_t> constants;
  std::vector<LinearBlock> blocks;
  std::vector<std::ptrdiff_t> block_at;  // position -> block starting there, or -1
  bool solve_last = false;
  std::vector<std::vector<CompiledPoly>> last_coefs;  // per equation at the last position, by power of the last variable
};

unsigned joint_degree(const IntPoly& p, const std::vector<bool>& in_set) {
  unsigned best = 0;
  for (const auto& [e, c] : p.terms()) {
    unsigned d = 0;
    for (std::size_t v = 0; v < e.size(); ++v)
      if (in_set[v]) d += e[v];
    best = std::max(best, d);
  }
  return best;
}

Plan make_plan(const Reduced& red, const Ring& ring, bool solve) {
  Plan plan;
  plan.n = red.arity;
  std::vector<IntPoly> polys;
  for (const auto& p : red.polys) {
    CompiledPoly c(p, ring);
    if (c.is_zero()) continue;
    polys.push_back(p);
    plan.eqs.push_back(std::move(c));
  }
  const std::size_t n = plan.n;
  auto containing = [&](std::size_t v) {
    std::vector<const IntPoly*> out;
    for (const auto& p : polys)
      if (p.degree_in(v) > 0) out.push_back(&p);
    return out;
  };
  auto all_linear = [&](std::size_t v) {
    const auto ps = containing(v);
    return std::all_of(ps.begin(), ps.end(), [&](const IntPoly* p) { return p->degree_in(v) == 1; });
  };
  auto any_linear = [&](std::size_t v) {
    const auto ps = containing(v);
    return std::any_of(ps.begin(), ps.end(), [&](const IntPoly* p) { return p->degree_in(v) == 1; });
  };

  std::ptrdiff_t last = -1;
  bool pin_last = false;
  if (solve && n > 0 && !all_linear(n - 1)) {
    for (std::size_t v = n; v-- > 0 && last < 0;)
      if (all_linear(v)) last = static_cast<std::ptrdiff_t>(v);
    for (std::size_t v = n; v-- > 0 && last < 0;)
      if (any_linear(v)) {
        last = static_cast<std::ptrdiff_t>(v);
        pin_last = true;
      }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (static_cast<std::ptrdiff_t>(v) != last) plan.order.push_back(v);
  if (last >= 0) plan.order.push_back(static_cast<std::size_t>(last));

  std::vector<std::size_t> pos_of(n);
  for (std::size_t i = 0; i < n; ++i) pos_of[plan.order[i]] = i;
  std::vector<std::size_t> closes(polys.size(), 0);
  plan.checks.assign(n, {});
  for (std::uint32_t e = 0; e < polys.size(); ++e) {
    const auto support = polys[e].support();
    if (support.empty()) {
      plan.constants.push_back(e);
      continue;
    }
    std::size_t pos = 0;
    for (auto v : support) pos = std::max(pos, pos_of[v]);
    closes[e] = pos;
    plan.checks[pos].push_back(e);
  }

  plan.block_at.assign(n, -1);
  if (solve && !pin_last) {
    auto linear_range = [&](std::size_t a, std::size_t b) {
      std::vector<bool> in_set(n, false);
      for (std::size_t i = a; i < b; ++i) in_set[plan.order[i]] = true;
      for (std::size_t i = a; i < b; ++i)
        for (auto e : plan.checks[i])
          if (joint_degree(polys[e], in_set) > 1) return false;
      return true;
    };
    std::size_t b = n;
    while (b > 0) {
      std::size_t a = b - 1;
      if (!linear_range(a, b)) {
        --b;
        continue;
      }
      while (a > 0 && linear_range(a - 1, b)) --a;
      LinearBlock blk;
      blk.begin = a;
      blk.end = b;
      std::vector<std::ptrdiff_t> slot(n, -1);
      for (std::size_t i = a; i < b; ++i) slot[plan.order[i]] = static_cast<std::ptrdiff_t>(i - a);
      for (std::size_t i = a; i < b; ++i)
        for (auto e : plan.checks[i]) {
          const IntPoly& p = polys[e];
          IntPoly constant(p.arity());
          std::vector<IntPoly> coef(b - a, IntPoly(p.arity()));
          for (const auto& [ex, c] : p.terms()) {
            std::ptrdiff_t hit = -1;
            for (std::size_t v = 0; v < ex.size(); ++v)
              if (ex[v] && slot[v] >= 0) hit = slot[v];
            if (hit < 0) {
              constant.add_term(ex, c);
            } else {
              Exponents e2 = ex;
              e2[plan.order[a + static_cast<std::size_t>(hit)]] = 0;
              coef[static_cast<std::size_t>(hit)].add_term(e2, c);
            }
          }
          blk.constant.emplace_back(constant, ring);
          std::vector<CompiledPoly> row;
          for (const auto& cp : coef) row.emplace_back(cp, ring);
          blk.coef.push_back(std::move(row));
        }
      plan.block_at[a] = static_cast<std::ptrdiff_t>(plan.blocks.size());
      plan.blocks.push_back(std::move(blk));
      b = a;
    }
  }

  if (pin_last) {
    plan.solve_last = true;
    const auto lv = static_cast<std::size_t>(last);
    for (auto e : plan.checks[n - 1]) {
      const IntPoly& p = polys[e];
      std::vector<IntPoly> by_power(p.degree_in(lv) + 1, IntPoly(p.arity()));
      for (const auto& [ex, c] : p.terms()) {
        Exponents e2 = ex;
        e2[lv] = 0;
        by_power[ex[lv]].add_term(e2, c);
      }
      std::vector<CompiledPoly> compiled;
      for (const auto& bp : by_power) compiled.emplace_back(bp, ring);
      plan.last_coefs.push_back(std::move(compiled));
    }
  }
  return plan;
}

bool constants_vanish(const Plan& plan, const Ring& ring) {
  std::vector<Element> none(plan.n, 0);
  for (auto e : plan.constants)
    if (plan.eqs[e].eval(ring, none) != 0) return false;
  return true;
}

// Drives the plan for one ring. Visit receives each point; if it also has
// weighted(k) and `collapse` is set, a final linear block with k free
// coordinates is reported once as q^k points instead of point by point.
template <class Visit>
class Enumerator {
 public:
  Enumerator(const Plan& plan, const Ring& ring, Visit& visit, bool collapse = false, SharedBudget* budget = nullptr)
      : plan_(plan), ring_(ring), visit_(visit), collapse_(collapse), budget_(budget), x_(plan.n, 0), coefs_(8),
        scratch_(plan.blocks.size()) {}

  // Runs the search with the first position fixed to `first` (ignored when
  // the first position is solved rather than enumerated).
  void run_from(Element first) {
    if (plan_.n == 0) {
      emit();
    } else if (solved_at(0)) {
      descend(0);
    } else {
      x_[plan_.order[0]] = first;
      if (passes(0)) descend(1);
    }
    if (budget_) budget_->flush(work_);
  }

  static std::uint64_t first_range(const Plan& plan, const Ring& ring) {
    if (plan.n == 0 || plan.block_at[0] >= 0 || (plan.n == 1 && plan.solve_last)) return 1;
    return ring.cardinality();
  }

 private:
  bool solved_at(std::size_t pos) const {
    return plan_.block_at[pos] >= 0 || (pos + 1 == plan_.n && plan_.solve_last);
  }

  bool passes(std::size_t pos) const {
    for (auto e : plan_.checks[pos])
      if (plan_.eqs[e].eval(ring_, x_) != 0) return false;
    return true;
  }

  void emit() { visit_(std::span<const Element>(x_)); }

  void tick() {
    if (++work_ >= kBatch && budget_) budget_->flush(work_);
  }

  void descend(std::size_t pos) {
    if (pos == plan_.n) {
      emit();
      return;
    }
    if (plan_.block_at[pos] >= 0) {
      solve_block(static_cast<std::size_t>(plan_.block_at[pos]));
      return;
    }
    if (pos + 1 == plan_.n && plan_.solve_last) {
      solve_last();
      return;
    }
    const std::size_t var = plan_.order[pos];
    const Element card = ring_.cardinality();
    for (Element v = 0; v < card; ++v) {
      tick();
      x_[var] = v;
      if (passes(pos)) descend(pos + 1);
    }
  }

  struct BlockScratch {
    std::vector<Element> a;      // rows x (k + 1), augmented
    std::vector<std::size_t> pivots, free_cols;
    std::vector<Element> coeff;
  };

  void solve_block(std::size_t bi) {
    const LinearBlock& blk = plan_.blocks[bi];
    BlockScratch& s = scratch_[bi];
    const std::size_t k = blk.end - blk.begin;
    const std::size_t rows = blk.constant.size();
    const std::size_t w = k + 1;
    s.a.assign(rows * w, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < k; ++j) s.a[r * w + j] = blk.coef[r][j].eval(ring_, x_);
      s.a[r * w + k] = ring_.neg(blk.constant[r].eval(ring_, x_));
    }
    s.pivots.clear();
    s.free_cols.clear();
    std::size_t row = 0;
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = row;
      while (piv < rows && s.a[piv * w + col] == 0) ++piv;
      if (piv == rows) {
        s.free_cols.push_back(col);
        continue;
      }
      if (piv != row)
        for (std::size_t j = 0; j < w; ++j) std::swap(s.a[piv * w + j], s.a[row * w + j]);
      const Element inv = ring_.inverse(s.a[row * w + col]);
      for (std::size_t j = 0; j < w; ++j) s.a[row * w + j] = ring_.mul(s.a[row * w + j], inv);
      for (std::size_t r = 0; r < rows; ++r) {
        if (r == row || s.a[r * w + col] == 0) continue;
        const Element factor = s.a[r * w + col];
        for (std::size_t j = 0; j < w; ++j) s.a[r * w + j] = ring_.sub(s.a[r * w + j], ring_.mul(factor, s.a[row * w + j]));
      }
      s.pivots.push_back(col);
      ++row;
    }
    for (std::size_t r = row; r < rows; ++r)
      if (s.a[r * w + k] != 0) return;
    const std::size_t nfree = s.free_cols.size();
    if constexpr (requires(Visit& v) { v.weighted(std::size_t{}); }) {
      if (collapse_ && blk.end == plan_.n) {
        visit_.weighted(nfree);
        return;
      }
    }
    s.coeff.assign(nfree, 0);
    const Element q = ring_.cardinality();
    while (true) {
      tick();
      for (std::size_t f = 0; f < nfree; ++f) x_[plan_.order[blk.begin + s.free_cols[f]]] = s.coeff[f];
      for (std::size_t r = 0; r < s.pivots.size(); ++r) {
        Element v = s.a[r * w + k];
        for (std::size_t f = 0; f < nfree; ++f)
          v = ring_.sub(v, ring_.mul(s.a[r * w + s.free_cols[f]], s.coeff[f]));
        x_[plan_.order[blk.begin + s.pivots[r]]] = v;
      }
      descend(blk.end);
      std::size_t c = 0;
      while (c < nfree && ++s.coeff[c] == q) s.coeff[c++] = 0;
      if (c == nfree) break;
    }
  }

  // The last variable occurs linearly in some equation closing at the last
  // position; that equation pins it whenever its leading coefficient is nonzero.
  void solve_last() {
    const std::size_t pos = plan_.n - 1;
    const std::size_t var = plan_.order[pos];
    x_[var] = 0;
    for (const auto& parts : plan_.last_coefs) {
      if (coefs_.size() < parts.size()) coefs_.resize(parts.size());
      std::size_t degree = 0;
      for (std::size_t d = 0; d < parts.size(); ++d) {
        coefs_[d] = parts[d].eval(ring_, x_);
        if (coefs_[d] != 0) degree = d;
      }
      if (degree == 0) {
        if (coefs_[0] != 0) return;
        continue;
      }
      if (degree == 1) {
        x_[var] = ring_.mul(ring_.neg(coefs_[0]), ring_.inverse(coefs_[1]));
        if (passes(pos)) emit();
        return;
      }
    }
    const Element card = ring_.cardinality();
    for (Element v = 0; v < card; ++v) {
      tick();
      x_[var] = v;
      if (passes(pos)) emit();
    }
  }

  const Plan& plan_;
  const Ring& ring_;
  Visit& visit_;
  bool collapse_;
  SharedBudget* budget_;
  std::uint64_t work_ = 0;
  std::vector<Element> x_;
  std::vector<Element> coefs_;
  std::vector<BlockScratch> scratch_;
};

mpz_class power(std::uint64_t base, std::uint64_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Row-reduced echelon data of an l x n matrix over F_q, with the transform E
// such that E * J = R.
struct Echelon {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;   // pivot column of each of the first `rank` rows
  std::vector<Element> rref;         // l x n
  std::vector<Element> transform;    // l x l
  std::vector<std::size_t> free_cols;
};

void echelon(const Ring& field, std::size_t l, std::size_t n, std::vector<Element>& a, Echelon& out) {
  out.rank = 0;
  out.pivots.clear();
  out.free_cols.clear();
  out.transform.assign(l * l, 0);
  for (std::size_t i = 0; i < l; ++i) out.transform[i * l + i] = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < l; ++col) {
    std::size_t piv = row;
    while (piv < l && a[piv * n + col] == 0) ++piv;
    if (piv == l) {
      out.free_cols.push_back(col);
      continue;
    }
    if (piv != row) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[row * n + j]);
      for (std::size_t j = 0; j < l; ++j) std::swap(out.transform[piv * l + j], out.transform[row * l + j]);
    }
    const Element inv = field.inverse(a[row * n + col]);
    for (std::size_t j = 0; j < n; ++j) a[row * n + j] = field.mul(a[row * n + j], inv);
    for (std::size_t j = 0; j < l; ++j) out.transform[row * l + j] = field.mul(out.transform[row * l + j], inv);
    for (std::size_t r = 0; r < l; ++r) {
      if (r == row || a[r * n + col] == 0) continue;
      const Element factor = a[r * n + col];
      for (std::size_t j = 0; j < n; ++j) a[r * n + j] = field.sub(a[r * n + j], field.mul(factor, a[row * n + j]));
      for (std::size_t j = 0; j < l; ++j)
        out.transform[r * l + j] = field.sub(out.transform[r * l + j], field.mul(factor, out.transform[row * l + j]));
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.rank = row;
  for (std::size_t col = (out.pivots.empty() ? 0 : out.pivots.back() + 1); col < n; ++col) out.free_cols.push_back(col);
  std::sort(out.free_cols.begin(), out.free_cols.end());
  out.free_cols.erase(std::unique(out.free_cols.begin(), out.free_cols.end()), out.free_cols.end());
  out.rref = a;
}

// Per-worker state of the lift engine.
class Lifter {
 public:
  Lifter(const Ring& ring, const Ring& field, const std::vector<CompiledPoly>& eqs,
         const std::vector<std::vector<CompiledPoly>>& jac, std::size_t n, SharedBudget& budget)
      : ring_(ring), field_(field), eqs_(eqs), jac_(jac), n_(n), l_(eqs.size()), m_(ring.length()), budget_(budget),
        levels_(ring.length() + 1) {}

  void finish() { budget_.flush(nodes_); }

  void operator()(std::span<const Element> root) {
    if (m_ == 1) {
      bump(0);
      return;
    }
    std::vector<Element> a(l_ * n_);
    for (std::size_t i = 0; i < l_; ++i)
      for (std::size_t j = 0; j < n_; ++j) a[i * n_ + j] = jac_[i][j].eval(field_, root);
    echelon(field_, l_, n_, a, ech_);
    if (ech_.rank == l_) {
      bump((n_ - l_) * (m_ - 1));
      return;
    }
    // null space basis, one vector per free column
    null_.assign(ech_.free_cols.size() * n_, 0);
    for (std::size_t k = 0; k < ech_.free_cols.size(); ++k) {
      const std::size_t fc = ech_.free_cols[k];
      null_[k * n_ + fc] = 1;
      for (std::size_t r = 0; r < ech_.rank; ++r) null_[k * n_ + ech_.pivots[r]] = field_.neg(ech_.rref[r * n_ + fc]);
    }
    std::vector<Element> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = ring_.embed_digit(root[j], 0);
    descend(x, 1);
  }

  // Only valid at length 1, where a point contributes q^0.
  void weighted(std::size_t free_dims) { bump(free_dims); }

  const std::vector<std::uint64_t>& histogram() const { return hist_; }

 private:
  void bump(std::size_t exponent) {
    if (hist_.size() <= exponent) hist_.resize(exponent + 1, 0);
    ++hist_[exponent];
  }

  struct LevelScratch {
    std::vector<Element> rhs, y, base, coeff, v, child;
  };

  void descend(const std::vector<Element>& x, unsigned k) {
    if (++nodes_ >= kBatch) budget_.flush(nodes_);
    LevelScratch& s = levels_[k];
    s.rhs.resize(l_);
    s.y.assign(l_, 0);
    for (std::size_t i = 0; i < l_; ++i) s.rhs[i] = field_.neg(ring_.digit(eqs_[i].eval(ring_, x), k));
    for (std::size_t i = 0; i < l_; ++i) {
      Element acc = 0;
      for (std::size_t j = 0; j < l_; ++j) acc = field_.add(acc, field_.mul(ech_.transform[i * l_ + j], s.rhs[j]));
      s.y[i] = acc;
    }
    for (std::size_t i = ech_.rank; i < l_; ++i)
      if (s.y[i] != 0) return;
    const std::size_t nfree = ech_.free_cols.size();
    if (k + 1 == m_) {
      bump(nfree);
      return;
    }
    s.base.assign(n_, 0);
    for (std::size_t r = 0; r < ech_.rank; ++r) s.base[ech_.pivots[r]] = s.y[r];
    s.coeff.assign(nfree, 0);
    s.child.resize(n_);
    const Element q = field_.cardinality();
    while (true) {
      s.v = s.base;
      for (std::size_t c = 0; c < nfree; ++c) {
        if (s.coeff[c] == 0) continue;
        for (std::size_t j = 0; j < n_; ++j)
          if (null_[c * n_ + j] != 0) s.v[j] = field_.add(s.v[j], field_.mul(s.coeff[c], null_[c * n_ + j]));
      }
      for (std::size_t j = 0; j < n_; ++j) s.child[j] = ring_.add(x[j], ring_.embed_digit(s.v[j], k));
      descend(s.child, k + 1);
      std::size_t c = 0;
      while (c < nfree && ++s.coeff[c] == q) s.coeff[c++] = 0;
      if (c == nfree) break;
    }
  }

  const Ring& ring_;
  const Ring& field_;
  const std::vector<CompiledPoly>& eqs_;
  const std::vector<std::vector<CompiledPoly>>& jac_;
  std::size_t n_, l_;
  unsigned m_;
  SharedBudget& budget_;
  std::uint64_t nodes_ = 0;
  std::vector<LevelScratch> levels_;
  Echelon ech_;
  std::vector<Element> null_;
  std::vector<std::uint64_t> hist_;
};

mpz_class combine_histograms(const std::vector<std::vector<std::uint64_t>>& hists, std::uint64_t q) {
  mpz_class total = 0;
  for (const auto& h : hists)
    for (std::size_t e = 0; e < h.size(); ++e)
      if (h[e]) total += power(q, e) * mpz_class(std::to_string(h[e]));
  return total;
}

}  // namespace

CountResult count_bruteforce(const AffineScheme& x, const LocalRingSpec& spec, const CountOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Reduced red = reduce(x);
  const Ring ring(spec);
  const mpz_class space = power(ring.cardinality(), red.arity);
  if (space > mpz_class(std::to_string(opts.budget)))
    throw BudgetError("brute force over " + spec.to_string() + " needs " + space.get_str() +
                      " evaluations, budget is " + std::to_string(opts.budget));
  const Plan plan = make_plan(red, ring, /*solve=*/false);
  CountResult res{x.name, spec, 0, Engine::BruteForce, 0.0, false};
  if (constants_vanish(plan, ring)) {
    struct Counter {
      std::uint64_t n = 0;
      void operator()(std::span<const Element>) { ++n; }
    };
    const unsigned threads = std::max(1U, opts.threads);
    std::vector<Counter> counters(threads);
    const auto range = Enumerator<Counter>::first_range(plan, ring);
    parallel_for(threads, range, [&](unsigned w, std::size_t i) {
      Enumerator<Counter> en(plan, ring, counters[w]);
      en.run_from(i);
    });
    mpz_class total = 0;
    for (const auto& c : counters) total += mpz_class(std::to_string(c.n));
    res.count = total * power(ring.cardinality(), red.unused);
  }
  res.seconds = seconds_since(t0);
  return res;
}

CountResult count_lift(const AffineScheme& x, const LocalRingSpec& spec, const CountOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Reduced red = reduce(x);
  const Ring ring(spec);
  const Ring field = ring.residue_field();
  const std::size_t n = red.arity;
  CountResult res{x.name, spec, 0, Engine::Lift, 0.0, false};

  // Equations that vanish identically over R impose nothing.
  std::vector<CompiledPoly> eqs;
  std::vector<const IntPoly*> kept;
  for (const auto& p : red.polys) {
    CompiledPoly c(p, ring);
    if (c.is_zero()) continue;
    eqs.push_back(std::move(c));
    kept.push_back(&p);
  }
  {
    std::vector<Element> none(n, 0);
    for (std::size_t i = 0; i < eqs.size(); ++i)
      if (kept[i]->is_constant() && eqs[i].eval(ring, none) != 0) {
        res.seconds = seconds_since(t0);
        return res;
      }
  }
  std::vector<std::vector<CompiledPoly>> jac;
  if (spec.m > 1) {
    for (const auto* p : kept) {
      std::vector<CompiledPoly> row;
      for (std::size_t j = 0; j < n; ++j) row.emplace_back(p->derivative(j), field);
      jac.push_back(std::move(row));
    }
  }
  const Plan plan = make_plan(red, field, /*solve=*/true);
  if (!constants_vanish(plan, field)) {
    res.seconds = seconds_since(t0);
    return res;
  }
  const unsigned threads = std::max(1U, opts.threads);
  SharedBudget residue_budget(opts.budget, "residue enumeration over F_" + std::to_string(field.cardinality()));
  SharedBudget node_budget(opts.node_budget, "lift tree over " + spec.to_string());
  std::vector<Lifter> lifters;
  lifters.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) lifters.emplace_back(ring, field, eqs, jac, n, node_budget);
  const auto range = Enumerator<Lifter>::first_range(plan, field);
  parallel_for(threads, range, [&](unsigned w, std::size_t i) {
    Enumerator<Lifter> en(plan, field, lifters[w], /*collapse=*/spec.m == 1, &residue_budget);
    en.run_from(i);
    lifters[w].finish();
  });
  std::vector<std::vector<std::uint64_t>> hists;
  for (const auto& l : lifters) hists.push_back(l.histogram());
  res.count = combine_histograms(hists, field.cardinality()) * power(ring.cardinality(), red.unused);
  res.seconds = seconds_since(t0);
  return res;
}

CountResult count_points(const AffineScheme& x, const LocalRingSpec& spec, Engine engine, const CountOptions& opts) {
  std::string key;
  if (opts.cache) {
    key = count_cache_key(x, spec, engine);
    if (auto hit = opts.cache->get(key)) return CountResult{x.name, spec, *hit, engine, 0.0, true};
  }
  CountResult r = engine == Engine::BruteForce ? count_bruteforce(x, spec, opts) : count_lift(x, spec, opts);
  if (opts.cache) opts.cache->put(key, r.count);
  return r;
}

HEntry h_value(const AffineScheme& x, const LocalRingSpec& spec, Engine engine, const CountOptions& opts) {
  const CountResult r = count_points(x, spec, engine, opts);
  HEntry e{spec.q, spec.m, spec.kind, r.count, 0};
  const mpz_class denom = power(spec.q.q, std::uint64_t{spec.m} * static_cast<std::uint64_t>(x.declared_dim));
  e.h = mpq_class(r.count, denom);
  e.h.canonicalize();
  return e;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned k = 0;
    while (n % d == 0) {
      n /= d;
      ++k;
    }
    out.emplace_back(d, k);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

mpz_class count_composite(const AffineScheme& x, std::uint64_t n, const CountOptions& opts) {
  if (n == 0) throw DomainError("modulus must be at least 1");
  mpz_class total = 1;
  for (const auto& [p, k] : factorize(n)) {
    const LocalRingSpec spec{PrimePower::make(p, 1), k, RingKind::Mixed};
    total *= count_points(x, spec, Engine::Lift, opts).count;
    if (total == 0) break;
  }
  return total;
}

CrossCheck cross_check_rings(const AffineScheme& x, const PrimePower& q, unsigned m, Engine engine,
                             const CountOptions& opts) {
  CrossCheck c;
  c.mixed_count = count_points(x, LocalRingSpec{q, m, RingKind::Mixed}, engine, opts).count;
  c.equal_count = count_points(x, LocalRingSpec{q, m, RingKind::Equal}, engine, opts).count;
  c.equal = c.mixed_count == c.equal_count;
  return c;
}

std::vector<std::vector<Element>> list_points(const AffineScheme& x, const LocalRingSpec& spec, std::uint64_t limit,
                                              const CountOptions& opts) {
  x.validate();
  const Ring ring(spec);
  const mpz_class space = power(ring.cardinality(), x.arity());
  if (space > mpz_class(std::to_string(opts.budget)))
    throw BudgetError("point listing over " + spec.to_string() + " exceeds the enumeration budget");
  Reduced all;
  all.arity = x.arity();
  for (const auto& p : x.system.polys)
    if (!p.is_zero()) all.polys.push_back(p);
  const Plan plan = make_plan(all, ring, false);
  struct Collector {
    std::uint64_t limit;
    std::vector<std::vector<Element>> pts;
    void operator()(std::span<const Element> p) {
      if (pts.size() >= limit) throw BudgetError("more than " + std::to_string(limit) + " points");
      pts.emplace_back(p.begin(), p.end());
    }
  } collector{limit, {}};
  if (!constants_vanish(plan, ring)) return {};
  const auto range = Enumerator<Collector>::first_range(plan, ring);
  for (std::size_t i = 0; i < range; ++i) {
    Enumerator<Collector> en(plan, ring, collector);
    en.run_from(i);
  }
  return collector.pts;
}

}  // namespace singcount
