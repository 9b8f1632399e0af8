#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "singcount/rings.hpp"
#include "singcount/schemes.hpp"

namespace singcount {

enum class Engine { BruteForce, Lift };

std::string_view to_string(Engine e);
Engine parse_engine(std::string_view s);

/// Version tag mixed into cache keys; bump when counting semantics change.
inline constexpr std::string_view kCountVersion = "singcount-count-1";

/// Storage for exact counts, keyed by count_cache_key(). Implementations must be thread-safe.
class CountCache {
 public:
  virtual ~CountCache() = default;
  virtual std::optional<mpz_class> get(const std::string& key) = 0;
  virtual void put(const std::string& key, const mpz_class& count) = 0;
};

std::string count_cache_key(const AffineScheme& x, const LocalRingSpec& spec, Engine engine);

struct CountOptions {
  /// Brute force: ceiling on |R|^n. Lift: ceiling on candidate values tried
  /// while enumerating F_q-points.
  std::uint64_t budget = 100'000'000;
  /// Lift: ceiling on the number of tree nodes above the residue level.
  std::uint64_t node_budget = 200'000'000;
  unsigned threads = 1;
  CountCache* cache = nullptr;
};

struct CountResult {
  std::string scheme;
  LocalRingSpec spec;
  mpz_class count;
  Engine engine = Engine::Lift;
  double seconds = 0.0;
  bool from_cache = false;
};

/// Exhaustive enumeration of R^n with equations checked as soon as their
/// variables are assigned. Ground-truth oracle.
CountResult count_bruteforce(const AffineScheme& x, const LocalRingSpec& spec, const CountOptions& opts = {});

/// Level-by-level lifting from F_q-points. At a node x mod pi^k the children
/// x + pi^k v are the solutions of J(x0) v = -(f(x)/pi^k) over F_q; when
/// J(x0) has full row rank the subtree closes to q^{(n-l)(m-k)} without descent.
CountResult count_lift(const AffineScheme& x, const LocalRingSpec& spec, const CountOptions& opts = {});

/// Dispatches to an engine, consulting opts.cache first when set.
CountResult count_points(const AffineScheme& x, const LocalRingSpec& spec, Engine engine = Engine::Lift,
                         const CountOptions& opts = {});

/// h_X(R) = |X(R)| / |R|^{dim X_Q}.
struct HEntry {
  PrimePower q;
  unsigned m = 1;
  RingKind kind = RingKind::Mixed;
  mpz_class count;
  mpq_class h;
};

HEntry h_value(const AffineScheme& x, const LocalRingSpec& spec, Engine engine = Engine::Lift,
               const CountOptions& opts = {});

/// Trial-division factorisation, ascending primes.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// |X(Z/N)| as the product of |X(Z/p^k)| over the factorisation of N; |X(Z/1)| = 1.
mpz_class count_composite(const AffineScheme& x, std::uint64_t n, const CountOptions& opts = {});

struct CrossCheck {
  mpz_class mixed_count;
  mpz_class equal_count;
  bool equal = false;
};

/// Counts over Z_q/m^m and F_q[t]/t^m; disagreement marks p as bad for X.
CrossCheck cross_check_rings(const AffineScheme& x, const PrimePower& q, unsigned m, Engine engine = Engine::Lift,
                             const CountOptions& opts = {});

/// All points of X over R (brute force); throws BudgetError past `limit` points.
std::vector<std::vector<Element>> list_points(const AffineScheme& x, const LocalRingSpec& spec,
                                              std::uint64_t limit = 10'000, const CountOptions& opts = {});

}  // namespace singcount
