#pragma once

#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>

#include <gmpxx.h>

#include "singcount/counting.hpp"

namespace singcount {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

/// Append-only newline-delimited JSON store of exact counts in `<dir>/counts.ndjson`.
///
/// A record is {"hash", "key", "version", "count", "timestamp"}. Lookups go by
/// hash and then compare the full key and the version, so a version bump turns
/// every older record into a miss. Malformed lines are skipped with a warning.
class FileCountCache : public CountCache {
 public:
  explicit FileCountCache(std::string dir, std::string version = std::string(kCountVersion),
                          std::ostream* warnings = nullptr);

  std::optional<mpz_class> get(const std::string& key) override;
  void put(const std::string& key, const mpz_class& count) override;

  const std::string& path() const noexcept { return path_; }
  std::size_t skipped_lines() const noexcept { return skipped_; }

 private:
  struct Record {
    std::string key;
    mpz_class count;
  };

  std::string path_;
  std::string version_;
  std::mutex mutex_;
  std::unordered_multimap<std::string, Record> records_;
  std::size_t skipped_ = 0;
};

}  // namespace singcount
