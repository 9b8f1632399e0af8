#include "singcount/cache.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "singcount/error.hpp"

namespace singcount {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

FileCountCache::FileCountCache(std::string dir, std::string version, std::ostream* warnings)
    : version_(std::move(version)) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create cache directory " + dir + ": " + ec.message());
  path_ = (std::filesystem::path(dir) / "counts.ndjson").string();
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("version").get<std::string>() != version_) continue;
      Record r{j.at("key").get<std::string>(), mpz_class(j.at("count").get<std::string>())};
      const auto hash = j.at("hash").get<std::string>();
      if (hash != sha256_hex(r.key)) throw Error("hash does not match key");
      records_.emplace(hash, std::move(r));
    } catch (const std::exception& e) {
      ++skipped_;
      if (warnings) *warnings << "warning: skipping corrupt cache record " << path_ << ":" << lineno << "\n";
    }
  }
}

std::optional<mpz_class> FileCountCache::get(const std::string& key) {
  const auto hash = sha256_hex(key);
  std::lock_guard lock(mutex_);
  auto [lo, hi] = records_.equal_range(hash);
  for (auto it = lo; it != hi; ++it)
    if (it->second.key == key) return it->second.count;
  return std::nullopt;
}

void FileCountCache::put(const std::string& key, const mpz_class& count) {
  const auto hash = sha256_hex(key);
  nlohmann::ordered_json j;
  j["hash"] = hash;
  j["key"] = key;
  j["version"] = version_;
  j["count"] = count.get_str();
  j["timestamp"] = utc_timestamp();
  std::lock_guard lock(mutex_);
  auto [lo, hi] = records_.equal_range(hash);
  for (auto it = lo; it != hi; ++it)
    if (it->second.key == key) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot write cache file " + path_);
  out << j.dump() << '\n';
  records_.emplace(hash, Record{key, count});
}

}  // namespace singcount
