#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "singcount/cache.hpp"
#include "singcount/cli.hpp"
#include "singcount/counting.hpp"

using namespace singcount;

namespace {

const std::string kData = SINGCOUNT_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("singcount-test-" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("documented invocations") {
  CHECK(run({"count", "--scheme", kData + "/cone.json", "--ring", "mixed:3^1:2"}).out == "99\n");
  CHECK(run({"count", "--scheme", kData + "/cone.json", "--ring", "mixed:3^1:2", "--engine", "brute"}).out == "99\n");
  CHECK(run({"h", "--scheme", kData + "/cusp.json", "--ring", "mixed:3^1:2"}).out == "5/3\n");
  CHECK(run({"rs-threshold", "--type", "A"}).out == "12\n");
  CHECK(run({"rs-threshold", "--type", "E8", "--dim", "248"}).out == "374\n");
  CHECK(run({"def-count", "--group", "S3", "--n", "2"}).out == "486\n");
  CHECK(run({"def-count", "--table", kData + "/q8.txt", "--n", "1"}).out == "40\n");
  CHECK(run({"def-count", "--ring", "mixed:2^1:1", "--n", "2", "--route", "scheme"}).out == "486\n");
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"count", "--scheme", kData + "/cone.json"}).code == kExitUsage);
  CHECK(run({"count", "--scheme", kData + "/cone.json", "--ring", "mixed:3^1:2", "--format", "xml"}).code ==
        kExitUsage);
  const auto budget =
      run({"count", "--scheme", kData + "/cone.json", "--ring", "mixed:7^1:4", "--engine", "brute", "--budget", "10"});
  CHECK(budget.code == kExitBudget);
  CHECK(budget.out.empty());
  CHECK(budget.err.find("budget") != std::string::npos);
  CHECK(run({"count", "--scheme", kData + "/missing.json", "--ring", "mixed:3^1:1"}).code == kExitError);
  CHECK(run({"count", "--scheme", kData + "/cone.json", "--ring", "mixed:4^1:1"}).code == kExitError);
  CHECK(run({"rs-threshold", "--type", "E8"}).code == kExitError);
  CHECK(run({"count", "--help"}).code == kExitOk);
}

TEST_CASE("json and csv output") {
  const auto j = nlohmann::json::parse(
      run({"h", "--scheme", kData + "/cone.json", "--ring", "mixed:3^1:2", "--format", "json"}).out);
  CHECK(j["h"] == "11/9");
  CHECK(j["count"] == "99");
  const auto csv = run({"diagnose", "--scheme", kData + "/cusp.json", "--q-list", "3", "--m-max", "2", "--kinds",
                        "mixed", "--format", "csv"});
  CHECK(csv.out == "scheme,q,m,kind,count,h_num,h_den\ncusp,3,1,mixed,3,1,1\ncusp,3,2,mixed,15,5,3\n");
  const auto table = run({"repzeta", "--type", "SL2", "--q-list", "3", "--m-max", "1", "--n", "2", "--format", "csv"});
  CHECK(table.out == "type,p,m,n,zeta_num,zeta_den,q_times_zeta_minus_1\nSL2,3,1,2,139,36,103/12\n");
  const auto diag = nlohmann::json::parse(
      run({"diagnose", "--scheme", kData + "/cone.json", "--q-list", "3,5", "--m-max", "3", "--format", "json"}).out);
  CHECK(diag["verdict"] == "RS-consistent");
  CHECK(diag["label"] == "empirical; hypotheses user-asserted, tested m-range only");
  CHECK(diag["hypotheses"]["status"] == "user-asserted");
}

TEST_CASE("output is identical across thread counts") {
  const std::vector<std::vector<std::string>> cmds{
      {"diagnose", "--scheme", kData + "/cone.json", "--q-list", "3,5", "--m-max", "3"},
      {"zeta-global", "--scheme", kData + "/a1.json", "--s", "3", "--p-max", "50", "--m-max", "8"},
      {"word-prob", "--ring", "mixed:3^1:1", "--n", "2"},
      {"cross-check", "--scheme", kData + "/sl2.json", "--q-list", "3", "--m-max", "2"},
  };
  for (const auto& cmd : cmds) {
    auto one = cmd;
    one.insert(one.end(), {"--threads", "1"});
    auto four = cmd;
    four.insert(four.end(), {"--threads", "4"});
    const auto a = run(one);
    CHECK(a.code == 0);
    CHECK(a.out == run(four).out);
  }
}

TEST_CASE("file cache") {
  const auto dir = scratch_dir("cache");
  {
    FileCountCache cache(dir);
    CHECK_FALSE(cache.get("k1"));
    cache.put("k1", mpz_class("123456789012345678901234567890"));
    CHECK(cache.get("k1") == mpz_class("123456789012345678901234567890"));
  }
  {
    // reopened: records persist
    FileCountCache cache(dir);
    CHECK(cache.get("k1") == mpz_class("123456789012345678901234567890"));
    CHECK_FALSE(cache.get("k2"));
  }
  {
    // a version bump invalidates every earlier record
    FileCountCache cache(dir, "singcount-count-test-next");
    CHECK_FALSE(cache.get("k1"));
  }
  {
    std::ofstream(dir + "/counts.ndjson", std::ios::app) << "{not json\n{\"hash\": \"00\", \"key\": \"k3\"}\n";
    std::ostringstream warnings;
    FileCountCache cache(dir, std::string(kCountVersion), &warnings);
    CHECK(cache.skipped_lines() == 2);
    CHECK(warnings.str().find("corrupt") != std::string::npos);
    CHECK(cache.get("k1"));
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cache on and off give the same values") {
  const auto dir = scratch_dir("cli-cache");
  const std::vector<std::vector<std::string>> cmds{
      {"count", "--scheme", kData + "/cone.json", "--ring", "mixed:5^1:3"},
      {"h", "--scheme", kData + "/cusp.json", "--ring", "equal:3^1:3"},
      {"zeta-local", "--scheme", kData + "/cone.json", "--p", "3", "--m-max", "6", "--max-deg", "2"},
      {"cross-check", "--scheme", kData + "/xy0.json", "--q-list", "3,5", "--m-max", "2"},
  };
  for (const auto& cmd : cmds) {
    const auto plain = run(cmd);
    auto cached = cmd;
    cached.insert(cached.end(), {"--cache", dir});
    const auto first = run(cached);
    const auto second = run(cached);
    CHECK(plain.out == first.out);
    CHECK(plain.out == second.out);
  }
  std::ifstream in(dir + "/counts.ndjson");
  std::string line;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("timestamp"));
    CHECK(j["version"] == std::string(kCountVersion));
    ++records;
  }
  CHECK(records > 0);
}
