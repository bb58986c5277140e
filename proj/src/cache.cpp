#include "rvlab/cache.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rvlab/error.hpp"

namespace fs = std::filesystem;

namespace rvlab {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

nlohmann::json read_entry(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorCode::CorruptCacheEntry, "cannot open " + p.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::CorruptCacheEntry, p.string() + ": " + e.what());
  }
  if (!j.contains("key") || !j.contains("result") || !j.contains("checksum"))
    fail(ErrorCode::CorruptCacheEntry, p.string() + ": missing fields");
  if (j["checksum"].get<std::string>() != hex64(fnv1a64(j["result"].dump())))
    fail(ErrorCode::CorruptCacheEntry, p.string() + ": checksum mismatch");
  return j;
}

}  // namespace

CountCache::CountCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string CountCache::default_dir() {
  if (const char* env = std::getenv("RVLAB_CACHE_DIR")) return env;
  if (const char* home = std::getenv("HOME")) return std::string(home) + "/.cache/rvlab";
  return ".rvlab-cache";
}

std::optional<nlohmann::json> CountCache::lookup(const nlohmann::json& key) const {
  if (!enabled()) return std::nullopt;
  std::string dump = key.dump();
  fs::path p = fs::path(dir_) / (hex64(fnv1a64(dump)) + ".json");
  if (!fs::exists(p)) return std::nullopt;
  nlohmann::json j = read_entry(p);
  if (j["key"].dump() != dump) return std::nullopt;  // hash collision: miss
  return j["result"];
}

void CountCache::store(const nlohmann::json& key, const nlohmann::json& result) const {
  if (!enabled()) return;
  std::string dump = key.dump();
  fs::path p = fs::path(dir_) / (hex64(fnv1a64(dump)) + ".json");
  if (fs::exists(p)) return;  // append-only
  nlohmann::json j;
  j["key"] = key;
  j["result"] = result;
  j["checksum"] = hex64(fnv1a64(result.dump()));
  fs::path tmp = p;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  fs::rename(tmp, p);
}

std::vector<CountCache::Entry> CountCache::list() const {
  std::vector<Entry> out;
  if (!enabled() || !fs::exists(dir_)) return out;
  for (const auto& de : fs::directory_iterator(dir_)) {
    if (de.path().extension() != ".json") continue;
    nlohmann::json j = read_entry(de.path());
    out.push_back({de.path().filename().string(), j["key"]});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.file < b.file; });
  return out;
}

size_t CountCache::clear() const {
  size_t n = 0;
  if (!enabled() || !fs::exists(dir_)) return n;
  for (const auto& de : fs::directory_iterator(dir_)) {
    if (de.path().extension() != ".json") continue;
    fs::remove(de.path());
    ++n;
  }
  return n;
}

CountCache::VerifyReport CountCache::verify(
    const std::function<nlohmann::json(const nlohmann::json&)>& recompute, double fraction,
    uint64_t seed) const {
  VerifyReport rep;
  if (!enabled() || !fs::exists(dir_)) return rep;
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir_))
    if (de.path().extension() == ".json") files.push_back(de.path());
  std::sort(files.begin(), files.end());
  rep.total = files.size();
  uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
  for (const auto& p : files) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    double roll = double(state >> 11) / double(1ull << 53);
    if (roll >= fraction && rep.checked > 0) continue;  // always check at least one
    nlohmann::json j = read_entry(p);
    ++rep.checked;
    nlohmann::json fresh = recompute(j["key"]);
    if (fresh.dump() != j["result"].dump()) {
      ++rep.mismatched;
      rep.bad_files.push_back(p.filename().string());
    }
  }
  return rep;
}

}  // namespace rvlab
