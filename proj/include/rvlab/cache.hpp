#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rvlab {

uint64_t fnv1a64(const std::string& s);

// Content-addressed, append-only JSON cache. Entries are immutable records
// {key, result, checksum}; writers go through a temp file and rename, so
// concurrent writers never expose partial entries.
class CountCache {
 public:
  explicit CountCache(std::string dir);  // empty path disables the cache

  bool enabled() const { return !dir_.empty(); }
  const std::string& dir() const { return dir_; }

  std::optional<nlohmann::json> lookup(const nlohmann::json& key) const;
  void store(const nlohmann::json& key, const nlohmann::json& result) const;

  struct Entry {
    std::string file;
    nlohmann::json key;
  };
  std::vector<Entry> list() const;  // CorruptCacheEntry on checksum mismatch
  size_t clear() const;

  struct VerifyReport {
    size_t total = 0;
    size_t checked = 0;
    size_t mismatched = 0;
    std::vector<std::string> bad_files;
  };
  // Recomputes a deterministic sample of entries and compares results.
  VerifyReport verify(const std::function<nlohmann::json(const nlohmann::json&)>& recompute,
                      double fraction = 0.05, uint64_t seed = 1) const;

  static std::string default_dir();  // $RVLAB_CACHE_DIR or ~/.cache/rvlab

 private:
  std::string dir_;
};

}  // namespace rvlab
