#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace branchlab {

// Content-addressed store for finished complexity results, so long searches
// are reused across runs. Keys are fingerprints of the full query (states,
// predicate, gate set, mode); the stored payload repeats the fingerprint to
// guard against hash collisions. An in-memory map always runs; a directory,
// when set, persists entries as one JSON file per key.
class CacheStore {
 public:
  CacheStore() = default;
  explicit CacheStore(std::string directory);

  // payload_fingerprint must match for a hit.
  std::optional<std::string> get(const std::string& key, const std::string& fingerprint);
  void put(const std::string& key, const std::string& fingerprint, const std::string& value);

  const std::string& directory() const { return dir_; }

 private:
  std::string dir_;
  std::mutex mu_;
  std::unordered_map<std::string, std::pair<std::string, std::string>> mem_;
};

}  // namespace branchlab
