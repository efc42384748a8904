#include "branchlab/cache.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "branchlab/json_io.hpp"

namespace branchlab {

CacheStore::CacheStore(std::string directory) : dir_(std::move(directory)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<std::string> CacheStore::get(const std::string& key, const std::string& fingerprint) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mem_.find(key);
    if (it != mem_.end()) {
      if (it->second.first != fingerprint) return std::nullopt;
      return it->second.second;
    }
  }
  if (dir_.empty()) return std::nullopt;
  std::filesystem::path p = std::filesystem::path(dir_) / (key + ".json");
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.contains("fingerprint") || !j.contains("result")) return std::nullopt;
  if (j.at("fingerprint").get<std::string>() != fingerprint) return std::nullopt;
  std::string value = j.at("result").dump();
  std::lock_guard<std::mutex> lock(mu_);
  mem_[key] = {fingerprint, value};
  return value;
}

void CacheStore::put(const std::string& key, const std::string& fingerprint, const std::string& value) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    mem_[key] = {fingerprint, value};
  }
  if (dir_.empty()) return;
  nlohmann::ordered_json j;
  j["fingerprint"] = fingerprint;
  j["result"] = nlohmann::ordered_json::parse(value);
  std::filesystem::path final_path = std::filesystem::path(dir_) / (key + ".json");
  std::filesystem::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;  // cache write failures are non-fatal
    out << j.dump();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
}

}  // namespace branchlab
