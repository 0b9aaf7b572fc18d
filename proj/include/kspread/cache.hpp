#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kspread {

// Bump when a change alters cached numerical content.
inline constexpr std::string_view kCacheSchema = "kspread-cache-v1";
inline constexpr const char* kCacheEnvVar = "KSPREAD_CACHE_DIR";

// 64-bit FNV-1a rendered as 16 hex digits; stable across platforms and runs.
std::string stable_hash(std::string_view text);

// On-disk store of spectra and Lanczos records. Entries are addressed by the
// hash of a canonical key string; the key itself is stored next to the
// payload and checked on load, so a hash collision reads as a miss.
// Writes go through a temporary file and a rename.
class ResultCache {
public:
  ResultCache() = default; // disabled
  explicit ResultCache(std::filesystem::path dir);

  // Directory from KSPREAD_CACHE_DIR, if set and nonempty.
  static std::optional<std::filesystem::path> dir_from_env();

  bool enabled() const { return dir_.has_value(); }
  const std::optional<std::filesystem::path>& dir() const { return dir_; }

  std::optional<std::vector<double>> load_vector(const std::string& key) const;
  void store_vector(const std::string& key, const std::vector<double>& values) const;

  std::optional<nlohmann::json> load_json(const std::string& key) const;
  void store_json(const std::string& key, const nlohmann::json& value) const;

private:
  std::filesystem::path entry_path(const std::string& key, std::string_view ext) const;

  std::optional<std::filesystem::path> dir_;
};

} // namespace kspread
