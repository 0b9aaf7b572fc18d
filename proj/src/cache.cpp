#include "kspread/cache.hpp"

#include "kspread/error.hpp"

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace kspread {

namespace fs = std::filesystem;

namespace {

void write_atomically(const fs::path& target, const std::string& bytes) {
  static std::atomic<std::uint64_t> counter{0};
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
         std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write cache entry '" + tmp.string() + "'");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  fs::rename(tmp, target);
}

} // namespace

std::string stable_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

ResultCache::ResultCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(*dir_); }

std::optional<fs::path> ResultCache::dir_from_env() {
  const char* v = std::getenv(kCacheEnvVar);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return fs::path(v);
}

fs::path ResultCache::entry_path(const std::string& key, std::string_view ext) const {
  return *dir_ / (stable_hash(std::string(kCacheSchema) + "|" + key) + std::string(ext));
}

// Binary layout: u64 key length, key bytes, u64 count, count doubles.
std::optional<std::vector<double>> ResultCache::load_vector(const std::string& key) const {
  if (!dir_) return std::nullopt;
  std::ifstream is(entry_path(key, ".bin"), std::ios::binary);
  if (!is) return std::nullopt;
  std::uint64_t len = 0;
  if (!is.read(reinterpret_cast<char*>(&len), sizeof len) || len != key.size()) return std::nullopt;
  std::string stored(len, '\0');
  if (!is.read(stored.data(), static_cast<std::streamsize>(len)) || stored != key) return std::nullopt;
  std::uint64_t count = 0;
  if (!is.read(reinterpret_cast<char*>(&count), sizeof count)) return std::nullopt;
  std::vector<double> values(count);
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double))))
    return std::nullopt;
  return values;
}

void ResultCache::store_vector(const std::string& key, const std::vector<double>& values) const {
  if (!dir_) return;
  std::string bytes;
  const std::uint64_t len = key.size();
  const std::uint64_t count = values.size();
  bytes.append(reinterpret_cast<const char*>(&len), sizeof len);
  bytes.append(key);
  bytes.append(reinterpret_cast<const char*>(&count), sizeof count);
  bytes.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
  write_atomically(entry_path(key, ".bin"), bytes);
}

std::optional<nlohmann::json> ResultCache::load_json(const std::string& key) const {
  if (!dir_) return std::nullopt;
  std::ifstream is(entry_path(key, ".json"));
  if (!is) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(is);
    if (j.value("key", std::string{}) != key) return std::nullopt;
    return j.at("value");
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void ResultCache::store_json(const std::string& key, const nlohmann::json& value) const {
  if (!dir_) return;
  write_atomically(entry_path(key, ".json"), nlohmann::json{{"key", key}, {"value", value}}.dump());
}

} // namespace kspread
