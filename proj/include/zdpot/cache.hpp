#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zdpot/green.hpp"
#include "zdpot/kernel.hpp"

namespace zdpot {

enum class CacheKind : std::uint32_t { Free = 0, Killed = 1, Green = 2 };

std::string to_string(CacheKind kind);

// Binary layout, little-endian:
//   "ZDK1" | u32 d | u32 kind
//   free:   i32 extent
//   killed: i32 center[d] | i32 radius | i32 start[d]
//   green:  i32 center[d] | i32 radius
//   u32 step | u64 count | f64 values[count]
struct CacheHeader {
  int dim = 0;
  CacheKind kind = CacheKind::Free;
  int extent = 0;
  LatticePoint center;
  int radius = 0;
  LatticePoint start;
  int step = 0;
  std::uint64_t count = 0;

  Json to_json() const;
};

struct CacheEntry {
  CacheHeader header;
  std::vector<double> values;
};

CacheEntry cache_entry(const FreeField& field);
CacheEntry cache_entry(const KilledField& field);
// Requires a ball domain.
CacheEntry cache_entry(const GreenTable& table);

std::vector<std::uint8_t> encode_cache_entry(const CacheEntry& entry);
// Throws CacheError on a bad magic, unknown kind, or truncated payload.
CacheEntry decode_cache_entry(const std::vector<std::uint8_t>& bytes);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct CacheListing {
  std::string file;
  bool readable = false;
  std::string error;
  CacheHeader header;
};

struct CacheVerifyResult {
  std::size_t files = 0;
  std::size_t entries_checked = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (file, reason)

  bool ok() const { return failures.empty(); }
};

// Directory of *.zdk files, one kernel field or Green table per file.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  // Canonical file name for a header, e.g. "free_d2_n64.zdk".
  static std::string file_name(const CacheHeader& header);

  std::filesystem::path store(const CacheEntry& entry) const;
  CacheEntry load(const std::filesystem::path& file) const;

  std::vector<CacheListing> list() const;
  std::size_t clear() const;

  // Re-derives every 100th value of every file from scratch and compares bit
  // for bit. Unreadable files are reported as failures.
  CacheVerifyResult verify(unsigned threads = 0) const;

 private:
  std::vector<std::filesystem::path> files() const;

  std::filesystem::path dir_;
};

}  // namespace zdpot
