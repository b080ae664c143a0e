#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "zdpot/cache.hpp"
#include "zdpot/errors.hpp"

using namespace zdpot;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("zdpot_test_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

KilledField sample_killed() {
  KilledField f = KilledField::point_mass(make_ball(LatticePoint{1, -1}, 3), LatticePoint{0, -1});
  for (int k = 0; k < 5; ++k) f.step_in_place();
  return f;
}

}  // namespace

TEST(Codec, RoundTripsEveryKind) {
  const FreeField free = FreeField::point_mass(LatticePoint(3)).stepped().stepped().stepped();
  const KilledField killed = sample_killed();
  const GreenTable green = green_solve(make_ball(LatticePoint{0}, 3));
  for (const CacheEntry& e : {cache_entry(free), cache_entry(killed), cache_entry(green)}) {
    const CacheEntry back = decode_cache_entry(encode_cache_entry(e));
    EXPECT_EQ(back.header.to_json(), e.header.to_json());
    EXPECT_EQ(back.values, e.values);
  }
  const CacheEntry k = cache_entry(killed);
  EXPECT_EQ(k.header.kind, CacheKind::Killed);
  EXPECT_EQ(k.header.start, (LatticePoint{0, -1}));
  EXPECT_EQ(k.header.step, 5);
}

TEST(Codec, RejectsCorruptBytes) {
  auto bytes = encode_cache_entry(cache_entry(FreeField::point_mass(LatticePoint{0}).stepped()));
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(decode_cache_entry(truncated), CacheError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_cache_entry(magic), CacheError);
  auto kind = bytes;
  kind[8] = 9;
  EXPECT_THROW(decode_cache_entry(kind), CacheError);
  EXPECT_THROW(decode_cache_entry({}), CacheError);
}

TEST(Codec, GreenTableMustBeSolvedOnABall) {
  auto D = std::make_shared<const Domain>(Domain::from_points({LatticePoint{0}, LatticePoint{1}}));
  EXPECT_THROW(cache_entry(green_solve(D)), UsageError);
  EXPECT_THROW(cache_entry(green_series_table(make_ball(LatticePoint{0}, 1), 1e-12)), UsageError);
}

TEST(DiskCache, NamesListVerifyAndClear) {
  TempDir tmp("disk");
  const DiskCache cache(tmp.path());
  EXPECT_TRUE(cache.list().empty());
  const auto f = cache.store(cache_entry(*default_kernel_cache().free_field(2, 12)));
  EXPECT_EQ(f.filename().string(), "free_d2_n12.zdk");
  cache.store(cache_entry(sample_killed()));
  cache.store(cache_entry(green_solve(make_ball(LatticePoint{0, 0}, 2))));
  const auto listing = cache.list();
  ASSERT_EQ(listing.size(), 3u);
  for (const auto& l : listing) EXPECT_TRUE(l.readable) << l.file;
  EXPECT_TRUE(fs::exists(tmp.path() / "killed_d2_c1_m1_r3_s0_m1_n5.zdk"));
  EXPECT_TRUE(fs::exists(tmp.path() / "green_d2_c0_0_r2.zdk"));
  const CacheVerifyResult ok = cache.verify(2);
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.files, 3u);
  EXPECT_GT(ok.entries_checked, 0u);
  for (const auto& e : fs::directory_iterator(tmp.path())) {
    EXPECT_NE(e.path().extension(), ".tmp");
  }
  EXPECT_EQ(cache.clear(), 3u);
  EXPECT_TRUE(cache.list().empty());
}

TEST(DiskCache, TruncatedFileIsNamed) {
  TempDir tmp("truncated");
  const DiskCache cache(tmp.path());
  const auto f = cache.store(cache_entry(*default_kernel_cache().free_field(1, 20)));
  fs::resize_file(f, fs::file_size(f) - 8);
  const CacheVerifyResult res = cache.verify();
  ASSERT_EQ(res.failures.size(), 1u);
  EXPECT_EQ(res.failures[0].first, "free_d1_n20.zdk");
  try {
    cache.load(f);
    FAIL() << "expected CacheError";
  } catch (const CacheError& e) {
    EXPECT_NE(std::string(e.what()).find("free_d1_n20.zdk"), std::string::npos);
  }
  EXPECT_FALSE(cache.list()[0].readable);
}

TEST(DiskCache, TamperedValueFailsVerification) {
  TempDir tmp("tampered");
  const DiskCache cache(tmp.path());
  CacheEntry e = cache_entry(*default_kernel_cache().free_field(1, 8));
  e.values[0] += 1e-3;
  cache.store(e);
  EXPECT_FALSE(cache.verify().ok());
}

TEST(AtomicWrite, ReplacesContents) {
  TempDir tmp("atomic");
  const fs::path p = tmp.path() / "report.json";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  std::ifstream in(p);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(s, "second");
  EXPECT_FALSE(fs::exists(tmp.path() / "report.json.tmp"));
}
