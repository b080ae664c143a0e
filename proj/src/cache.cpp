#include "zdpot/cache.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "zdpot/errors.hpp"
#include "zdpot/killed_operator.hpp"
#include "zdpot/parallel.hpp"

namespace zdpot {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'Z', 'D', 'K', '1'};
constexpr std::size_t kSampleStride = 100;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(int v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::uint64_t take(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > in_.size()) {
      throw CacheError("truncated cache payload at byte " + std::to_string(pos_));
    }
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  int i32() { return static_cast<int>(u32()); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

void write_point(Writer& w, const LatticePoint& p) {
  for (int i = 0; i < p.dim(); ++i) w.i32(p[i]);
}

LatticePoint read_point(Reader& r, int dim) {
  LatticePoint p(dim);
  for (int i = 0; i < dim; ++i) p[i] = r.i32();
  return p;
}

std::string point_tag(const LatticePoint& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) {
    if (i) s += '_';
    s += (p[i] < 0 ? "m" : "") + std::to_string(std::abs(p[i]));
  }
  return s;
}

std::vector<std::uint8_t> read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CacheError("cannot open " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Values at the sampled indices 0, 100, 200, ..., recomputed from scratch.
std::vector<double> rederive(const CacheHeader& h, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  switch (h.kind) {
    case CacheKind::Free: {
      const auto field = default_kernel_cache().free_field(h.dim, h.step);
      if (field->values().size() != h.count) throw CacheError("free field size mismatch");
      for (auto i : idx) out.push_back(field->values()[i]);
      break;
    }
    case CacheKind::Killed: {
      auto B = make_ball(h.center, h.radius);
      KilledField field = KilledField::point_mass(B, h.start);
      for (int n = 0; n < h.step; ++n) field.step_in_place();
      if (field.values().size() != h.count) throw CacheError("killed field size mismatch");
      for (auto i : idx) out.push_back(field.values()[i]);
      break;
    }
    case CacheKind::Green: {
      auto B = make_ball(h.center, h.radius);
      const std::size_t n = B->size();
      if (n * n != h.count) throw CacheError("green table size mismatch");
      const KilledOperator op(B);
      std::map<std::size_t, Eigen::VectorXd> cols;
      for (auto k : idx) {
        const std::size_t j = k % n;
        auto it = cols.find(j);
        if (it == cols.end()) it = cols.emplace(j, op.green_column(j)).first;
        out.push_back(it->second[static_cast<Eigen::Index>(k / n)]);
      }
      break;
    }
  }
  return out;
}

}  // namespace

std::string to_string(CacheKind kind) {
  switch (kind) {
    case CacheKind::Free:
      return "free";
    case CacheKind::Killed:
      return "killed";
    case CacheKind::Green:
      return "green";
  }
  return "unknown";
}

Json CacheHeader::to_json() const {
  Json j{{"dim", dim}, {"kind", to_string(kind)}, {"step", step}, {"count", count}};
  if (kind == CacheKind::Free) j["extent"] = extent;
  if (kind != CacheKind::Free) {
    j["center"] = zdpot::to_json(center);
    j["radius"] = radius;
  }
  if (kind == CacheKind::Killed) j["start"] = zdpot::to_json(start);
  return j;
}

CacheEntry cache_entry(const FreeField& field) {
  CacheEntry e;
  e.header.dim = field.dim();
  e.header.kind = CacheKind::Free;
  e.header.extent = field.extent();
  e.header.step = field.step();
  e.values.assign(field.values().begin(), field.values().end());
  e.header.count = e.values.size();
  return e;
}

CacheEntry cache_entry(const KilledField& field) {
  const Domain& B = field.domain();
  if (!B.is_ball()) throw UsageError("cache_entry: only ball domains are cached");
  CacheEntry e;
  e.header.dim = B.dim();
  e.header.kind = CacheKind::Killed;
  e.header.center = B.center();
  e.header.radius = B.radius();
  e.header.start = field.start();
  e.header.step = field.step();
  e.values.assign(field.values().begin(), field.values().end());
  e.header.count = e.values.size();
  return e;
}

CacheEntry cache_entry(const GreenTable& table) {
  const Domain& B = table.domain();
  if (!B.is_ball()) throw UsageError("cache_entry: only ball domains are cached");
  if (table.method() != GreenMethod::Solve) {
    throw UsageError("cache_entry: only solved Green tables are cached");
  }
  CacheEntry e;
  e.header.dim = B.dim();
  e.header.kind = CacheKind::Green;
  e.header.center = B.center();
  e.header.radius = B.radius();
  e.values.assign(table.values().begin(), table.values().end());
  e.header.count = e.values.size();
  return e;
}

std::vector<std::uint8_t> encode_cache_entry(const CacheEntry& entry) {
  const CacheHeader& h = entry.header;
  if (h.count != entry.values.size()) throw UsageError("cache entry count mismatch");
  Writer w;
  w.out.insert(w.out.end(), std::begin(kMagic), std::end(kMagic));
  w.u32(static_cast<std::uint32_t>(h.dim));
  w.u32(static_cast<std::uint32_t>(h.kind));
  switch (h.kind) {
    case CacheKind::Free:
      w.i32(h.extent);
      break;
    case CacheKind::Killed:
      write_point(w, h.center);
      w.i32(h.radius);
      write_point(w, h.start);
      break;
    case CacheKind::Green:
      write_point(w, h.center);
      w.i32(h.radius);
      break;
  }
  w.u32(static_cast<std::uint32_t>(h.step));
  w.u64(h.count);
  w.out.reserve(w.out.size() + 8 * entry.values.size());
  for (double v : entry.values) w.f64(v);
  return std::move(w.out);
}

CacheEntry decode_cache_entry(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw CacheError("bad magic (expected ZDK1)");
  }
  Reader r(bytes);
  r.take(4);
  CacheEntry e;
  CacheHeader& h = e.header;
  h.dim = static_cast<int>(r.u32());
  if (h.dim < 1 || h.dim > kMaxDim) throw CacheError("bad dimension " + std::to_string(h.dim));
  const std::uint32_t kind = r.u32();
  if (kind > 2) throw CacheError("unknown kind flag " + std::to_string(kind));
  h.kind = static_cast<CacheKind>(kind);
  switch (h.kind) {
    case CacheKind::Free:
      h.extent = r.i32();
      break;
    case CacheKind::Killed:
      h.center = read_point(r, h.dim);
      h.radius = r.i32();
      h.start = read_point(r, h.dim);
      break;
    case CacheKind::Green:
      h.center = read_point(r, h.dim);
      h.radius = r.i32();
      break;
  }
  h.step = static_cast<int>(r.u32());
  h.count = r.u64();
  if (r.remaining() != 8 * h.count) {
    throw CacheError("payload holds " + std::to_string(r.remaining()) + " bytes, header promises " +
                     std::to_string(8 * h.count));
  }
  e.values.resize(h.count);
  for (auto& v : e.values) v = r.f64();
  return e;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

DiskCache::DiskCache(fs::path dir) : dir_(std::move(dir)) {}

std::string DiskCache::file_name(const CacheHeader& h) {
  std::ostringstream os;
  os << to_string(h.kind) << "_d" << h.dim;
  if (h.kind != CacheKind::Free) os << "_c" << point_tag(h.center) << "_r" << h.radius;
  if (h.kind == CacheKind::Killed) os << "_s" << point_tag(h.start);
  if (h.kind != CacheKind::Green) os << "_n" << h.step;
  os << ".zdk";
  return os.str();
}

fs::path DiskCache::store(const CacheEntry& entry) const {
  const auto bytes = encode_cache_entry(entry);
  const fs::path path = dir_ / file_name(entry.header);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
  return path;
}

CacheEntry DiskCache::load(const fs::path& file) const {
  try {
    return decode_cache_entry(read_bytes(file));
  } catch (const CacheError& e) {
    throw CacheError(file.filename().string() + ": " + e.what());
  }
}

std::vector<fs::path> DiskCache::files() const {
  std::vector<fs::path> out;
  if (!fs::exists(dir_)) return out;
  for (const auto& ent : fs::directory_iterator(dir_)) {
    if (ent.is_regular_file() && ent.path().extension() == ".zdk") out.push_back(ent.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CacheListing> DiskCache::list() const {
  std::vector<CacheListing> out;
  for (const auto& f : files()) {
    CacheListing l;
    l.file = f.filename().string();
    try {
      l.header = decode_cache_entry(read_bytes(f)).header;
      l.readable = true;
    } catch (const CacheError& e) {
      l.error = e.what();
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::size_t DiskCache::clear() const {
  std::size_t n = 0;
  for (const auto& f : files()) n += fs::remove(f) ? 1 : 0;
  return n;
}

CacheVerifyResult DiskCache::verify(unsigned threads) const {
  const auto paths = files();
  CacheVerifyResult res;
  res.files = paths.size();
  std::vector<std::string> reasons(paths.size());
  std::vector<std::size_t> checked(paths.size(), 0);
  parallel_for(paths.size(), threads, [&](std::size_t k) {
    try {
      const CacheEntry e = decode_cache_entry(read_bytes(paths[k]));
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < e.values.size(); i += kSampleStride) idx.push_back(i);
      const auto fresh = rederive(e.header, idx);
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (std::bit_cast<std::uint64_t>(fresh[t]) !=
            std::bit_cast<std::uint64_t>(e.values[idx[t]])) {
          reasons[k] = "value " + std::to_string(idx[t]) + " differs from its re-derivation";
          return;
        }
      }
      checked[k] = idx.size();
    } catch (const std::exception& ex) {
      reasons[k] = ex.what();
    }
  });
  for (std::size_t k = 0; k < paths.size(); ++k) {
    res.entries_checked += checked[k];
    if (!reasons[k].empty()) res.failures.emplace_back(paths[k].filename().string(), reasons[k]);
  }
  return res;
}

}  // namespace zdpot
