#include "oblim/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "oblim/errors.hpp"

namespace oblim {

namespace {

constexpr char kMagic[4] = {'O', 'B', 'M', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t offset() const { return pos_; }

 private:
  std::uint64_t get(int width) {
    if (pos_ + static_cast<std::size_t>(width) > b_.size()) throw IoError("snapshot truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (len > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    len -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode(const GridSpec& g, std::uint8_t kind, double epsilon, double time,
                                 const std::vector<const Field*>& comps) {
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kSnapshotVersion);
  w.u8(static_cast<std::uint8_t>(g.dim));
  w.u8(kind);
  w.u32(static_cast<std::uint32_t>(g.n));
  w.f64(g.box_length);
  w.f64(epsilon);
  w.f64(time);
  w.u32(static_cast<std::uint32_t>(comps.size()));
  for (const Field* f : comps)
    for (double v : f->values()) w.f64(v);
  auto& bytes = w.bytes();
  const std::uint32_t crc = crc_of(bytes.data() + kSnapshotHeaderBytes, bytes.size() - kSnapshotHeaderBytes);
  w.u32(crc);
  return std::move(bytes);
}

std::size_t component_count(int dim) {
  const auto slots = static_cast<std::size_t>(dim * (dim + 1) / 2);
  return static_cast<std::size_t>(dim) + slots + 2;
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const CompressibleState& s) {
  std::vector<const Field*> comps{&s.phi};
  for (const auto& c : s.u.components) comps.push_back(&c);
  comps.push_back(&s.eta);
  for (const auto& c : s.tau.components) comps.push_back(&c);
  return encode(s.grid(), 0, s.epsilon, s.time, comps);
}

std::vector<std::uint8_t> encode_snapshot(const IncompressibleState& s) {
  std::vector<const Field*> comps;
  for (const auto& c : s.u.components) comps.push_back(&c);
  comps.push_back(&s.eta);
  for (const auto& c : s.tau.components) comps.push_back(&c);
  comps.push_back(&s.pi);
  return encode(s.grid(), 1, 0.0, s.time, comps);
}

AnyState decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("bad snapshot magic");
  if (bytes.size() < kSnapshotHeaderBytes + 4) throw IoError("snapshot truncated");
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint16_t version = r.u16();
  if (version != kSnapshotVersion)
    throw IoError("unsupported snapshot version " + std::to_string(version));
  const int dim = r.u8();
  const std::uint8_t kind = r.u8();
  const auto n = r.u32();
  const double box = r.f64();
  const double epsilon = r.f64();
  const double time = r.f64();
  const std::uint32_t count = r.u32();
  if (kind > 1) throw IoError("unknown snapshot state kind " + std::to_string(kind));

  GridSpec grid;
  try {
    grid = make_grid(dim, static_cast<int>(n), box);
  } catch (const ConfigError& e) {
    throw IoError(std::string("snapshot header: ") + e.what());
  }
  if (count != component_count(dim)) throw IoError("snapshot component count mismatch");
  const std::size_t points = grid.size();
  const std::size_t payload = static_cast<std::size_t>(count) * points * 8;
  if (bytes.size() != kSnapshotHeaderBytes + payload + 4)
    throw IoError("snapshot length mismatch: expected " + std::to_string(kSnapshotHeaderBytes + payload + 4) +
                  " bytes, found " + std::to_string(bytes.size()));
  const std::uint32_t crc = crc_of(bytes.data() + kSnapshotHeaderBytes, payload);

  std::vector<Field> comps;
  comps.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<double> v(points);
    for (auto& x : v) x = r.f64();
    comps.emplace_back(grid, std::move(v));
  }
  if (r.u32() != crc) throw IoError("snapshot checksum mismatch");

  const auto d = static_cast<std::size_t>(dim);
  auto take = [&](std::size_t first, std::size_t len) {
    return std::vector<Field>(std::make_move_iterator(comps.begin() + static_cast<long>(first)),
                              std::make_move_iterator(comps.begin() + static_cast<long>(first + len)));
  };
  const std::size_t slots = d * (d + 1) / 2;
  if (kind == 0) {
    CompressibleState s;
    s.phi = std::move(comps[0]);
    s.eta = std::move(comps[1 + d]);
    s.u = VectorField(take(1, d));
    s.tau = SymTensorField(take(2 + d, slots));
    s.epsilon = epsilon;
    s.time = time;
    return s;
  }
  IncompressibleState s;
  s.eta = std::move(comps[d]);
  s.pi = std::move(comps[1 + d + slots]);
  s.u = VectorField(take(0, d));
  s.tau = SymTensorField(take(1 + d, slots));
  s.time = time;
  return s;
}

void save_snapshot(const CompressibleState& s, const std::filesystem::path& path) {
  write_file(encode_snapshot(s), path);
}

void save_snapshot(const IncompressibleState& s, const std::filesystem::path& path) {
  write_file(encode_snapshot(s), path);
}

AnyState load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return decode_snapshot(bytes);
}

}  // namespace oblim
