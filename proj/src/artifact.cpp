#include "kvrand/artifact.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "kvrand/error.hpp"

namespace kvrand {

namespace {

constexpr std::array<char, 4> kMagic{'K', 'V', 'R', 'D'};
constexpr std::streamoff kCountOffset = 24;
constexpr std::uint8_t kFlagMonotone = 1;
constexpr std::uint8_t kFlagFloat32 = 2;
// Guards against absurd counts in corrupted headers before allocating.
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 40;

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  const T le = to_le(v);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

void put_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

void put_reals(std::ostream& out, std::span<const double> values, bool float32) {
  constexpr std::size_t kChunk = 1 << 14;
  std::vector<char> buffer;
  for (std::size_t i = 0; i < values.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, values.size() - i);
    if (float32) {
      buffer.resize(n * 4);
      for (std::size_t j = 0; j < n; ++j) {
        const auto bits = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(values[i + j])));
        std::memcpy(buffer.data() + 4 * j, &bits, 4);
      }
    } else {
      buffer.resize(n * 8);
      for (std::size_t j = 0; j < n; ++j) {
        const auto bits = to_le(std::bit_cast<std::uint64_t>(values[i + j]));
        std::memcpy(buffer.data() + 8 * j, &bits, 8);
      }
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::BadArtifact, "artifact is truncated");
    }
  }

  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return to_le(v);
  }

  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  void reals(std::vector<double>& out, std::size_t n, bool float32) {
    out.resize(n);
    if (float32) {
      std::vector<std::uint32_t> raw(n);
      if (n > 0) bytes(raw.data(), n * 4);
      for (std::size_t i = 0; i < n; ++i) out[i] = std::bit_cast<float>(to_le(raw[i]));
    } else {
      if (n > 0) bytes(out.data(), n * 8);
      if constexpr (std::endian::native != std::endian::little) {
        for (auto& v : out) v = std::bit_cast<double>(to_le(std::bit_cast<std::uint64_t>(v)));
      }
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::BadArtifact, "artifact has trailing bytes");
    }
  }

 private:
  std::istream& in_;
};

struct Header {
  ArtifactKind kind = ArtifactKind::Grid;
  std::uint8_t flags = 0;
  std::uint8_t mode = 0;
  std::uint32_t n_e = 0;
  std::uint64_t n_d = 0;
  std::uint64_t count = 0;
  std::vector<Interval> excised;
  double x_min = 0.0;
  double x_max = 0.0;
  double inv_m = 0.0;
  double inv_q = 0.0;
  double shift = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

void put_header(std::ostream& out, const Header& h) {
  out.write(kMagic.data(), 4);
  put(out, kArtifactVersion);
  put(out, static_cast<std::uint8_t>(h.kind));
  put(out, h.flags);
  put(out, h.mode);
  const std::uint8_t pad[3] = {0, 0, 0};
  out.write(reinterpret_cast<const char*>(pad), 3);
  put(out, h.n_e);
  put(out, h.n_d);
  put(out, h.count);
  put(out, static_cast<std::uint64_t>(h.excised.size()));
  for (double v : {h.x_min, h.x_max, h.inv_m, h.inv_q, h.shift, h.y_min, h.y_max}) put_f64(out, v);
  for (const auto& iv : h.excised) {
    put_f64(out, iv.lo);
    put_f64(out, iv.hi);
  }
}

Header get_header(Reader& r, ArtifactKind expected) {
  std::array<char, 4> magic{};
  r.bytes(magic.data(), 4);
  if (magic != kMagic) throw Error(ErrorCode::BadArtifact, "not a kvrand artifact (bad magic)");
  const auto version = r.get<std::uint16_t>();
  if (version != kArtifactVersion) {
    throw Error(ErrorCode::BadArtifact,
                "unsupported artifact version " + std::to_string(version));
  }
  Header h;
  const auto kind = r.get<std::uint8_t>();
  if (kind != static_cast<std::uint8_t>(expected)) {
    throw Error(ErrorCode::BadArtifact, "artifact kind " + std::to_string(kind) + ", expected " +
                                            std::to_string(static_cast<int>(expected)));
  }
  h.kind = expected;
  h.flags = r.get<std::uint8_t>();
  h.mode = r.get<std::uint8_t>();
  std::uint8_t pad[3];
  r.bytes(pad, 3);
  h.n_e = r.get<std::uint32_t>();
  h.n_d = r.get<std::uint64_t>();
  h.count = r.get<std::uint64_t>();
  const auto n_excised = r.get<std::uint64_t>();
  if (h.count > kMaxCount || n_excised > kMaxCount || h.n_d > kMaxCount) {
    throw Error(ErrorCode::BadArtifact, "artifact header counts are implausible");
  }
  h.x_min = r.f64();
  h.x_max = r.f64();
  h.inv_m = r.f64();
  h.inv_q = r.f64();
  h.shift = r.f64();
  h.y_min = r.f64();
  h.y_max = r.f64();
  h.excised.resize(n_excised);
  for (auto& iv : h.excised) {
    iv.lo = r.f64();
    iv.hi = r.f64();
  }
  return h;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for reading");
  return in;
}

void check_written(std::ostream& out, const std::string& what) {
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + what);
}

}  // namespace

GridArtifact to_artifact(const Sampler& sampler, double shift) {
  const auto& g = sampler.grid();
  GridArtifact a;
  a.x_min = sampler.x_min();
  a.x_max = sampler.x_max();
  a.shift = shift;
  a.excised = sampler.coordinate_map().excised();
  a.mode = sampler.mode();
  a.n_e = static_cast<std::uint32_t>(sampler.n_e());
  a.n_d = g.levels;
  a.x_nodes = g.x_nodes;
  a.y_nodes = g.y_nodes;
  a.inv_m = g.inv_slope;
  a.inv_q = g.inv_intercept;
  a.y_min = g.y_min;
  a.y_max = g.y_max;
  a.monotone = g.monotone;
  return a;
}

Sampler to_sampler(const GridArtifact& a) {
  OptimalGrid grid = make_optimal_grid(a.x_nodes, a.y_nodes, a.n_d);
  if (grid.inv_slope != a.inv_m || grid.inv_intercept != a.inv_q || grid.y_min != a.y_min ||
      grid.y_max != a.y_max || grid.monotone != a.monotone) {
    throw Error(ErrorCode::BadArtifact, "stored grid header does not match its nodes");
  }
  return Sampler(std::move(grid), a.mode, a.n_e, CoordinateMap(a.excised), a.x_min, a.x_max);
}

void write_artifact(std::ostream& out, const GridArtifact& a) {
  if (a.x_nodes.size() != a.y_nodes.size()) {
    throw Error(ErrorCode::InvalidArgument, "grid node arrays differ in length");
  }
  Header h;
  h.kind = ArtifactKind::Grid;
  h.flags = a.monotone ? kFlagMonotone : 0;
  h.mode = static_cast<std::uint8_t>(a.mode);
  h.n_e = a.n_e;
  h.n_d = a.n_d;
  h.count = a.x_nodes.size();
  h.excised = a.excised;
  h.x_min = a.x_min;
  h.x_max = a.x_max;
  h.inv_m = a.inv_m;
  h.inv_q = a.inv_q;
  h.shift = a.shift;
  h.y_min = a.y_min;
  h.y_max = a.y_max;
  put_header(out, h);
  put_reals(out, a.x_nodes, false);
  put_reals(out, a.y_nodes, false);
  check_written(out, "grid artifact");
}

void write_artifact(std::ostream& out, const TableArtifact& a) {
  Header h;
  h.kind = ArtifactKind::Table;
  h.flags = a.float32 ? kFlagFloat32 : 0;
  h.n_d = a.table.per_level_counts.size();
  h.count = a.table.samples.size();
  h.x_min = a.x_min;
  h.x_max = a.x_max;
  h.inv_m = a.dx_r;
  h.y_min = a.y_min;
  h.y_max = a.y_max;
  put_header(out, h);
  put_reals(out, a.table.samples, a.float32);
  for (auto c : a.table.per_level_counts) put(out, static_cast<std::uint64_t>(c));
  check_written(out, "table artifact");
}

void write_artifact_file(const std::string& path, const GridArtifact& a) {
  auto out = open_out(path);
  write_artifact(out, a);
  out.close();
  check_written(out, "'" + path + "'");
}

void write_artifact_file(const std::string& path, const TableArtifact& a) {
  auto out = open_out(path);
  write_artifact(out, a);
  out.close();
  check_written(out, "'" + path + "'");
}

ArtifactKind peek_artifact_kind(const std::string& path) {
  auto in = open_in(path);
  Reader r(in);
  std::array<char, 4> magic{};
  r.bytes(magic.data(), 4);
  if (magic != kMagic) throw Error(ErrorCode::BadArtifact, "not a kvrand artifact (bad magic)");
  r.get<std::uint16_t>();
  const auto kind = r.get<std::uint8_t>();
  if (kind == 1) return ArtifactKind::Grid;
  if (kind == 2) return ArtifactKind::Table;
  throw Error(ErrorCode::BadArtifact, "unknown artifact kind " + std::to_string(kind));
}

GridArtifact read_grid_artifact(std::istream& in) {
  Reader r(in);
  const Header h = get_header(r, ArtifactKind::Grid);
  if (h.mode > static_cast<std::uint8_t>(SamplerMode::Lagrange)) {
    throw Error(ErrorCode::BadArtifact, "unknown sampler mode in artifact");
  }
  if (h.flags & ~kFlagMonotone) throw Error(ErrorCode::BadArtifact, "unknown grid flags");
  GridArtifact a;
  a.x_min = h.x_min;
  a.x_max = h.x_max;
  a.shift = h.shift;
  a.excised = h.excised;
  a.mode = static_cast<SamplerMode>(h.mode);
  a.n_e = h.n_e;
  a.n_d = h.n_d;
  a.inv_m = h.inv_m;
  a.inv_q = h.inv_q;
  a.y_min = h.y_min;
  a.y_max = h.y_max;
  a.monotone = (h.flags & kFlagMonotone) != 0;
  r.reals(a.x_nodes, h.count, false);
  r.reals(a.y_nodes, h.count, false);
  r.expect_end();
  return a;
}

TableArtifact read_table_artifact(std::istream& in) {
  Reader r(in);
  const Header h = get_header(r, ArtifactKind::Table);
  if (h.flags & ~kFlagFloat32) throw Error(ErrorCode::BadArtifact, "unknown table flags");
  TableArtifact a;
  a.x_min = h.x_min;
  a.x_max = h.x_max;
  a.dx_r = h.inv_m;
  a.y_min = h.y_min;
  a.y_max = h.y_max;
  a.float32 = (h.flags & kFlagFloat32) != 0;
  r.reals(a.table.samples, h.count, a.float32);
  a.table.per_level_counts.resize(h.n_d);
  std::uint64_t total = 0;
  for (auto& c : a.table.per_level_counts) {
    c = r.get<std::uint64_t>();
    total += c;
  }
  if (total != h.count) {
    throw Error(ErrorCode::BadArtifact, "per-level counts do not add up to the sample count");
  }
  r.expect_end();
  return a;
}

GridArtifact read_grid_artifact_file(const std::string& path) {
  auto in = open_in(path);
  return read_grid_artifact(in);
}

TableArtifact read_table_artifact_file(const std::string& path) {
  auto in = open_in(path);
  return read_table_artifact(in);
}

TableArtifactWriter::TableArtifactWriter(const std::string& path, double x_min, double x_max,
                                         double dx_r, double y_min, double y_max, bool float32)
    : path_(path), out_(open_out(path)), float32_(float32) {
  Header h;
  h.kind = ArtifactKind::Table;
  h.flags = float32 ? kFlagFloat32 : 0;
  h.x_min = x_min;
  h.x_max = x_max;
  h.inv_m = dx_r;
  h.y_min = y_min;
  h.y_max = y_max;
  put_header(out_, h);
  check_written(out_, "'" + path_ + "'");
}

void TableArtifactWriter::append_level(std::span<const double> points) {
  put_reals(out_, points, float32_);
  count_ += points.size();
  per_level_.push_back(points.size());
  check_written(out_, "'" + path_ + "'");
}

std::size_t TableArtifactWriter::finish() {
  if (finished_) return count_;
  for (auto c : per_level_) put(out_, c);
  out_.seekp(16);
  put(out_, static_cast<std::uint64_t>(per_level_.size()));
  out_.seekp(kCountOffset);
  put(out_, static_cast<std::uint64_t>(count_));
  out_.close();
  check_written(out_, "'" + path_ + "'");
  finished_ = true;
  return count_;
}

}  // namespace kvrand
