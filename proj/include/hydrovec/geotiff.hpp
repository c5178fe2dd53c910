#pragma once

// Minimal single-band GeoTIFF codec: uncompressed strips or tiles, classic
// (non-Big) TIFF in either byte order, EPSG:4326 georeferencing through
// ModelPixelScale + ModelTiepoint, nodata through the GDAL_NODATA tag.
// Files are always written little-endian with strips.

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include "hydrovec/error.hpp"
#include "hydrovec/raster.hpp"

namespace hydrovec {

enum class SampleType { u8, i8, u16, i16, u32, i32, f32, f64 };

template <class T>
constexpr SampleType sample_type_of() {
  if constexpr (std::is_same_v<T, std::uint8_t>) return SampleType::u8;
  else if constexpr (std::is_same_v<T, std::int8_t>) return SampleType::i8;
  else if constexpr (std::is_same_v<T, std::uint16_t>) return SampleType::u16;
  else if constexpr (std::is_same_v<T, std::int16_t>) return SampleType::i16;
  else if constexpr (std::is_same_v<T, std::uint32_t>) return SampleType::u32;
  else if constexpr (std::is_same_v<T, std::int32_t>) return SampleType::i32;
  else if constexpr (std::is_same_v<T, float>) return SampleType::f32;
  else if constexpr (std::is_same_v<T, double>) return SampleType::f64;
  else static_assert(sizeof(T) == 0, "unsupported raster sample type");
}

inline std::size_t sample_bytes(SampleType t) {
  switch (t) {
    case SampleType::u8:
    case SampleType::i8: return 1;
    case SampleType::u16:
    case SampleType::i16: return 2;
    case SampleType::u32:
    case SampleType::i32:
    case SampleType::f32: return 4;
    case SampleType::f64: return 8;
  }
  return 0;
}

/// Header information of a GeoTIFF, available without decoding pixels.
struct TiffInfo {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 1;
  SampleType type = SampleType::u8;
  GeoRef geo{};
  std::optional<double> nodata;
};

namespace tiff_detail {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kTileByteCounts = 325,
  kSampleFormat = 339,
  kModelPixelScale = 33550,
  kModelTiepoint = 33922,
  kGeoKeyDirectory = 34735,
  kGdalNodata = 42113,
};

inline std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: return 4;
    case 5: case 10: case 12: return 8;
    default: return 0;
  }
}

class Reader {
 public:
  Reader(std::vector<std::uint8_t> bytes, std::string name)
      : data_(std::move(bytes)), name_(std::move(name)) {
    if (data_.size() < 8) fail("file too short for a TIFF header");
    if (data_[0] == 'I' && data_[1] == 'I') big_ = false;
    else if (data_[0] == 'M' && data_[1] == 'M') big_ = true;
    else fail("not a TIFF file");
    const auto magic = u16(2);
    if (magic == 43) fail("BigTIFF is not supported");
    if (magic != 42) fail("not a TIFF file");
    parse_ifd(u32(4));
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(name_ + ": " + what); }

  std::uint16_t u16(std::size_t off) const {
    need(off, 2);
    return big_ ? static_cast<std::uint16_t>(data_[off] << 8 | data_[off + 1])
                : static_cast<std::uint16_t>(data_[off + 1] << 8 | data_[off]);
  }
  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint32_t b = data_[off + static_cast<std::size_t>(big_ ? i : 3 - i)];
      v = (v << 8) | b;
    }
    return v;
  }
  std::uint64_t u64(std::size_t off) const {
    need(off, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      const std::uint64_t b = data_[off + static_cast<std::size_t>(big_ ? i : 7 - i)];
      v = (v << 8) | b;
    }
    return v;
  }

  void need(std::size_t off, std::size_t n) const {
    if (off > data_.size() || n > data_.size() - off) fail("truncated file");
  }

  bool has(std::uint16_t tag) const { return entries_.count(tag) != 0; }

  std::vector<double> numbers(std::uint16_t tag) const {
    auto it = entries_.find(tag);
    if (it == entries_.end()) return {};
    const auto& e = it->second;
    std::vector<double> out;
    out.reserve(e.count);
    const std::size_t sz = type_size(e.type);
    for (std::uint32_t i = 0; i < e.count; ++i) {
      const std::size_t off = e.offset + i * sz;
      switch (e.type) {
        case 1: case 7: need(off, 1); out.push_back(data_[off]); break;
        case 6: need(off, 1); out.push_back(static_cast<std::int8_t>(data_[off])); break;
        case 3: out.push_back(u16(off)); break;
        case 8: out.push_back(static_cast<std::int16_t>(u16(off))); break;
        case 4: out.push_back(u32(off)); break;
        case 9: out.push_back(static_cast<std::int32_t>(u32(off))); break;
        case 11: out.push_back(std::bit_cast<float>(u32(off))); break;
        case 12: out.push_back(std::bit_cast<double>(u64(off))); break;
        case 5: out.push_back(static_cast<double>(u32(off)) / u32(off + 4)); break;
        case 10:
          out.push_back(static_cast<double>(static_cast<std::int32_t>(u32(off))) /
                        static_cast<std::int32_t>(u32(off + 4)));
          break;
        default: fail("unsupported tag type");
      }
    }
    return out;
  }

  double number(std::uint16_t tag, double fallback) const {
    auto v = numbers(tag);
    return v.empty() ? fallback : v.front();
  }

  std::string ascii(std::uint16_t tag) const {
    auto it = entries_.find(tag);
    if (it == entries_.end()) return {};
    const auto& e = it->second;
    need(e.offset, e.count);
    std::string s(reinterpret_cast<const char*>(data_.data() + e.offset), e.count);
    while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
    return s;
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  bool big_endian() const { return big_; }

 private:
  struct Entry {
    std::uint16_t type;
    std::uint32_t count;
    std::size_t offset;
  };

  void parse_ifd(std::size_t off) {
    const std::uint16_t n = u16(off);
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::size_t e = off + 2 + 12u * i;
      const std::uint16_t tag = u16(e);
      const std::uint16_t type = u16(e + 2);
      const std::uint32_t count = u32(e + 4);
      const std::size_t sz = type_size(type);
      if (sz == 0) continue;
      const std::uint64_t total = static_cast<std::uint64_t>(sz) * count;
      const std::size_t value_off = total <= 4 ? e + 8 : u32(e + 8);
      entries_[tag] = Entry{type, count, value_off};
    }
  }

  std::vector<std::uint8_t> data_;
  std::string name_;
  bool big_ = false;
  std::map<std::uint16_t, Entry> entries_;
};

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

inline TiffInfo parse_info(const Reader& rd) {
  TiffInfo info;
  const double w = rd.number(kImageWidth, 0);
  const double h = rd.number(kImageLength, 0);
  if (!(w > 0) || !(h > 0)) rd.fail("missing image dimensions");
  info.cols = static_cast<std::size_t>(w);
  info.rows = static_cast<std::size_t>(h);
  info.bands = static_cast<std::size_t>(rd.number(kSamplesPerPixel, 1));
  if (info.bands != 1) rd.fail("expected single band, found " + std::to_string(info.bands));
  const auto compression = static_cast<int>(rd.number(kCompression, 1));
  if (compression != 1) rd.fail("unsupported compression " + std::to_string(compression));
  const auto bits = static_cast<int>(rd.number(kBitsPerSample, 1));
  const auto fmt = static_cast<int>(rd.number(kSampleFormat, 1));
  if (fmt == 1 && bits == 8) info.type = SampleType::u8;
  else if (fmt == 2 && bits == 8) info.type = SampleType::i8;
  else if (fmt == 1 && bits == 16) info.type = SampleType::u16;
  else if (fmt == 2 && bits == 16) info.type = SampleType::i16;
  else if (fmt == 1 && bits == 32) info.type = SampleType::u32;
  else if (fmt == 2 && bits == 32) info.type = SampleType::i32;
  else if (fmt == 3 && bits == 32) info.type = SampleType::f32;
  else if (fmt == 3 && bits == 64) info.type = SampleType::f64;
  else rd.fail("unsupported sample layout: " + std::to_string(bits) + " bits, format " +
               std::to_string(fmt));

  std::size_t cells = 0;
  std::size_t bytes = 0;
  if (__builtin_mul_overflow(info.rows, info.cols, &cells) ||
      __builtin_mul_overflow(cells, sample_bytes(info.type), &bytes))
    rd.fail("grid size overflow");
  if (bytes > rd.data().size()) rd.fail("grid size exceeds file size");

  const auto scale = rd.numbers(kModelPixelScale);
  const auto tie = rd.numbers(kModelTiepoint);
  if (scale.size() < 2 || tie.size() < 6) rd.fail("missing georeferencing tags");
  if (!(scale[0] > 0) || std::abs(scale[0] - scale[1]) > 1e-9 * scale[0])
    rd.fail("cells must be square with positive size");
  info.geo.cell_size = scale[0];
  info.geo.origin_lon = tie[3] - tie[0] * scale[0];
  info.geo.origin_lat = tie[4] + tie[1] * scale[1];
  // GTRasterTypeGeoKey == PixelIsPoint puts the tiepoint on the cell center.
  const auto keys = rd.numbers(kGeoKeyDirectory);
  for (std::size_t k = 4; k + 3 < keys.size(); k += 4)
    if (keys[k] == 1025 && keys[k + 1] == 0 && keys[k + 3] == 2) {
      info.geo.origin_lon -= 0.5 * scale[0];
      info.geo.origin_lat += 0.5 * scale[1];
    }

  const std::string nd = rd.ascii(kGdalNodata);
  if (!nd.empty()) {
    if (nd == "nan" || nd == "NaN" || nd == "-nan") {
      info.nodata = std::numeric_limits<double>::quiet_NaN();
    } else {
      try {
        info.nodata = std::stod(nd);
      } catch (const std::exception&) {
        rd.fail("bad nodata value '" + nd + "'");
      }
    }
  }
  return info;
}

inline double decode_sample(const Reader& rd, SampleType t, std::size_t off) {
  const auto& d = rd.data();
  switch (t) {
    case SampleType::u8: return d[off];
    case SampleType::i8: return static_cast<std::int8_t>(d[off]);
    case SampleType::u16: return rd.u16(off);
    case SampleType::i16: return static_cast<std::int16_t>(rd.u16(off));
    case SampleType::u32: return rd.u32(off);
    case SampleType::i32: return static_cast<std::int32_t>(rd.u32(off));
    case SampleType::f32: return std::bit_cast<float>(rd.u32(off));
    case SampleType::f64: return std::bit_cast<double>(rd.u64(off));
  }
  return 0.0;
}

template <class T>
void put(std::vector<std::uint8_t>& buf, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  if constexpr (std::endian::native == std::endian::little) {
    buf.insert(buf.end(), p, p + sizeof(T));
  } else {
    for (std::size_t i = sizeof(T); i-- > 0;) buf.push_back(p[i]);
  }
}

template <class T>
std::string nodata_text(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isnan(v)) return "nan";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class T>
bool same_bits_or_nan(T a, T b) {
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isnan(a) && std::isnan(b)) return true;
  }
  return a == b;
}

template <class T>
T default_nodata() {
  if constexpr (std::is_floating_point_v<T>) return std::numeric_limits<T>::quiet_NaN();
  else if constexpr (std::is_signed_v<T>) return std::numeric_limits<T>::min();
  else return std::numeric_limits<T>::max();
}

}  // namespace tiff_detail

inline TiffInfo read_tiff_info(const std::filesystem::path& path) {
  tiff_detail::Reader rd(tiff_detail::read_file(path), path.string());
  return tiff_detail::parse_info(rd);
}

/// Decodes a GeoTIFF held in memory into a raster of T. Samples are converted
/// numerically when the file type differs from T.
template <class T>
Raster<T> decode_geotiff(std::vector<std::uint8_t> bytes, const std::string& name = "<memory>") {
  using namespace tiff_detail;
  Reader rd(std::move(bytes), name);
  const TiffInfo info = parse_info(rd);
  Raster<T> out(info.rows, info.cols, info.geo);
  const std::size_t sb = sample_bytes(info.type);

  auto store = [&](std::size_t r, std::size_t c, std::size_t off) {
    out(r, c) = static_cast<T>(decode_sample(rd, info.type, off));
  };

  if (rd.has(kTileOffsets)) {
    const auto tw = static_cast<std::size_t>(rd.number(kTileWidth, 0));
    const auto th = static_cast<std::size_t>(rd.number(kTileLength, 0));
    if (tw == 0 || th == 0) rd.fail("bad tile size");
    const auto offsets = rd.numbers(kTileOffsets);
    const std::size_t across = (info.cols + tw - 1) / tw;
    const std::size_t down = (info.rows + th - 1) / th;
    if (offsets.size() < across * down) rd.fail("missing tile offsets");
    for (std::size_t ty = 0; ty < down; ++ty)
      for (std::size_t tx = 0; tx < across; ++tx) {
        const auto base = static_cast<std::size_t>(offsets[ty * across + tx]);
        rd.need(base, tw * th * sb);
        for (std::size_t y = 0; y < th && ty * th + y < info.rows; ++y)
          for (std::size_t x = 0; x < tw && tx * tw + x < info.cols; ++x)
            store(ty * th + y, tx * tw + x, base + (y * tw + x) * sb);
      }
  } else {
    const auto offsets = rd.numbers(kStripOffsets);
    if (offsets.empty()) rd.fail("missing strip offsets");
    auto rps = static_cast<std::size_t>(rd.number(kRowsPerStrip, static_cast<double>(info.rows)));
    if (rps == 0 || rps > info.rows) rps = info.rows;
    const std::size_t strips = (info.rows + rps - 1) / rps;
    if (offsets.size() < strips) rd.fail("missing strip offsets");
    for (std::size_t s = 0; s < strips; ++s) {
      const auto base = static_cast<std::size_t>(offsets[s]);
      const std::size_t nrows = std::min(rps, info.rows - s * rps);
      rd.need(base, nrows * info.cols * sb);
      for (std::size_t y = 0; y < nrows; ++y)
        for (std::size_t x = 0; x < info.cols; ++x)
          store(s * rps + y, x, base + (y * info.cols + x) * sb);
    }
  }

  if (info.nodata) {
    const T nd = static_cast<T>(*info.nodata);
    out.set_nodata_value(nd);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (same_bits_or_nan(out[i], nd)) out.set_nodata(i);
  }
  return out;
}

template <class T>
Raster<T> load_raster(const std::filesystem::path& path) {
  return decode_geotiff<T>(tiff_detail::read_file(path), path.string());
}

/// Encodes a raster as a little-endian stripped GeoTIFF. Nodata cells are
/// written with the raster's nodata value (or a type default) and the value
/// is recorded in GDAL_NODATA.
template <class T>
std::vector<std::uint8_t> encode_geotiff(const Raster<T>& grid) {
  using namespace tiff_detail;
  if (grid.empty()) throw InputError("empty raster");
  constexpr SampleType st = sample_type_of<T>();
  const std::size_t sb = sizeof(T);

  std::optional<T> nodata = grid.nodata_value();
  if (grid.has_nodata() && !nodata) nodata = default_nodata<T>();
  if (nodata) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.valid(i) && same_bits_or_nan(grid[i], *nodata))
        throw InputError("nodata value collides with a valid cell value");
  }

  const std::size_t row_bytes = grid.cols() * sb;
  const std::size_t rps = std::max<std::size_t>(1, std::min(grid.rows(), 65536 / row_bytes));
  const std::size_t strips = (grid.rows() + rps - 1) / rps;

  std::vector<std::uint8_t> buf;
  buf.reserve(8 + grid.size() * sb + 512 + strips * 8);
  buf.insert(buf.end(), {'I', 'I'});
  put<std::uint16_t>(buf, 42);
  put<std::uint32_t>(buf, 0);  // patched with the IFD offset

  std::vector<std::uint32_t> strip_offsets;
  std::vector<std::uint32_t> strip_counts;
  for (std::size_t s = 0; s < strips; ++s) {
    strip_offsets.push_back(static_cast<std::uint32_t>(buf.size()));
    const std::size_t r0 = s * rps;
    const std::size_t r1 = std::min(grid.rows(), r0 + rps);
    for (std::size_t r = r0; r < r1; ++r)
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        const std::size_t i = grid.index(r, c);
        put<T>(buf, grid.is_nodata(i) ? *nodata : grid[i]);
      }
    strip_counts.push_back(static_cast<std::uint32_t>((r1 - r0) * row_bytes));
    if (buf.size() > std::numeric_limits<std::uint32_t>::max())
      throw FormatError("raster too large for classic TIFF");
  }

  struct Field {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::vector<std::uint8_t> payload;
  };
  std::vector<Field> fields;
  auto add_shorts = [&](std::uint16_t tag, std::initializer_list<std::uint16_t> v) {
    Field f{tag, 3, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put<std::uint16_t>(f.payload, x);
    fields.push_back(std::move(f));
  };
  auto add_longs = [&](std::uint16_t tag, const std::vector<std::uint32_t>& v) {
    Field f{tag, 4, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put<std::uint32_t>(f.payload, x);
    fields.push_back(std::move(f));
  };
  auto add_doubles = [&](std::uint16_t tag, std::initializer_list<double> v) {
    Field f{tag, 12, static_cast<std::uint32_t>(v.size()), {}};
    for (auto x : v) put<double>(f.payload, x);
    fields.push_back(std::move(f));
  };

  std::uint16_t fmt = 1;
  if constexpr (std::is_floating_point_v<T>) fmt = 3;
  else if constexpr (std::is_signed_v<T>) fmt = 2;
  (void)st;

  add_longs(kImageWidth, {static_cast<std::uint32_t>(grid.cols())});
  add_longs(kImageLength, {static_cast<std::uint32_t>(grid.rows())});
  add_shorts(kBitsPerSample, {static_cast<std::uint16_t>(8 * sb)});
  add_shorts(kCompression, {1});
  add_shorts(kPhotometric, {1});
  add_longs(kStripOffsets, strip_offsets);
  add_shorts(kSamplesPerPixel, {1});
  add_longs(kRowsPerStrip, {static_cast<std::uint32_t>(rps)});
  add_longs(kStripByteCounts, strip_counts);
  add_shorts(kPlanarConfig, {1});
  add_shorts(kSampleFormat, {fmt});
  const auto& g = grid.geo();
  add_doubles(kModelPixelScale, {g.cell_size, g.cell_size, 0.0});
  add_doubles(kModelTiepoint, {0.0, 0.0, 0.0, g.origin_lon, g.origin_lat, 0.0});
  // Geographic model, PixelIsArea, WGS 84.
  add_shorts(kGeoKeyDirectory, {1, 1, 0, 3, 1024, 0, 1, 2, 1025, 0, 1, 1, 2048, 0, 1, 4326});
  if (nodata) {
    std::string s = nodata_text(*nodata);
    Field f{kGdalNodata, 2, static_cast<std::uint32_t>(s.size() + 1), {}};
    f.payload.assign(s.begin(), s.end());
    f.payload.push_back(0);
    fields.push_back(std::move(f));
  }

  if (buf.size() % 2) buf.push_back(0);
  const std::size_t ifd_off = buf.size();
  const std::size_t extra_start = ifd_off + 2 + fields.size() * 12 + 4;
  std::vector<std::uint8_t> extra;
  std::vector<std::uint8_t> ifd;
  put<std::uint16_t>(ifd, static_cast<std::uint16_t>(fields.size()));
  for (auto& f : fields) {
    put<std::uint16_t>(ifd, f.tag);
    put<std::uint16_t>(ifd, f.type);
    put<std::uint32_t>(ifd, f.count);
    if (f.payload.size() <= 4) {
      auto p = f.payload;
      p.resize(4, 0);
      ifd.insert(ifd.end(), p.begin(), p.end());
    } else {
      if (extra.size() % 2) extra.push_back(0);
      put<std::uint32_t>(ifd, static_cast<std::uint32_t>(extra_start + extra.size()));
      extra.insert(extra.end(), f.payload.begin(), f.payload.end());
    }
  }
  put<std::uint32_t>(ifd, 0);
  buf.insert(buf.end(), ifd.begin(), ifd.end());
  buf.insert(buf.end(), extra.begin(), extra.end());
  const auto off32 = static_cast<std::uint32_t>(ifd_off);
  std::vector<std::uint8_t> patch;
  put<std::uint32_t>(patch, off32);
  std::copy(patch.begin(), patch.end(), buf.begin() + 4);
  return buf;
}

template <class T>
void save_raster(const Raster<T>& grid, const std::filesystem::path& path) {
  const auto bytes = encode_geotiff(grid);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hydrovec
