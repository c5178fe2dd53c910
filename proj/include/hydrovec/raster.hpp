#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hydrovec/error.hpp"
#include "hydrovec/geometry.hpp"

namespace hydrovec {

/// Placement of a north-up grid in EPSG:4326. The origin is the outer
/// (west, north) corner of cell (0, 0); rows run south.
struct GeoRef {
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  double cell_size = 1.0;

  friend bool operator==(const GeoRef&, const GeoRef&) = default;
};

inline constexpr double kGeorefTolerance = 1e-12;

inline bool near_same(const GeoRef& a, const GeoRef& b) {
  return std::abs(a.origin_lon - b.origin_lon) <= kGeorefTolerance &&
         std::abs(a.origin_lat - b.origin_lat) <= kGeorefTolerance &&
         std::abs(a.cell_size - b.cell_size) <= kGeorefTolerance;
}

struct Cell {
  std::ptrdiff_t row = 0;
  std::ptrdiff_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Offsets of the 8-neighborhood, 4-neighbors first (N, W, E, S), then the
/// diagonals (NW, NE, SW, SE).
inline constexpr std::ptrdiff_t kNeighborDr[8] = {-1, 0, 0, 1, -1, -1, 1, 1};
inline constexpr std::ptrdiff_t kNeighborDc[8] = {0, -1, 1, 0, -1, 1, -1, 1};

/// Dense row-major georeferenced grid with an optional per-cell nodata mask.
template <class T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(std::size_t rows, std::size_t cols, GeoRef geo = {}, T fill = T{})
      : rows_(rows), cols_(cols), geo_(geo) {
    if (rows == 0 || cols == 0) throw InputError("empty raster");
    if (!(geo.cell_size > 0.0) || !std::isfinite(geo.cell_size))
      throw InputError("cell size must be positive");
    values_.assign(rows * cols, fill);
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] const GeoRef& geo() const { return geo_; }

  [[nodiscard]] std::size_t index(std::size_t r, std::size_t c) const { return r * cols_ + c; }
  [[nodiscard]] Cell cell_of(std::size_t idx) const {
    return {static_cast<std::ptrdiff_t>(idx / cols_), static_cast<std::ptrdiff_t>(idx % cols_)};
  }
  [[nodiscard]] bool in_bounds(std::ptrdiff_t r, std::ptrdiff_t c) const {
    return r >= 0 && c >= 0 && r < static_cast<std::ptrdiff_t>(rows_) &&
           c < static_cast<std::ptrdiff_t>(cols_);
  }

  T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  T& operator[](std::size_t idx) { return values_[idx]; }
  const T& operator[](std::size_t idx) const { return values_[idx]; }

  [[nodiscard]] std::span<T> values() { return values_; }
  [[nodiscard]] std::span<const T> values() const { return values_; }

  [[nodiscard]] bool has_nodata() const { return !nodata_.empty(); }
  [[nodiscard]] bool is_nodata(std::size_t idx) const { return !nodata_.empty() && nodata_[idx]; }
  [[nodiscard]] bool valid(std::size_t idx) const { return !is_nodata(idx); }
  void set_nodata(std::size_t idx, bool flag = true) {
    if (nodata_.empty()) {
      if (!flag) return;
      nodata_.assign(values_.size(), 0);
    }
    nodata_[idx] = flag ? 1 : 0;
  }
  void clear_nodata() { nodata_.clear(); }
  [[nodiscard]] std::span<const std::uint8_t> nodata_mask() const { return nodata_; }

  /// Value written for nodata cells when the grid is saved.
  [[nodiscard]] const std::optional<T>& nodata_value() const { return nodata_value_; }
  void set_nodata_value(std::optional<T> v) { nodata_value_ = std::move(v); }

  [[nodiscard]] LonLat cell_center(std::size_t r, std::size_t c) const {
    return {geo_.origin_lon + (static_cast<double>(c) + 0.5) * geo_.cell_size,
            geo_.origin_lat - (static_cast<double>(r) + 0.5) * geo_.cell_size};
  }

  [[nodiscard]] BoundingBox extent() const {
    return {geo_.origin_lon, geo_.origin_lat - static_cast<double>(rows_) * geo_.cell_size,
            geo_.origin_lon + static_cast<double>(cols_) * geo_.cell_size, geo_.origin_lat};
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    if (!(a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.geo_ == b.geo_)) return false;
    if (a.normalized_nodata() != b.normalized_nodata()) return false;
    // Values under nodata are not compared.
    for (std::size_t i = 0; i < a.values_.size(); ++i)
      if (a.valid(i) && !(a.values_[i] == b.values_[i])) return false;
    return true;
  }

 private:
  [[nodiscard]] std::vector<std::uint8_t> normalized_nodata() const {
    if (nodata_.empty()) return std::vector<std::uint8_t>(values_.size(), 0);
    return nodata_;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  GeoRef geo_{};
  std::vector<T> values_;
  std::vector<std::uint8_t> nodata_;
  std::optional<T> nodata_value_;
};

/// Boolean grids store 0/1 bytes.
using Mask = Raster<std::uint8_t>;
using FloatRaster = Raster<float>;
using LabelRaster = Raster<std::int32_t>;

template <class A, class B>
bool same_georef(const Raster<A>& a, const Raster<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && near_same(a.geo(), b.geo());
}

template <class A, class B>
void require_aligned(const Raster<A>& a, const Raster<B>& b) {
  if (a.empty() || b.empty()) throw InputError("empty raster");
  if (!same_georef(a, b))
    throw GeoreferenceMismatch(std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                               " vs " + std::to_string(b.rows()) + "x" +
                               std::to_string(b.cols()));
}

/// A blank grid sharing `like`'s georeferencing.
template <class T, class U>
Raster<T> make_like(const Raster<U>& like, T fill = T{}) {
  return Raster<T>(like.rows(), like.cols(), like.geo(), fill);
}

/// Sub-grid [row0, row0+rows) x [col0, col0+cols), including its nodata mask.
template <class T>
Raster<T> crop(const Raster<T>& src, std::size_t row0, std::size_t col0, std::size_t rows,
               std::size_t cols) {
  if (row0 + rows > src.rows() || col0 + cols > src.cols())
    throw InputError("crop window outside raster");
  GeoRef g = src.geo();
  g.origin_lon += static_cast<double>(col0) * g.cell_size;
  g.origin_lat -= static_cast<double>(row0) * g.cell_size;
  Raster<T> out(rows, cols, g);
  out.set_nodata_value(src.nodata_value());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = src.index(row0 + r, col0 + c);
      out(r, c) = src[s];
      if (src.is_nodata(s)) out.set_nodata(out.index(r, c));
    }
  return out;
}

/// Cell window of `src` covering the (buffered) box, clipped to the raster.
template <class T>
std::optional<std::pair<Cell, Cell>> window_for(const Raster<T>& src, const BoundingBox& box) {
  const auto& g = src.geo();
  const auto c0 = static_cast<std::ptrdiff_t>(std::floor((box.min_lon - g.origin_lon) / g.cell_size));
  const auto c1 = static_cast<std::ptrdiff_t>(std::ceil((box.max_lon - g.origin_lon) / g.cell_size));
  const auto r0 = static_cast<std::ptrdiff_t>(std::floor((g.origin_lat - box.max_lat) / g.cell_size));
  const auto r1 = static_cast<std::ptrdiff_t>(std::ceil((g.origin_lat - box.min_lat) / g.cell_size));
  const auto rr0 = std::max<std::ptrdiff_t>(0, r0);
  const auto cc0 = std::max<std::ptrdiff_t>(0, c0);
  const auto rr1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(src.rows()), r1);
  const auto cc1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(src.cols()), c1);
  if (rr1 <= rr0 || cc1 <= cc0) return std::nullopt;
  return std::pair{Cell{rr0, cc0}, Cell{rr1, cc1}};
}

/// Re-window `src` onto the grid of `target`. Both must share cell size and
/// the target origin must sit on a cell corner of `src` inside its extent.
template <class T, class U>
Raster<T> align_to(const Raster<T>& src, const Raster<U>& target) {
  if (same_georef(src, target)) return src;
  const auto& s = src.geo();
  const auto& t = target.geo();
  if (std::abs(s.cell_size - t.cell_size) > kGeorefTolerance * std::max(1.0, s.cell_size))
    throw GeoreferenceMismatch("cell size differs");
  const double fc = (t.origin_lon - s.origin_lon) / s.cell_size;
  const double fr = (s.origin_lat - t.origin_lat) / s.cell_size;
  const double rc = std::round(fc);
  const double rr = std::round(fr);
  if (std::abs(fc - rc) > 1e-6 || std::abs(fr - rr) > 1e-6 || rc < 0 || rr < 0)
    throw GeoreferenceMismatch("origin not on source grid");
  const auto col0 = static_cast<std::size_t>(rc);
  const auto row0 = static_cast<std::size_t>(rr);
  if (row0 + target.rows() > src.rows() || col0 + target.cols() > src.cols())
    throw GeoreferenceMismatch("target extends beyond source");
  Raster<T> out(target.rows(), target.cols(), t);
  out.set_nodata_value(src.nodata_value());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const std::size_t si = src.index(row0 + r, col0 + c);
      out(r, c) = src[si];
      if (src.is_nodata(si)) out.set_nodata(out.index(r, c));
    }
  return out;
}

}  // namespace hydrovec
