#pragma once

// Model input preparation: Sentinel-2 scene compositing, the byte
// radiometric transform, and the 10-channel feature stack.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "hydrovec/raster.hpp"

namespace hydrovec {

/// One candidate scene. Cells flagged nodata in `bytes` (missing or cloudy)
/// are the invalid ones.
struct Scene {
  Mask bytes;

  [[nodiscard]] double completeness() const {
    if (bytes.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) ok += bytes.valid(i) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(bytes.size());
  }
};

/// Scenes kept in descending completeness order. Equal completeness keeps
/// insertion order.
class SceneStack {
 public:
  SceneStack() = default;
  explicit SceneStack(std::vector<Scene> scenes) : scenes_(std::move(scenes)) {
    for (std::size_t i = 1; i < scenes_.size(); ++i) require_aligned(scenes_[0].bytes, scenes_[i].bytes);
    std::vector<double> score;
    score.reserve(scenes_.size());
    for (const auto& s : scenes_) score.push_back(s.completeness());
    std::vector<std::size_t> order(scenes_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    std::vector<Scene> sorted;
    sorted.reserve(scenes_.size());
    for (auto i : order) sorted.push_back(std::move(scenes_[i]));
    scenes_ = std::move(sorted);
  }

  [[nodiscard]] const std::vector<Scene>& scenes() const { return scenes_; }
  [[nodiscard]] bool empty() const { return scenes_.empty(); }

 private:
  std::vector<Scene> scenes_;
};

/// Each cell takes its value from the first of the `window` most complete
/// scenes that has valid data there; cells no windowed scene covers stay
/// nodata.
inline Mask composite_scenes(const SceneStack& stack, std::size_t window = 4) {
  if (stack.empty()) throw InputError("empty scene list");
  if (window == 0) throw InputError("composite window must be positive");
  const auto& scenes = stack.scenes();
  const std::size_t used = std::min(window, scenes.size());
  Mask out = make_like<std::uint8_t>(scenes[0].bytes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool filled = false;
    for (std::size_t s = 0; s < used && !filled; ++s) {
      if (scenes[s].bytes.valid(i)) {
        out[i] = scenes[s].bytes[i];
        filled = true;
      }
    }
    if (!filled) out.set_nodata(i);
  }
  return out;
}

/// 255 / (1 + e^(-0.6 x)), rounded half up and clamped to a byte.
inline std::uint8_t radiometric_transform(double x) {
  const double v = 255.0 / (1.0 + std::exp(-0.6 * x));
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// (a - b) / (a + b); zero with `degenerate` set when a + b == 0.
inline double normalized_difference(double a, double b, bool& degenerate) {
  const double den = a + b;
  degenerate = den == 0.0;
  return degenerate ? 0.0 : (a - b) / den;
}

enum class Channel : int {
  n_t = 0,
  r_t,
  g_t,
  b_t,
  ndvi,
  ndwi,
  elevation_shifted,
  elevation_dx,
  elevation_dy,
  elevation_gradient,
};

inline constexpr std::size_t kChannelCount = 10;

/// File stems used when a stack is written to disk, in channel order.
inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "00_n_t",  "01_r_t",  "02_g_t",  "03_b_t",  "04_ndvi",
    "05_ndwi", "06_elev_shifted", "07_elev_dx", "08_elev_dy", "09_elev_gradient"};

/// Bit flags in FeatureStack::degenerate marking a zero denominator.
inline constexpr std::uint8_t kNdviDegenerate = 1;
inline constexpr std::uint8_t kNdwiDegenerate = 2;

struct FeatureStack {
  std::array<Raster<double>, kChannelCount> channels;
  Mask degenerate;

  [[nodiscard]] const Raster<double>& operator[](Channel c) const {
    return channels[static_cast<std::size_t>(c)];
  }
};

struct NrgbBands {
  const Mask& n;
  const Mask& r;
  const Mask& g;
  const Mask& b;
};

namespace features_detail {

/// Central differences with edge replication: a missing neighbor (off-grid
/// or nodata) takes the center cell's value.
inline void elevation_deltas(const Raster<double>& e, Raster<double>& dx, Raster<double>& dy) {
  const auto rows = static_cast<std::ptrdiff_t>(e.rows());
  const auto cols = static_cast<std::ptrdiff_t>(e.cols());
  auto sample = [&](std::ptrdiff_t r, std::ptrdiff_t c, double center) {
    if (r < 0 || c < 0 || r >= rows || c >= cols) return center;
    const std::size_t i = e.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return e.valid(i) ? e[i] : center;
  };
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      const std::size_t i = e.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (!e.valid(i)) {
        dx.set_nodata(i);
        dy.set_nodata(i);
        continue;
      }
      const double center = e[i];
      dx[i] = (sample(r, c + 1, center) - sample(r, c - 1, center)) / 2.0;
      dy[i] = (sample(r + 1, c, center) - sample(r - 1, c, center)) / 2.0;
    }
}

}  // namespace features_detail

/// Builds the 10 model input channels from NRGB bytes and elevation.
template <class E>
FeatureStack compute_feature_stack(const NrgbBands& nrgb, const Raster<E>& elevation) {
  require_aligned(nrgb.n, nrgb.r);
  require_aligned(nrgb.n, nrgb.g);
  require_aligned(nrgb.n, nrgb.b);
  require_aligned(nrgb.n, elevation);

  FeatureStack st;
  for (auto& ch : st.channels) ch = make_like<double>(nrgb.n);
  st.degenerate = make_like<std::uint8_t>(nrgb.n);
  const std::size_t n = nrgb.n.size();

  const std::array<const Mask*, 4> bands = {&nrgb.n, &nrgb.r, &nrgb.g, &nrgb.b};
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = true;
    std::array<double, 4> scaled{};
    for (std::size_t k = 0; k < 4; ++k) {
      const Mask& band = *bands[k];
      if (!band.valid(i)) {
        ok = false;
        st.channels[k].set_nodata(i);
        continue;
      }
      scaled[k] = band[i] / 255.0;
      st.channels[k][i] = 2.0 * scaled[k] - 1.0;
    }
    auto& ndvi = st.channels[static_cast<std::size_t>(Channel::ndvi)];
    auto& ndwi = st.channels[static_cast<std::size_t>(Channel::ndwi)];
    if (!ok) {
      ndvi.set_nodata(i);
      ndwi.set_nodata(i);
      continue;
    }
    bool dv = false;
    bool dw = false;
    ndvi[i] = normalized_difference(scaled[0], scaled[1], dv);
    ndwi[i] = normalized_difference(scaled[2], scaled[0], dw);
    st.degenerate[i] = static_cast<std::uint8_t>((dv ? kNdviDegenerate : 0) | (dw ? kNdwiDegenerate : 0));
  }

  Raster<double> e = make_like<double>(elevation);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!elevation.valid(i) || !std::isfinite(static_cast<double>(elevation[i]))) {
      e.set_nodata(i);
      continue;
    }
    e[i] = static_cast<double>(elevation[i]);
    lowest = std::min(lowest, e[i]);
  }

  auto& shifted = st.channels[static_cast<std::size_t>(Channel::elevation_shifted)];
  auto& dx = st.channels[static_cast<std::size_t>(Channel::elevation_dx)];
  auto& dy = st.channels[static_cast<std::size_t>(Channel::elevation_dy)];
  auto& grad = st.channels[static_cast<std::size_t>(Channel::elevation_gradient)];
  for (std::size_t i = 0; i < n; ++i) {
    if (e.valid(i)) shifted[i] = e[i] - lowest;
    else shifted.set_nodata(i);
  }
  features_detail::elevation_deltas(e, dx, dy);
  for (std::size_t i = 0; i < n; ++i) {
    if (!e.valid(i)) {
      grad.set_nodata(i);
      continue;
    }
    grad[i] = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]);
  }
  return st;
}

}  // namespace hydrovec
