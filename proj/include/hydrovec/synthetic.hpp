#pragma once

// Synthetic basin fixture: a south-draining valley with one reference trunk
// line, branching tributary ridges in the probability surface (with gaps the
// connector has to bridge), NRGB bytes, a small lake and a truth mask.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hydrovec/connector.hpp"
#include "hydrovec/geojson.hpp"
#include "hydrovec/geometry.hpp"
#include "hydrovec/geotiff.hpp"
#include "hydrovec/raster.hpp"

namespace hydrovec {

struct SyntheticBasin {
  FloatRaster probability;
  Raster<double> elevation;
  std::array<Mask, 4> nrgb;
  Mask truth;
  Polygon basin;
  Polygon lake;
  Polyline trunk;
  /// Stored stream order of the trunk.
  int trunk_order = 2;
};

namespace synthetic_detail {

struct Branch {
  // Endpoints in (row, col) cell units; the branch runs a -> b.
  double ar, ac, br, bc;
  // Fraction [gap_lo, gap_hi] along the branch where the ridge is weak.
  double gap_lo, gap_hi;
};

inline double distance_along(double r, double c, const Branch& b, double& t) {
  const double dr = b.br - b.ar;
  const double dc = b.bc - b.ac;
  const double len2 = dr * dr + dc * dc;
  t = len2 > 0 ? std::clamp(((r - b.ar) * dr + (c - b.ac) * dc) / len2, 0.0, 1.0) : 0.0;
  const double pr = b.ar + t * dr - r;
  const double pc = b.ac + t * dc - c;
  return std::sqrt(pr * pr + pc * pc);
}

}  // namespace synthetic_detail

inline SyntheticBasin make_synthetic_basin(std::size_t size = 256, std::uint32_t seed = 7) {
  using synthetic_detail::Branch;
  if (size < 64) throw InputError("synthetic basin needs at least 64 cells per side");
  const double cs = 0.0002;
  const GeoRef geo{10.0, 45.0, cs};
  const double n = static_cast<double>(size);
  const double trunk_col = std::floor(n / 2.0);

  SyntheticBasin s;
  s.probability = FloatRaster(size, size, geo, 0.0F);
  s.elevation = Raster<double>(size, size, geo, 0.0);
  s.truth = Mask(size, size, geo, 0);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);

  // Tributaries alternate sides, each entering the trunk downslope of its
  // head, with one sub-branch joining halfway.
  std::vector<Branch> branches;
  const int count = 6;
  for (int k = 0; k < count; ++k) {
    const double side = k % 2 == 0 ? -1.0 : 1.0;
    const double head_r = n * (0.08 + 0.13 * k) + 4.0 * jitter(rng);
    const double head_c = trunk_col + side * n * (0.30 + 0.1 * jitter(rng));
    const double mouth_r = std::min(n - 12.0, head_r + n * 0.18);
    const double lo = 0.35 + 0.2 * jitter(rng);
    branches.push_back({head_r, head_c, mouth_r, trunk_col, lo, lo + 0.06});
    const double mid_r = (head_r + mouth_r) / 2.0;
    const double mid_c = (head_c + trunk_col) / 2.0;
    branches.push_back({mid_r - n * 0.1, mid_c + side * n * 0.02, mid_r, mid_c, 0.0, 0.0});
  }
  // A high-probability blob near the south-west corner, outside the basin.
  const double blob_r = n - 6.0;
  const double blob_c = 4.0;

  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c) {
      const double rr = static_cast<double>(r);
      const double cc = static_cast<double>(c);
      s.elevation(r, c) = 200.0 - 0.5 * rr + 0.3 * std::abs(cc - trunk_col) + 0.05 * jitter(rng);
      double p = 0.02 + 0.04 * jitter(rng);
      for (const auto& b : branches) {
        double t = 0.0;
        const double d = synthetic_detail::distance_along(rr, cc, b, t);
        double ridge = 0.95 * std::exp(-d * d / (2.0 * 1.3 * 1.3));
        if (t >= b.gap_lo && t <= b.gap_hi && b.gap_hi > b.gap_lo) ridge *= 0.4;
        // Leave the last few cells before the trunk weak as well.
        if (t > 1.0 - 4.0 / std::max(1.0, std::hypot(b.br - b.ar, b.bc - b.ac)) && b.bc == trunk_col) ridge *= 0.4;
        p = std::max(p, ridge);
        if (d <= 0.5) s.truth(r, c) = 1;
      }
      const double db = std::hypot(rr - blob_r, cc - blob_c);
      if (db < 2.5) p = std::max(p, 0.9);
      if (std::abs(cc - trunk_col) < 0.5) s.truth(r, c) = 1;
      s.probability(r, c) = static_cast<float>(std::clamp(p, 0.0, 1.0));
    }

  for (auto& band : s.nrgb) band = Mask(size, size, geo, 0);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c) {
      const double p = s.probability(r, c);
      s.nrgb[0](r, c) = static_cast<std::uint8_t>(std::lround(200.0 - 150.0 * p));
      s.nrgb[1](r, c) = static_cast<std::uint8_t>(std::lround(60.0 + 20.0 * p));
      s.nrgb[2](r, c) = static_cast<std::uint8_t>(std::lround(80.0 + 60.0 * p));
      s.nrgb[3](r, c) = static_cast<std::uint8_t>(std::lround(70.0 + 40.0 * p));
    }

  auto at = [&](double row, double col) { return LonLat{geo.origin_lon + col * cs, geo.origin_lat - row * cs}; };
  const double inset = 8.0;
  s.basin.outer = {at(inset, inset), at(inset, n - inset), at(n - inset, n - inset), at(n - inset, inset),
                   at(inset, inset)};
  // Cell centers of the trunk column, north to south (downstream).
  s.trunk = {at(0.5, trunk_col + 0.5), at(n - 0.5, trunk_col + 0.5)};
  // A small lake across the head of the first tributary.
  const auto& b0 = branches.front();
  s.lake.outer = {at(b0.ar - 3, b0.ac - 3), at(b0.ar - 3, b0.ac + 3), at(b0.ar + 3, b0.ac + 3),
                  at(b0.ar + 3, b0.ac - 3), at(b0.ar - 3, b0.ac - 3)};
  return s;
}

/// Writes the fixture's inputs and a one-basin manifest.json into `dir`.
inline std::filesystem::path write_synthetic_basin(const SyntheticBasin& s, const std::filesystem::path& dir,
                                                   const std::string& id = "synthetic") {
  std::filesystem::create_directories(dir);
  save_raster(s.probability, dir / "prob.tif");
  save_raster(s.elevation, dir / "dem.tif");
  const char* names[4] = {"n.tif", "r.tif", "g.tif", "b.tif"};
  for (int k = 0; k < 4; ++k) save_raster(s.nrgb[static_cast<std::size_t>(k)], dir / names[k]);
  save_raster(s.truth, dir / "truth.tif");
  write_json_file(feature_collection({polygon_feature(s.basin, {{"id", 1}})}), dir / "basin.geojson");
  write_json_file(feature_collection({polygon_feature(s.lake, {{"id", 1}})}), dir / "lakes.geojson");
  write_json_file(feature_collection({line_feature(s.trunk, {{"id", 1}, {"strahler", s.trunk_order}})}),
                  dir / "reference.geojson");
  json basin = {{"id", id},
                {"prob", "prob.tif"},
                {"dem", "dem.tif"},
                {"basin", "basin.geojson"},
                {"reference", "reference.geojson"},
                {"nrgb", json::array({"n.tif", "r.tif", "g.tif", "b.tif"})},
                {"lakes", "lakes.geojson"},
                {"truth", "truth.tif"}};
  const json manifest = {{"basins", json::array({std::move(basin)})}};
  const auto path = dir / "manifest.json";
  write_json_file(manifest, path);
  return path;
}

}  // namespace hydrovec
