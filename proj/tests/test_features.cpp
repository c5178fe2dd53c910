#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hydrovec/features.hpp"

using namespace hydrovec;

namespace {

const GeoRef kGeo{0, 0, 1};

Mask bytes(std::size_t rows, std::size_t cols, std::uint8_t v) { return Mask(rows, cols, kGeo, v); }

Scene scene(std::size_t n, std::uint8_t v) { return Scene{bytes(1, n, v)}; }

}  // namespace

TEST(Composite, FirstValidScene) {
  auto a = scene(3, 10);
  a.bytes.set_nodata(1);
  auto b = scene(3, 42);
  b.bytes.set_nodata(0);
  b.bytes.set_nodata(2);
  const auto out = composite_scenes(SceneStack({a, b}));
  EXPECT_EQ(out[0], 10);
  EXPECT_EQ(out[1], 42);
  EXPECT_EQ(out[2], 10);
  EXPECT_TRUE(out.valid(1));
}

TEST(Composite, SingleSceneIsIdentity) {
  auto a = scene(4, 0);
  for (std::size_t i = 0; i < 4; ++i) a.bytes[i] = static_cast<std::uint8_t>(i * 7);
  const auto out = composite_scenes(SceneStack({a}));
  EXPECT_EQ(out, a.bytes);
}

TEST(Composite, WindowBoundsTheSearch) {
  std::vector<Scene> scenes;
  for (int k = 0; k < 4; ++k) {
    auto s = scene(2, static_cast<std::uint8_t>(k));
    s.bytes.set_nodata(0);
    scenes.push_back(s);
  }
  auto fifth = scene(2, 99);
  // Equal completeness keeps insertion order, so this stays fifth.
  fifth.bytes.set_nodata(1);
  scenes.push_back(fifth);
  const auto out = composite_scenes(SceneStack(scenes), 4);
  EXPECT_TRUE(out.is_nodata(0));
  EXPECT_EQ(composite_scenes(SceneStack(scenes), 5)[0], 99);
}

TEST(Composite, SortsByCompleteness) {
  auto sparse = scene(4, 1);
  sparse.bytes.set_nodata(0);
  sparse.bytes.set_nodata(1);
  auto full = scene(4, 2);
  const SceneStack st({sparse, full});
  EXPECT_EQ(st.scenes()[0].bytes[2], 2);
  EXPECT_THROW(composite_scenes(SceneStack{}), InputError);
}

TEST(Radiometric, KnownPoints) {
  EXPECT_EQ(radiometric_transform(0.0), 128);
  EXPECT_EQ(radiometric_transform(100.0), 255);
  EXPECT_EQ(radiometric_transform(-100.0), 0);
}

TEST(Radiometric, Monotone) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 20000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    ASSERT_LE(radiometric_transform(a), radiometric_transform(b));
  }
}

namespace {

struct Inputs {
  Mask n, r, g, b;
  Raster<double> e;
};

Inputs random_inputs(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_real_distribution<double> elev(-50, 3000);
  Inputs in{bytes(rows, cols, 0), bytes(rows, cols, 0), bytes(rows, cols, 0), bytes(rows, cols, 0),
            Raster<double>(rows, cols, kGeo)};
  for (std::size_t i = 0; i < rows * cols; ++i) {
    in.n[i] = static_cast<std::uint8_t>(byte(rng));
    in.r[i] = static_cast<std::uint8_t>(byte(rng));
    in.g[i] = static_cast<std::uint8_t>(byte(rng));
    in.b[i] = static_cast<std::uint8_t>(byte(rng));
    in.e[i] = elev(rng);
  }
  return in;
}

}  // namespace

TEST(FeatureStack, EndpointsOfTheFormulas) {
  auto n = bytes(1, 1, 255), r = bytes(1, 1, 0), g = bytes(1, 1, 0), b = bytes(1, 1, 0);
  Raster<double> e(1, 1, kGeo, 12.0);
  const auto st = compute_feature_stack(NrgbBands{n, r, g, b}, e);
  EXPECT_EQ(st[Channel::ndvi][0], 1.0);
  EXPECT_EQ(st[Channel::n_t][0], 1.0);
  EXPECT_EQ(st[Channel::r_t][0], -1.0);
  EXPECT_EQ(st[Channel::ndwi][0], -1.0);
  EXPECT_EQ(st.degenerate[0], 0);
}

TEST(FeatureStack, ZeroDenominatorsAreFlagged) {
  auto z = bytes(1, 1, 0);
  const auto st = compute_feature_stack(NrgbBands{z, z, z, z}, Raster<double>(1, 1, kGeo));
  EXPECT_EQ(st[Channel::ndvi][0], 0.0);
  EXPECT_EQ(st[Channel::ndwi][0], 0.0);
  EXPECT_EQ(st.degenerate[0], kNdviDegenerate | kNdwiDegenerate);
}

TEST(FeatureStack, FlatElevation) {
  auto m = bytes(4, 5, 90);
  const auto st = compute_feature_stack(NrgbBands{m, m, m, m}, Raster<double>(4, 5, kGeo, 321.5));
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(st[Channel::elevation_shifted][i], 0.0);
    EXPECT_EQ(st[Channel::elevation_dx][i], 0.0);
    EXPECT_EQ(st[Channel::elevation_dy][i], 0.0);
    EXPECT_EQ(st[Channel::elevation_gradient][i], 0.0);
  }
}

TEST(FeatureStack, CentralDifferenceAndBorderReplication) {
  auto m = bytes(1, 3, 90);
  Raster<double> e(1, 3, kGeo);
  e[0] = 0;
  e[1] = 10;
  e[2] = 20;
  const auto st = compute_feature_stack(NrgbBands{m, m, m, m}, e);
  EXPECT_EQ(st[Channel::elevation_dx][1], 10.0);
  // Missing left neighbor takes the center value: (10 - 0) / 2.
  EXPECT_EQ(st[Channel::elevation_dx][0], 5.0);
  EXPECT_EQ(st[Channel::elevation_dx][2], 5.0);
  EXPECT_EQ(st[Channel::elevation_dy][1], 0.0);
  EXPECT_EQ(st[Channel::elevation_shifted][2], 20.0);
}

TEST(FeatureStack, NodataPropagates) {
  auto m = bytes(1, 3, 90);
  auto n = m;
  n.set_nodata(0);
  Raster<double> e(1, 3, kGeo, 1.0);
  e.set_nodata(2);
  const auto st = compute_feature_stack(NrgbBands{n, m, m, m}, e);
  EXPECT_TRUE(st[Channel::n_t].is_nodata(0));
  EXPECT_TRUE(st[Channel::ndvi].is_nodata(0));
  EXPECT_TRUE(st[Channel::r_t].valid(0));
  EXPECT_TRUE(st[Channel::elevation_gradient].is_nodata(2));
  EXPECT_EQ(st[Channel::elevation_dx][1], 0.0);
}

TEST(FeatureStack, Invariants) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = random_inputs(rng, 9, 11);
    const auto st = compute_feature_stack(NrgbBands{in.n, in.r, in.g, in.b}, in.e);
    for (std::size_t i = 0; i < in.n.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        ASSERT_GE(st.channels[k][i], -1.0);
        ASSERT_LE(st.channels[k][i], 1.0);
      }
      ASSERT_GE(st[Channel::ndvi][i], -1.0);
      ASSERT_LE(st[Channel::ndvi][i], 1.0);
      ASSERT_GE(st[Channel::ndwi][i], -1.0);
      ASSERT_LE(st[Channel::ndwi][i], 1.0);
      ASSERT_GE(st[Channel::elevation_shifted][i], 0.0);
      const double dx = st[Channel::elevation_dx][i], dy = st[Channel::elevation_dy][i];
      const double g = st[Channel::elevation_gradient][i];
      ASSERT_GE(g, 0.0);
      ASSERT_NEAR(g * g, dx * dx + dy * dy, 1e-6 * std::max(1.0, dx * dx + dy * dy));
    }
  }
}

TEST(FeatureStack, ShiftInvariance) {
  std::mt19937 rng(4);
  auto in = random_inputs(rng, 8, 8);
  auto shifted = in.e;
  // A power of two keeps the sums exact.
  for (auto& v : shifted.values()) v = std::round(v) + 1024.0;
  for (auto& v : in.e.values()) v = std::round(v);
  const auto a = compute_feature_stack(NrgbBands{in.n, in.r, in.g, in.b}, in.e);
  const auto b = compute_feature_stack(NrgbBands{in.n, in.r, in.g, in.b}, shifted);
  for (auto c : {Channel::elevation_shifted, Channel::elevation_dx, Channel::elevation_dy,
                 Channel::elevation_gradient})
    for (std::size_t i = 0; i < 64; ++i) ASSERT_EQ(a[c][i], b[c][i]);
}

TEST(FeatureStack, RatioAndSwapProperties) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_real_distribution<double> k(0.1, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double n = u(rng), r = u(rng), g = u(rng), s = k(rng);
    bool d = false;
    ASSERT_NEAR(normalized_difference(n, r, d), normalized_difference(s * n, s * r, d), 1e-12);
    ASSERT_NEAR(normalized_difference(g, n, d), normalized_difference(s * g, s * n, d), 1e-12);
  }
  // Swapping N and G negates NDWI.
  auto in = random_inputs(rng, 6, 6);
  const auto a = compute_feature_stack(NrgbBands{in.n, in.r, in.g, in.b}, in.e);
  const auto b = compute_feature_stack(NrgbBands{in.g, in.r, in.n, in.b}, in.e);
  for (std::size_t i = 0; i < 36; ++i)
    if (in.n[i] + in.g[i] > 0) ASSERT_EQ(a[Channel::ndwi][i], -b[Channel::ndwi][i]);
}

TEST(FeatureStack, MisalignedInputs) {
  auto m = bytes(2, 2, 1);
  EXPECT_THROW(compute_feature_stack(NrgbBands{m, m, m, m}, Raster<double>(2, 3, kGeo)), GeoreferenceMismatch);
}
