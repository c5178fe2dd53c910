#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hydrovec;

namespace {

const GeoRef kGeo{0, 0, 1};

Mask grid(std::initializer_list<std::initializer_list<int>> rows) {
  Mask m(rows.size(), rows.begin()->size(), kGeo, 0);
  std::size_t i = 0;
  for (const auto& row : rows)
    for (int v : row) m[i++] = static_cast<std::uint8_t>(v);
  return m;
}

Raster<double> flat(const Mask& m) { return Raster<double>(m.rows(), m.cols(), kGeo, 0.0); }

Mask none(const Mask& m) { return Mask(m.rows(), m.cols(), kGeo, 0); }

CellClass to_lib(oracle::Class c) {
  switch (c) {
    case oracle::Class::skeleton: return CellClass::skeleton;
    case oracle::Class::interior: return CellClass::interior;
    default: return CellClass::removable;
  }
}

}  // namespace

TEST(Classify, Examples) {
  const auto single = grid({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  EXPECT_EQ(classify_cell(single, none(single), 4), CellClass::skeleton);
  const auto full = grid({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  EXPECT_EQ(classify_cell(full, none(full), 4), CellClass::interior);
  const auto square = grid({{1, 1}, {1, 1}});
  EXPECT_EQ(classify_cell(square, none(square), 0), CellClass::removable);
  const auto bridge = grid({{1, 1, 1}});
  EXPECT_EQ(classify_cell(bridge, none(bridge), 1), CellClass::skeleton);
  EXPECT_EQ(classify_cell(bridge, none(bridge), 0), CellClass::skeleton);
  auto ref = none(square);
  ref[0] = 1;
  EXPECT_EQ(classify_cell(square, ref, 0), CellClass::skeleton);
  EXPECT_THROW(classify_cell(single, none(single), 0), InputError);
}

TEST(Classify, AgreesWithVerbalDefinitionOnAllNeighborhoods) {
  for (int code = 0; code < 256; ++code) {
    Mask m(3, 3, kGeo, 0);
    m[4] = 1;
    for (int k = 0; k < 8; ++k)
      if (code & (1 << k)) m(static_cast<std::size_t>(1 + kNeighborDr[k]), static_cast<std::size_t>(1 + kNeighborDc[k])) = 1;
    // Embed in a larger land grid so the border does not interfere.
    Mask big(5, 5, kGeo, 0);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) big(r + 1, c + 1) = m(r, c);
    ASSERT_EQ(classify_cell(big, none(big), 12), to_lib(oracle::classify(big, none(big), 12))) << "code " << code;
  }
}

TEST(Thin, SmallExamples) {
  const auto single = grid({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  EXPECT_EQ(thin(single, flat(single), none(single)), single);
  const auto line = grid({{1, 1, 1}});
  EXPECT_EQ(thin(line, flat(line), none(line)), line);
  const auto square = grid({{1, 1}, {1, 1}});
  const auto out = thin(square, flat(square), none(square));
  EXPECT_EQ(oracle::component_count(out), 1);
  int left = 0;
  for (auto v : out.values()) left += v;
  EXPECT_EQ(left, 2);
}

TEST(Thin, KeepsLowSideOfWideChannel) {
  auto m = grid({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  Raster<double> e(4, 2, kGeo, 0.0);
  for (std::size_t r = 0; r < 4; ++r) e(r, 1) = 10.0;
  const auto want = grid({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
  EXPECT_EQ(thin(m, e, none(m)), want);
  EXPECT_EQ(oracle::thin_pseudocode(m, e, none(m)), want);
}

TEST(Thin, KeepsReferenceCells) {
  auto m = grid({{1, 1, 1}, {1, 1, 1}});
  auto ref = none(m);
  ref[0] = ref[1] = ref[2] = 1;
  const auto out = thin(m, flat(m), ref);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i], 1);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_EQ(out[i], 0);
}

TEST(Thin, PreservesHoles) {
  // Corners go; the diamond that remains still encloses the center.
  const auto ring = grid({{1, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  const auto out = thin(ring, flat(ring), none(ring));
  EXPECT_EQ(out, grid({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(oracle::enclosed_land_regions(out), 1);
}

namespace {

/// The four thinning properties; returns an empty string when all hold.
std::string check_thinning(const Mask& in, const Mask& out, const Raster<double>& e, const Mask& ref) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (out[i] != 0 && in[i] == 0 && ref[i] == 0) return "added a cell";
    if (ref[i] != 0 && out[i] == 0) return "lost a reference cell";
  }
  Mask base = in;
  for (std::size_t i = 0; i < in.size(); ++i) base[i] = (in[i] != 0 || ref[i] != 0) ? 1 : 0;
  if (oracle::component_count(base) != oracle::component_count(out)) return "component count changed";
  if (oracle::enclosed_land_regions(base) != oracle::enclosed_land_regions(out)) return "holes changed";
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != 0 && oracle::classify(out, ref, i) == oracle::Class::removable) return "removable cell left";
  if (!(thin(out, e, ref) == out)) return "not idempotent";
  return {};
}

}  // namespace

TEST(Thin, PropertiesOnRandomMasks) {
  std::mt19937 rng(23);
  std::uniform_int_distribution<std::size_t> dim(1, 20);
  std::uniform_real_distribution<double> dens(0.3, 0.9);
  std::uniform_int_distribution<int> elev(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_mask(rng, dim(rng), dim(rng), dens(rng));
    Raster<double> e(m.rows(), m.cols(), m.geo());
    for (auto& v : e.values()) v = elev(rng);
    auto ref = oracle::random_mask(rng, m.rows(), m.cols(), 0.03);
    const auto out = thin(m, e, ref);
    ASSERT_EQ(check_thinning(m, out, e, ref), "") << "trial " << trial;
  }
}
