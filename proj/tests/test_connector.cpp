#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hydrovec;

namespace {

const GeoRef kGeo{0, 1, 1};

BasinTile strip(std::vector<float> prob, std::vector<std::uint8_t> ref) {
  const std::size_t n = prob.size();
  BasinTile t;
  t.probability = FloatRaster(1, n, kGeo);
  t.elevation = FloatRaster(1, n, kGeo, 10.0F);
  t.reference_mask = Mask(1, n, kGeo, 0);
  t.inside_basin = Mask(1, n, kGeo, 1);
  for (std::size_t i = 0; i < n; ++i) {
    t.probability[i] = prob[i];
    t.reference_mask[i] = ref[i];
  }
  return t;
}

}  // namespace

TEST(EdgeWeight, Rescale) {
  EXPECT_EQ(rescale_probability(0.05), 0.0);
  EXPECT_EQ(rescale_probability(0.1), 0.0);
  EXPECT_DOUBLE_EQ(rescale_probability(0.3), 0.5);
  EXPECT_EQ(rescale_probability(0.5), 1.0);
  EXPECT_EQ(rescale_probability(0.9), 1.0);
}

TEST(EdgeWeight, Examples) {
  EXPECT_EQ(edge_weight(0.5, 10, 9), 1.0);
  EXPECT_EQ(edge_weight(1.0, 10, 10), 0.0);
  EXPECT_EQ(edge_weight(0.25, 0, 3), 6.0);
  EXPECT_EQ(edge_weight(1.0, 0, 2), 2.0);
  EXPECT_EQ(edge_weight(0.25, 0, 3, {0.1, 0.5, 2.0}), 12.0);
  EXPECT_EQ(edge_weight(kReferenceEpsilon, 5, 5), 20.0);
  EXPECT_THROW(edge_weight(0.0, 0, 0), InputError);
}

TEST(EdgeWeight, NonNegativeAndMonotone) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> s(1e-6, 1.0), e(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    const double a = s(rng), b = s(rng), e0 = e(rng), e1 = e(rng);
    const double w = edge_weight(a, e0, e1);
    ASSERT_GE(w, 0.0);
    ASSERT_GE(w, std::max(0.0, e1 - e0));
    if (a <= b) ASSERT_GE(w, edge_weight(b, e0, e1));
  }
}

TEST(Schedule, Budgets) {
  SearchSchedule s;
  EXPECT_EQ(s.budget(0), 64.0);
  EXPECT_EQ(s.budget(6), 4096.0);
  EXPECT_THROW((SearchSchedule{0.0, 1}.validate()), InputError);
}

TEST(Prune, ForeignComponents) {
  Mask m(1, 4, kGeo, 1);
  Raster<double> e(1, 4, kGeo);
  for (std::size_t i = 0; i < 4; ++i) e[i] = 10.0 - static_cast<double>(i);
  const auto labels = label_components(m, e);
  Mask inside(1, 4, kGeo, 0);
  inside[0] = 1;
  EXPECT_EQ(prune_foreign_components(labels, inside), std::vector<std::int32_t>{1});
  inside[1] = 1;  // exactly half outside
  EXPECT_TRUE(prune_foreign_components(labels, inside).empty());
  inside = Mask(1, 4, kGeo, 0);
  inside[3] = 1;  // lowest cell inside
  EXPECT_TRUE(prune_foreign_components(labels, inside).empty());
}

TEST(Connect, StripThroughWeakCells) {
  // Reference at col 0 (model score 0), weak cells at cols 1-2, component at 3-4.
  const auto t = strip({0.0F, 0.3F, 0.3F, 0.9F, 0.9F}, {1, 0, 0, 0, 0});
  const auto res = connect_components(t);
  ASSERT_EQ(res.events.size(), 1u);
  const auto& ev = res.events[0];
  EXPECT_EQ(ev.source, 3u);
  EXPECT_EQ(ev.iteration, 0);
  EXPECT_NEAR(ev.cost, 22.0, 1e-6);  // 0.3 is not exact in float
  EXPECT_EQ(ev.path, (std::vector<std::size_t>{3, 2, 1, 0}));
  EXPECT_EQ(res.added_path_cells, (std::vector<std::size_t>{2, 1}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(res.connected_mask[i], 1);
  EXPECT_TRUE(res.unreachable_component_ids.empty());
}

TEST(Connect, BudgetSchedule) {
  const auto t = strip({0.0F, 0.3F, 0.3F, 0.9F, 0.9F}, {1, 0, 0, 0, 0});
  const auto late = connect_components(t, {}, {8.0, 2});
  ASSERT_EQ(late.events.size(), 1u);
  EXPECT_EQ(late.events[0].iteration, 2);

  const auto none = connect_components(t, {}, {1.0, 0});
  EXPECT_TRUE(none.events.empty());
  EXPECT_EQ(none.unreachable_component_ids, std::vector<std::int32_t>{1});
  EXPECT_EQ(none.connected_mask[1], 0);
  EXPECT_EQ(none.connected_mask[3], 1);
}

TEST(Connect, AlreadyTouching) {
  const auto t = strip({0.0F, 0.9F, 0.9F, 0.0F}, {1, 0, 0, 0});
  const auto res = connect_components(t);
  EXPECT_TRUE(res.events.empty());
  EXPECT_EQ(res.initially_connected_ids, std::vector<std::int32_t>{1});
}

TEST(Connect, BlockedByUnusableCells) {
  const auto t = strip({0.9F, 0.05F, 0.9F}, {1, 0, 0});
  const auto res = connect_components(t);
  EXPECT_EQ(res.initially_connected_ids, std::vector<std::int32_t>{1});
  EXPECT_EQ(res.unreachable_component_ids, std::vector<std::int32_t>{2});
}

TEST(Connect, NeedsReference) {
  const auto t = strip({0.9F, 0.9F}, {0, 0});
  try {
    connect_components(t);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "no reference network in tile");
  }
}

TEST(Connect, PruneDropsNeighborBasinComponent) {
  auto t = strip({0.9F, 0.0F, 0.9F, 0.9F}, {1, 0, 0, 0});
  t.inside_basin[2] = 0;
  t.inside_basin[3] = 0;
  const auto res = connect_components(t);
  EXPECT_EQ(res.pruned_component_ids, std::vector<std::int32_t>{2});
  EXPECT_EQ(res.connected_mask[2], 0);
  EXPECT_EQ(res.connected_mask[3], 0);
}

TEST(Connect, TileFromBasinPolygon) {
  FloatRaster prob(20, 20, {0, 20, 1}, 0.0F);
  Raster<double> elev(20, 20, {0, 20, 1}, 1.0);
  Polygon basin;
  basin.outer = {{5, 5}, {10, 5}, {10, 10}, {5, 10}, {5, 5}};
  const std::vector<Polyline> ref = {{{7.5, 5.5}, {7.5, 9.5}}};
  const auto tile = make_basin_tile(prob, elev, {basin}, std::span<const Polyline>(ref), 1.0);
  EXPECT_GE(tile.probability.rows(), 5u);
  EXPECT_LE(tile.probability.rows(), 8u);
  std::size_t burned = 0, inside = 0;
  for (auto v : tile.reference_mask.values()) burned += v;
  for (auto v : tile.inside_basin.values()) inside += v;
  EXPECT_EQ(burned, 5u);
  EXPECT_EQ(inside, 25u);
}

TEST(Connect, MatchesOracleReplayOnRandomTiles) {
  std::mt19937 rng(17);
  const double bases[] = {1.0, 4.0, 64.0};
  int searches = 0, unreachable = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto t = oracle::random_tile(rng, 16);
    const EdgeWeightParams params{0.0, 1.0, trial % 2 == 0 ? 1.0 : 2.0};
    const SearchSchedule sched{bases[trial % 3], trial % 4};
    const auto res = connect_components(t, params, sched, 0.5);
    ASSERT_EQ(oracle::check_connection(t, params, sched, 0.5, res), "") << "trial " << trial;
    searches += static_cast<int>(res.events.size());
    unreachable += static_cast<int>(res.unreachable_component_ids.size());
  }
  EXPECT_GT(searches, 50);
  EXPECT_GT(unreachable, 0);
}
