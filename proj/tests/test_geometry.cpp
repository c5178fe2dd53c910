#include <gtest/gtest.h>

#include <cmath>

#include "hydrovec/geojson.hpp"
#include "hydrovec/geometry.hpp"

using namespace hydrovec;

TEST(Geometry, HaversineAlongMeridian) {
  // Arc length of 0.01 degrees on a sphere of the mean Earth radius.
  const double want = kEarthRadiusKm * 0.01 * M_PI / 180.0;
  EXPECT_NEAR(haversine_km({0, 0}, {0, 0.01}), want, 1e-9);
  EXPECT_NEAR(want, 1.11195, 1e-5);
  const Polyline line = {{0, 0}, {0, 0.005}, {0, 0.01}};
  EXPECT_NEAR(polyline_length_km(line), want, 1e-9);
}

TEST(Geometry, PointSegmentDistance) {
  EXPECT_DOUBLE_EQ(point_segment_distance({1, 1}, {0, 0}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 0}, {0, 0}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({5, 5}, {1, 1}, {1, 1}), std::hypot(4, 4));
}

TEST(Geometry, PolygonWithHole) {
  Polygon p;
  p.outer = {{0, 0}, {10, 0}, {10, 10}, {0, 10}, {0, 0}};
  p.holes.push_back({{4, 4}, {6, 4}, {6, 6}, {4, 6}, {4, 4}});
  EXPECT_TRUE(contains(p, {1, 1}));
  EXPECT_FALSE(contains(p, {5, 5}));
  EXPECT_FALSE(contains(p, {11, 5}));
  const Polyline inside_hole = {{4.5, 5}, {5.5, 5}};
  EXPECT_FALSE(polyline_intersects_polygon(inside_hole, p));
  const Polyline crossing = {{-1, 5}, {1, 5}};
  EXPECT_TRUE(polyline_intersects_polygon(crossing, p));
  const Polyline through = {{-1, -1}, {11, 11}};
  EXPECT_TRUE(polyline_intersects_polygon(through, p));
}

TEST(Geometry, SegmentBox) {
  EXPECT_TRUE(segment_intersects_box({-1, 0.5}, {2, 0.5}, 0, 0, 1, 1));
  EXPECT_FALSE(segment_intersects_box({-1, 2}, {2, 2}, 0, 0, 1, 1));
  EXPECT_TRUE(segment_intersects_box({1, 1}, {2, 2}, 0, 0, 1, 1));
  EXPECT_TRUE(segment_intersects_box({0.5, 0.5}, {0.5, 0.5}, 0, 0, 1, 1));
}

TEST(GeoJson, ReadsLinesWithTopologyProperties) {
  const json doc = json::parse(R"({
    "type": "FeatureCollection",
    "features": [
      {"type": "Feature", "properties": {"LINKNO": 7, "DSLINKNO": 9, "strmOrder": 3},
       "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 1]]}},
      {"type": "Feature", "properties": {"id": 9, "target_id": -1},
       "geometry": {"type": "MultiLineString", "coordinates": [[[1, 1], [2, 2]], [[2, 2], [3, 2]]]}}
    ]})");
  const auto lines = parse_lines(doc);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].id, 7);
  EXPECT_EQ(lines[0].target_id, 9);
  EXPECT_EQ(lines[0].strahler, 3);
  EXPECT_EQ(lines[1].id, 9);
  EXPECT_FALSE(lines[1].target_id);
  EXPECT_EQ(lines[2].line.size(), 2u);
}

TEST(GeoJson, PolygonsRoundTrip) {
  Polygon p;
  p.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 0}};
  const auto doc = feature_collection({polygon_feature(p)});
  const auto back = parse_polygons(doc);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].outer.size(), 4u);
  EXPECT_THROW(parse_polygons(feature_collection({line_feature({{0, 0}, {1, 1}})})), FormatError);
}
