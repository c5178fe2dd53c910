#pragma once

// GeoJSON readers for the vector inputs: basin and lake polygons, reference
// and labeled waterway polylines.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydrovec/error.hpp"
#include "hydrovec/geometry.hpp"

namespace hydrovec {

using json = nlohmann::json;

/// A polyline feature with the optional topology attributes the reference
/// network may carry.
struct LineFeature {
  std::int64_t id = 0;
  Polyline line;
  std::optional<int> strahler;
  std::optional<std::int64_t> target_id;
  json properties = json::object();
};

namespace geojson_detail {

inline LonLat point(const json& c) {
  if (!c.is_array() || c.size() < 2) throw FormatError("bad GeoJSON position");
  return {c[0].get<double>(), c[1].get<double>()};
}

inline std::vector<LonLat> points(const json& arr) {
  std::vector<LonLat> out;
  out.reserve(arr.size());
  for (const auto& c : arr) out.push_back(point(c));
  return out;
}

inline Polygon polygon(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw FormatError("bad GeoJSON polygon");
  Polygon p;
  p.outer = points(rings[0]);
  for (std::size_t i = 1; i < rings.size(); ++i) p.holes.push_back(points(rings[i]));
  return p;
}

inline std::vector<json> features(const json& doc) {
  if (!doc.is_object()) throw FormatError("GeoJSON root must be an object");
  const std::string type = doc.value("type", "");
  if (type == "FeatureCollection") return doc.at("features").get<std::vector<json>>();
  if (type == "Feature") return {doc};
  // Bare geometry.
  return {json{{"type", "Feature"}, {"properties", json::object()}, {"geometry", doc}}};
}

template <class T>
std::optional<T> number_prop(const json& props, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = props.find(k);
    if (it != props.end() && it->is_number()) return it->get<T>();
  }
  return std::nullopt;
}

}  // namespace geojson_detail

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const json& doc, const std::filesystem::path& path, int indent = 2) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(indent) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<Polygon> parse_polygons(const json& doc) {
  std::vector<Polygon> out;
  for (const auto& f : geojson_detail::features(doc)) {
    const auto& g = f.at("geometry");
    if (g.is_null()) continue;
    const std::string type = g.value("type", "");
    if (type == "Polygon") {
      out.push_back(geojson_detail::polygon(g.at("coordinates")));
    } else if (type == "MultiPolygon") {
      for (const auto& p : g.at("coordinates")) out.push_back(geojson_detail::polygon(p));
    } else {
      throw FormatError("expected Polygon geometry, found " + type);
    }
  }
  return out;
}

inline std::vector<Polygon> read_polygons(const std::filesystem::path& path) {
  return parse_polygons(read_json_file(path));
}

/// Reads LineString / MultiLineString features. A MultiLineString yields one
/// LineFeature per part, all sharing the feature's id. Features without an
/// integer "id" property are numbered by position.
inline std::vector<LineFeature> parse_lines(const json& doc) {
  using geojson_detail::number_prop;
  std::vector<LineFeature> out;
  std::int64_t position = 0;
  for (const auto& f : geojson_detail::features(doc)) {
    const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"]
                                                                              : json::object();
    LineFeature base;
    base.properties = props;
    base.id = number_prop<std::int64_t>(props, {"id", "LINKNO"}).value_or(position);
    if (f.contains("id") && f["id"].is_number_integer() && !props.contains("id"))
      base.id = f["id"].get<std::int64_t>();
    base.strahler = number_prop<int>(props, {"strahler", "strmOrder"});
    auto target = number_prop<std::int64_t>(props, {"target_id", "DSLINKNO"});
    if (target && *target >= 0) base.target_id = target;
    ++position;
    const auto& g = f.at("geometry");
    if (g.is_null()) continue;
    const std::string type = g.value("type", "");
    if (type == "LineString") {
      base.line = geojson_detail::points(g.at("coordinates"));
      out.push_back(std::move(base));
    } else if (type == "MultiLineString") {
      for (const auto& part : g.at("coordinates")) {
        LineFeature lf = base;
        lf.line = geojson_detail::points(part);
        out.push_back(std::move(lf));
      }
    } else {
      throw FormatError("expected LineString geometry, found " + type);
    }
  }
  return out;
}

inline std::vector<LineFeature> read_lines(const std::filesystem::path& path) {
  return parse_lines(read_json_file(path));
}

inline json polygon_feature(const Polygon& p, json properties = json::object()) {
  auto ring = [](const std::vector<LonLat>& r) {
    json a = json::array();
    for (const auto& q : r) a.push_back({q.lon, q.lat});
    return a;
  };
  json rings = json::array({ring(p.outer)});
  for (const auto& h : p.holes) rings.push_back(ring(h));
  return {{"type", "Feature"},
          {"properties", std::move(properties)},
          {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}};
}

inline json line_feature(const Polyline& line, json properties = json::object()) {
  json coords = json::array();
  for (const auto& q : line) coords.push_back({q.lon, q.lat});
  if (line.size() == 1) coords.push_back({line[0].lon, line[0].lat});
  return {{"type", "Feature"},
          {"properties", std::move(properties)},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

inline json feature_collection(std::vector<json> features) {
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace hydrovec
