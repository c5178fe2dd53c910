#pragma once

// Planar lon/lat geometry helpers. Distances here are in degrees unless the
// function name says otherwise; haversine_km is the only great-circle routine.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace hydrovec {

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const LonLat&, const LonLat&) = default;
};

using Polyline = std::vector<LonLat>;

/// A polygon as an outer ring plus optional holes. Rings may be open or
/// closed (first == last); both are handled.
struct Polygon {
  std::vector<LonLat> outer;
  std::vector<std::vector<LonLat>> holes;
};

struct BoundingBox {
  double min_lon = std::numeric_limits<double>::infinity();
  double min_lat = std::numeric_limits<double>::infinity();
  double max_lon = -std::numeric_limits<double>::infinity();
  double max_lat = -std::numeric_limits<double>::infinity();

  [[nodiscard]] bool empty() const { return min_lon > max_lon || min_lat > max_lat; }

  void extend(const LonLat& p) {
    min_lon = std::min(min_lon, p.lon);
    min_lat = std::min(min_lat, p.lat);
    max_lon = std::max(max_lon, p.lon);
    max_lat = std::max(max_lat, p.lat);
  }

  [[nodiscard]] BoundingBox buffered(double d) const {
    return {min_lon - d, min_lat - d, max_lon + d, max_lat + d};
  }

  [[nodiscard]] bool intersects(const BoundingBox& o) const {
    return !(o.min_lon > max_lon || o.max_lon < min_lon || o.min_lat > max_lat ||
             o.max_lat < min_lat);
  }
};

inline BoundingBox bounds_of(std::span<const LonLat> pts) {
  BoundingBox b;
  for (const auto& p : pts) b.extend(p);
  return b;
}

inline BoundingBox bounds_of(const Polygon& poly) { return bounds_of(poly.outer); }

inline constexpr double kEarthRadiusKm = 6371.0088;

inline double haversine_km(const LonLat& a, const LonLat& b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = a.lat * deg;
  const double phi2 = b.lat * deg;
  const double dphi = (b.lat - a.lat) * deg;
  const double dlam = (b.lon - a.lon) * deg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double polyline_length_km(std::span<const LonLat> line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) total += haversine_km(line[i - 1], line[i]);
  return total;
}

/// Euclidean distance (degrees) from p to the closed segment [a, b].
inline double point_segment_distance(const LonLat& p, const LonLat& a, const LonLat& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2, 0.0, 1.0);
  const double qx = a.lon + t * dx - p.lon;
  const double qy = a.lat + t * dy - p.lat;
  return std::hypot(qx, qy);
}

inline double point_polyline_distance(const LonLat& p, std::span<const LonLat> line) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return std::hypot(p.lon - line[0].lon, p.lat - line[0].lat);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < line.size(); ++i)
    best = std::min(best, point_segment_distance(p, line[i - 1], line[i]));
  return best;
}

namespace detail {

inline bool in_ring(const LonLat& p, std::span<const LonLat> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

inline double cross(const LonLat& o, const LonLat& a, const LonLat& b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

inline bool on_segment(const LonLat& p, const LonLat& a, const LonLat& b) {
  return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
         std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

}  // namespace detail

/// Even-odd point in polygon test honoring holes. Boundary points are
/// resolved by the crossing rule (not guaranteed either way).
inline bool contains(const Polygon& poly, const LonLat& p) {
  if (!detail::in_ring(p, poly.outer)) return false;
  for (const auto& h : poly.holes)
    if (detail::in_ring(p, h)) return false;
  return true;
}

/// Closed segment intersection, including collinear overlap.
inline bool segments_intersect(const LonLat& p1, const LonLat& p2, const LonLat& q1,
                               const LonLat& q2) {
  const double d1 = detail::cross(q1, q2, p1);
  const double d2 = detail::cross(q1, q2, p2);
  const double d3 = detail::cross(p1, p2, q1);
  const double d4 = detail::cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && detail::on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && detail::on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && detail::on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && detail::on_segment(q2, p1, p2)) return true;
  return false;
}

/// True when any part of the polyline lies inside or on the polygon.
inline bool polyline_intersects_polygon(std::span<const LonLat> line, const Polygon& poly) {
  if (line.empty()) return false;
  for (const auto& p : line)
    if (contains(poly, p)) return true;
  auto crosses_ring = [&](std::span<const LonLat> ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 1; i < line.size(); ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (segments_intersect(line[i - 1], line[i], ring[k], ring[(k + 1) % n])) return true;
    return false;
  };
  if (crosses_ring(poly.outer)) return true;
  for (const auto& h : poly.holes)
    if (crosses_ring(h)) return true;
  return false;
}

/// Liang-Barsky test of a segment against a closed axis-aligned box.
inline bool segment_intersects_box(const LonLat& a, const LonLat& b, double min_x, double min_y,
                                   double max_x, double max_y) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.lon - min_x, max_x - a.lon, a.lat - min_y, max_y - a.lat};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
  }
  return t0 <= t1;
}

}  // namespace hydrovec
