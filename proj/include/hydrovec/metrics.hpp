#pragma once

// Pixel scores (standard, thickness-tolerant, mask-aware), nearest waterway
// type labels, and network length totals by origin and stream order.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hydrovec/components.hpp"
#include "hydrovec/error.hpp"
#include "hydrovec/fcodes.hpp"
#include "hydrovec/geojson.hpp"
#include "hydrovec/geometry.hpp"
#include "hydrovec/network.hpp"
#include "hydrovec/raster.hpp"

namespace hydrovec {

struct Scores {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};

/// Harmonic mean, 0 when p + r is 0.
inline double f1_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline Scores scores_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  Scores s;
  s.p = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.r = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = f1_score(s.p, s.r);
  return s;
}

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

struct EvalReport {
  Scores standard;
  Scores tolerant;
  Scores masked;
  ConfusionCounts counts;
  std::uint64_t ignored_star = 0;
  std::uint64_t masked_pixels = 0;

  [[nodiscard]] json to_json() const {
    auto s = [](const Scores& x) { return json{{"p", x.p}, {"r", x.r}, {"f1", x.f1}}; };
    return {{"standard", s(standard)},
            {"tolerant", s(tolerant)},
            {"masked", s(masked)},
            {"counts",
             {{"tp", counts.tp},
              {"fp", counts.fp},
              {"fn", counts.fn},
              {"tn", counts.tn},
              {"ignored_star", ignored_star},
              {"masked_pixels", masked_pixels}}}};
  }
};

namespace metrics_detail {

inline bool positive(const Mask& m, std::size_t i) { return m[i] != 0 && m.valid(i); }

}  // namespace metrics_detail

inline ConfusionCounts confusion(const Mask& pred, const Mask& truth) {
  require_aligned(pred, truth);
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = metrics_detail::positive(pred, i);
    const bool t = metrics_detail::positive(truth, i);
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline Scores pixel_metrics(const Mask& pred, const Mask& truth) {
  const auto c = confusion(pred, truth);
  return scores_from_counts(c.tp, c.fp, c.fn);
}

struct TolerantResult {
  Scores scores;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t ignored = 0;
};

/// Ignores every FP or FN pixel that has both a true-positive and a
/// true-negative neighbor. Neighbors outside the grid count as true negatives.
inline TolerantResult tolerant_counts(const Mask& pred, const Mask& truth,
                                      Connectivity adjacency = Connectivity::eight) {
  require_aligned(pred, truth);
  using metrics_detail::positive;
  const int k_max = neighbor_count(adjacency);
  TolerantResult out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = positive(pred, i);
    const bool t = positive(truth, i);
    if (p && t) {
      ++out.tp;
      continue;
    }
    if (p == t) continue;
    const auto cell = pred.cell_of(i);
    bool near_tp = false;
    bool near_tn = false;
    for (int k = 0; k < k_max; ++k) {
      const auto nr = cell.row + kNeighborDr[k];
      const auto nc = cell.col + kNeighborDc[k];
      if (!pred.in_bounds(nr, nc)) {
        near_tn = true;
        continue;
      }
      const auto ni = pred.index(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc));
      const bool np = positive(pred, ni);
      const bool nt = positive(truth, ni);
      near_tp = near_tp || (np && nt);
      near_tn = near_tn || (!np && !nt);
    }
    if (near_tp && near_tn) ++out.ignored;
    else if (p) ++out.fp;
    else ++out.fn;
  }
  out.scores = scores_from_counts(out.tp, out.fp, out.fn);
  return out;
}

inline Scores tolerant_metrics(const Mask& pred, const Mask& truth, Connectivity adjacency = Connectivity::eight) {
  return tolerant_counts(pred, truth, adjacency).scores;
}

/// Scores over the pixels whose fcode is not in `masked_codes`.
inline Scores masked_metrics(const Mask& pred, const Mask& truth, const LabelRaster& fcodes,
                             const std::set<std::int32_t>& masked_codes, std::uint64_t* masked_pixels = nullptr) {
  require_aligned(pred, truth);
  require_aligned(pred, fcodes);
  using metrics_detail::positive;
  std::uint64_t tp = 0, fp = 0, fn = 0, skipped = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (fcodes.valid(i) && masked_codes.count(fcodes[i]) != 0) {
      ++skipped;
      continue;
    }
    const bool p = positive(pred, i);
    const bool t = positive(truth, i);
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
  }
  if (masked_pixels) *masked_pixels = skipped;
  return scores_from_counts(tp, fp, fn);
}

/// All three score families. Without an fcode grid the mask-aware scores
/// equal the standard ones.
inline EvalReport evaluate(const Mask& pred, const Mask& truth, const LabelRaster* fcodes = nullptr,
                           const std::set<std::int32_t>& masked_codes = default_masked_fcodes(),
                           Connectivity adjacency = Connectivity::eight) {
  EvalReport rep;
  rep.counts = confusion(pred, truth);
  rep.standard = scores_from_counts(rep.counts.tp, rep.counts.fp, rep.counts.fn);
  const auto tol = tolerant_counts(pred, truth, adjacency);
  rep.tolerant = tol.scores;
  rep.ignored_star = tol.ignored;
  if (fcodes) rep.masked = masked_metrics(pred, truth, *fcodes, masked_codes, &rep.masked_pixels);
  else rep.masked = rep.standard;
  return rep;
}

/// An NHD polyline with its waterway description.
struct LabeledLine {
  std::int64_t id = 0;
  Polyline line;
  std::string description;
};

/// Labels from line features carrying an integer "fcode" (or "FCode")
/// property; a string "description" property wins when present.
inline std::vector<LabeledLine> labeled_lines(std::span<const LineFeature> features) {
  std::vector<LabeledLine> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    LabeledLine l{f.id, f.line, "Unknown"};
    const auto& p = f.properties;
    if (p.contains("description") && p["description"].is_string()) {
      l.description = p["description"].get<std::string>();
    } else {
      for (const char* key : {"fcode", "FCode", "FCODE"})
        if (p.contains(key) && p[key].is_number_integer()) {
          l.description = std::string(fcode_description(p[key].get<std::int32_t>()));
          break;
        }
    }
    out.push_back(std::move(l));
  }
  return out;
}

/// Description of the nearest line (planar lon/lat distance) within
/// `max_dist`, else "Unknown". Equal distances go to the lower feature id.
inline std::vector<std::string> nearest_type_label(std::span<const LonLat> points, std::span<const LabeledLine> lines,
                                                   double max_dist = 0.001) {
  const double bucket = max_dist > 0.0 ? max_dist : 1.0;
  auto key = [&](double v) { return static_cast<std::int64_t>(std::floor(v / bucket)); };
  auto pack = [](std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
  };
  struct Edge {
    LonLat a, b;
    std::size_t line;
  };
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& pl = lines[li].line;
    for (std::size_t i = 0; i < pl.size(); ++i) {
      const LonLat a = pl[i];
      const LonLat b = i + 1 < pl.size() ? pl[i + 1] : pl[i];
      if (i + 1 == pl.size() && pl.size() > 1) break;
      const std::size_t e = edges.size();
      edges.push_back({a, b, li});
      for (auto x = key(std::min(a.lon, b.lon)); x <= key(std::max(a.lon, b.lon)); ++x)
        for (auto y = key(std::min(a.lat, b.lat)); y <= key(std::max(a.lat, b.lat)); ++y) grid[pack(x, y)].push_back(e);
    }
  }
  std::vector<std::string> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    const auto kx = key(p.lon);
    const auto ky = key(p.lat);
    for (auto x = kx - 1; x <= kx + 1; ++x)
      for (auto y = ky - 1; y <= ky + 1; ++y) {
        auto it = grid.find(pack(x, y));
        if (it == grid.end()) continue;
        for (auto e : it->second) {
          const double d = point_segment_distance(p, edges[e].a, edges[e].b);
          if (d > max_dist) continue;
          const std::size_t li = edges[e].line;
          if (!best || d < best_d || (d == best_d && lines[li].id < lines[*best].id)) {
            best = li;
            best_d = d;
          }
        }
      }
    out.push_back(best ? lines[*best].description : std::string("Unknown"));
  }
  return out;
}

using LengthTable = std::map<std::pair<Origin, int>, double>;

/// Total kilometers per (origin, stream order), skipping segments that
/// intersect a lake and zero-length segments.
inline LengthTable length_stats(const WaterNetwork& net, std::span<const Polygon> lakes = {}) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(lakes.size());
  for (const auto& l : lakes) boxes.push_back(bounds_of(l));
  LengthTable table;
  for (const auto& s : net.segments) {
    if (s.strahler < 1) throw InputError("segment " + std::to_string(s.id) + " has no stream order");
    const auto line = net.geometry(s);
    const double len = polyline_length_km(line);
    if (len <= 0.0) continue;
    const auto box = bounds_of(line);
    bool in_lake = false;
    for (std::size_t i = 0; i < lakes.size() && !in_lake; ++i)
      in_lake = box.intersects(boxes[i]) && polyline_intersects_polygon(line, lakes[i]);
    if (in_lake) continue;
    table[{s.origin, s.strahler}] += len;
  }
  return table;
}

inline void write_length_csv(const LengthTable& table, std::ostream& out) {
  out << "origin,strahler,total_km\n";
  char buf[64];
  for (const auto& [key, km] : table) {
    std::snprintf(buf, sizeof buf, "%.6f", km);
    out << to_string(key.first) << ',' << key.second << ',' << buf << '\n';
  }
}

}  // namespace hydrovec
