#pragma once

// Joins disconnected model waterway components to a reference network by
// least-cost paths over the 8-connected cell graph of one basin tile.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "hydrovec/components.hpp"
#include "hydrovec/geometry.hpp"
#include "hydrovec/raster.hpp"

namespace hydrovec {

struct EdgeWeightParams {
  double prob_floor = 0.1;
  double prob_ceil = 0.5;
  /// Multiplier on the uphill cost term.
  double slope_coefficient = 1.0;

  void validate() const {
    if (!(prob_floor >= 0.0 && prob_floor < prob_ceil && prob_ceil <= 1.0))
      throw InputError("need 0 <= prob_floor < prob_ceil <= 1");
    if (!(slope_coefficient > 0.0)) throw InputError("slope coefficient must be positive");
  }
};

/// Scaled probability given to reference cells the model scored as zero.
inline constexpr double kReferenceEpsilon = 0x1p-20;

/// Search budget per iteration: iteration k may accumulate at most
/// base_cost * 2^k, for k = 0..max_iterations.
struct SearchSchedule {
  double base_cost = 64.0;
  int max_iterations = 6;

  [[nodiscard]] double budget(int iteration) const { return std::ldexp(base_cost, iteration); }

  void validate() const {
    if (!(base_cost > 0.0)) throw InputError("base cost must be positive");
    if (max_iterations < 0) throw InputError("max iterations must be non-negative");
  }
};

inline double rescale_probability(double x, const EdgeWeightParams& params = {}) {
  return std::min(1.0, std::max(0.0, (x - params.prob_floor) / (params.prob_ceil - params.prob_floor)));
}

/// Cost of stepping from a source cell at elev_s onto a target cell at elev_t
/// whose scaled probability is scaled_t.
inline double edge_weight(double scaled_t, double elev_s, double elev_t,
                          const EdgeWeightParams& params = {}) {
  if (!std::isfinite(elev_s) || !std::isfinite(elev_t)) throw InputError("non-finite elevation");
  if (!(scaled_t > 0.0 && scaled_t <= 1.0)) throw InputError("scaled probability must be in (0, 1]");
  const double de = elev_t - elev_s;
  const double base = -std::log2(scaled_t);
  if (de <= 0.0) return base;
  return std::max(base * params.slope_coefficient * de, de);
}

/// One basin's inputs cut to the basin bounding box plus buffer.
struct BasinTile {
  FloatRaster probability;
  FloatRaster elevation;
  std::vector<Polygon> basin;
  Mask reference_mask;
  Mask inside_basin;
};

/// Marks every cell whose closed square is touched by any of the lines.
template <class T>
Mask burn_polylines(const Raster<T>& like, std::span<const Polyline> lines) {
  Mask out = make_like<std::uint8_t>(like);
  const auto& g = like.geo();
  const double cs = g.cell_size;
  const auto rows = static_cast<std::ptrdiff_t>(like.rows());
  const auto cols = static_cast<std::ptrdiff_t>(like.cols());
  auto col_of = [&](double lon) { return static_cast<std::ptrdiff_t>(std::floor((lon - g.origin_lon) / cs)); };
  auto row_of = [&](double lat) { return static_cast<std::ptrdiff_t>(std::floor((g.origin_lat - lat) / cs)); };
  auto burn_segment = [&](const LonLat& a, const LonLat& b) {
    const auto c0 = std::max<std::ptrdiff_t>(0, col_of(std::min(a.lon, b.lon)) - 1);
    const auto c1 = std::min<std::ptrdiff_t>(cols - 1, col_of(std::max(a.lon, b.lon)) + 1);
    const auto r0 = std::max<std::ptrdiff_t>(0, row_of(std::max(a.lat, b.lat)) - 1);
    const auto r1 = std::min<std::ptrdiff_t>(rows - 1, row_of(std::min(a.lat, b.lat)) + 1);
    for (auto r = r0; r <= r1; ++r)
      for (auto c = c0; c <= c1; ++c) {
        const double x0 = g.origin_lon + static_cast<double>(c) * cs;
        const double y1 = g.origin_lat - static_cast<double>(r) * cs;
        if (segment_intersects_box(a, b, x0, y1 - cs, x0 + cs, y1))
          out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1;
      }
  };
  for (const auto& line : lines) {
    if (line.size() == 1) burn_segment(line[0], line[0]);
    for (std::size_t i = 1; i < line.size(); ++i) burn_segment(line[i - 1], line[i]);
  }
  return out;
}

/// Cells whose center lies inside any polygon.
template <class T>
Mask rasterize_inside(const Raster<T>& like, std::span<const Polygon> polygons) {
  Mask out = make_like<std::uint8_t>(like);
  for (std::size_t r = 0; r < like.rows(); ++r)
    for (std::size_t c = 0; c < like.cols(); ++c) {
      const LonLat p = like.cell_center(r, c);
      for (const auto& poly : polygons)
        if (contains(poly, p)) {
          out(r, c) = 1;
          break;
        }
    }
  return out;
}

/// Cuts probability and elevation to the basin bounding box buffered by
/// `buffer_degrees` and burns the reference lines into the tile.
template <class P, class E>
BasinTile make_basin_tile(const Raster<P>& probability, const Raster<E>& elevation,
                          std::vector<Polygon> basin, std::span<const Polyline> reference,
                          double buffer_degrees = 0.005) {
  if (basin.empty()) throw InputError("basin has no polygon");
  BoundingBox box;
  for (const auto& p : basin)
    for (const auto& q : p.outer) box.extend(q);
  const auto win = window_for(probability, box.buffered(buffer_degrees));
  if (!win) throw InputError("basin does not overlap the probability raster");
  const auto [a, b] = *win;
  const auto rows = static_cast<std::size_t>(b.row - a.row);
  const auto cols = static_cast<std::size_t>(b.col - a.col);
  BasinTile tile;
  const auto prob = crop(probability, static_cast<std::size_t>(a.row), static_cast<std::size_t>(a.col), rows, cols);
  tile.probability = make_like<float>(prob);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    tile.probability[i] = static_cast<float>(prob[i]);
    if (prob.is_nodata(i)) tile.probability.set_nodata(i);
  }
  const auto elev = align_to(elevation, prob);
  tile.elevation = make_like<float>(prob);
  for (std::size_t i = 0; i < elev.size(); ++i) {
    tile.elevation[i] = static_cast<float>(elev[i]);
    if (elev.is_nodata(i)) tile.elevation.set_nodata(i);
  }
  tile.basin = std::move(basin);
  tile.reference_mask = burn_polylines(prob, reference);
  tile.inside_basin = rasterize_inside(prob, std::span<const Polygon>(tile.basin));
  return tile;
}

/// Labels of components that belong to a neighboring basin: the lowest cell
/// lies outside the basin and strictly more than half of the cells do too.
inline std::vector<std::int32_t> prune_foreign_components(const ComponentLabels& labels,
                                                          const Mask& inside_basin) {
  if (labels.min_cell.size() != labels.cells.size())
    throw InputError("component labels lack minimum-elevation cells");
  std::vector<std::int32_t> pruned;
  for (std::size_t k = 0; k < labels.cells.size(); ++k) {
    if (inside_basin[labels.min_cell[k]] != 0) continue;
    std::size_t outside = 0;
    for (std::size_t idx : labels.cells[k]) outside += inside_basin[idx] == 0 ? 1 : 0;
    if (2 * outside > labels.cells[k].size()) pruned.push_back(static_cast<std::int32_t>(k + 1));
  }
  return pruned;
}

template <class E>
std::vector<std::int32_t> prune_foreign_components(const ComponentLabels& labels,
                                                   const Mask& inside_basin,
                                                   const Raster<E>& elevation) {
  if (labels.min_cell.size() == labels.cells.size()) return prune_foreign_components(labels, inside_basin);
  ComponentLabels with_min = labels;
  for (const auto& cells : labels.cells) {
    std::size_t best = cells.front();
    for (auto idx : cells)
      if (elevation[idx] < elevation[best]) best = idx;
    with_min.min_cell.push_back(best);
  }
  return prune_foreign_components(with_min, inside_basin);
}

/// One successful least-cost search.
struct ConnectionEvent {
  std::int32_t component = 0;
  std::size_t source = 0;
  int iteration = 0;
  double cost = 0.0;
  /// Cells from the source to the first already-connected cell, inclusive.
  std::vector<std::size_t> path;
};

struct ConnectionResult {
  Mask connected_mask;
  Mask rounded;
  ComponentLabels components;
  std::vector<std::size_t> added_path_cells;
  std::vector<std::int32_t> pruned_component_ids;
  std::vector<std::int32_t> unreachable_component_ids;
  std::vector<std::int32_t> initially_connected_ids;
  std::vector<ConnectionEvent> events;
};

/// The weighted cell graph shared by the search and by callers that want to
/// inspect it: a cell is a node when its scaled probability is positive or it
/// is a reference cell, and its elevation is known.
struct CostGraph {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> scaled;
  std::vector<double> elevation;
  std::vector<std::uint8_t> in_graph;
  EdgeWeightParams params;

  template <class P, class E>
  CostGraph(const Raster<P>& probability, const Raster<E>& elev, const Mask& reference,
            const EdgeWeightParams& p)
      : rows(probability.rows()), cols(probability.cols()), params(p) {
    require_aligned(probability, elev);
    require_aligned(probability, reference);
    const std::size_t n = probability.size();
    scaled.assign(n, 0.0);
    elevation.assign(n, 0.0);
    in_graph.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = static_cast<double>(elev[i]);
      if (!elev.valid(i) || !std::isfinite(e)) continue;
      elevation[i] = e;
      double s = probability.valid(i) ? rescale_probability(static_cast<double>(probability[i]), p) : 0.0;
      if (s <= 0.0 && reference[i] != 0) s = kReferenceEpsilon;
      scaled[i] = s;
      in_graph[i] = s > 0.0 ? 1 : 0;
    }
  }

  [[nodiscard]] double weight(std::size_t from, std::size_t to) const {
    return edge_weight(scaled[to], elevation[from], elevation[to], params);
  }

  template <class F>
  void for_each_neighbor(std::size_t idx, F&& f) const {
    const auto r = static_cast<std::ptrdiff_t>(idx / cols);
    const auto c = static_cast<std::ptrdiff_t>(idx % cols);
    for (int k = 0; k < 8; ++k) {
      const auto nr = r + kNeighborDr[k];
      const auto nc = c + kNeighborDc[k];
      if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(rows) ||
          nc >= static_cast<std::ptrdiff_t>(cols))
        continue;
      const auto ni = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
      if (in_graph[ni]) f(ni);
    }
  }
};

namespace connector_detail {

struct SearchOutcome {
  bool found = false;
  double cost = 0.0;
  std::vector<std::size_t> path;
};

/// Dijkstra from `source` until the cheapest reachable cell flagged in
/// `targets` is settled, or the frontier exceeds `budget`.
inline SearchOutcome least_cost_search(const CostGraph& g, std::size_t source,
                                       const std::vector<std::uint8_t>& targets, double budget) {
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<double> dist(g.scaled.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> pred(g.scaled.size(), static_cast<std::size_t>(-1));
  std::vector<std::uint8_t> done(g.scaled.size(), 0);
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    if (d > budget) break;
    done[u] = 1;
    if (targets[u] && u != source) {
      SearchOutcome out{true, d, {}};
      for (std::size_t v = u; v != static_cast<std::size_t>(-1); v = pred[v]) out.path.push_back(v);
      std::reverse(out.path.begin(), out.path.end());
      return out;
    }
    g.for_each_neighbor(u, [&](std::size_t v) {
      if (done[v]) return;
      const double nd = d + g.weight(u, v);
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        heap.emplace(nd, v);
      }
    });
  }
  return {};
}

/// Extends `attached` with every cell of `mask` 8-connected to `seeds`.
inline void flood_attach(const Mask& mask, std::span<const std::size_t> seeds,
                         std::vector<std::uint8_t>& attached) {
  std::vector<std::size_t> stack(seeds.begin(), seeds.end());
  for (auto s : seeds) attached[s] = 1;
  const auto rows = static_cast<std::ptrdiff_t>(mask.rows());
  const auto cols = static_cast<std::ptrdiff_t>(mask.cols());
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    const auto r = static_cast<std::ptrdiff_t>(cur / mask.cols());
    const auto c = static_cast<std::ptrdiff_t>(cur % mask.cols());
    for (int k = 0; k < 8; ++k) {
      const auto nr = r + kNeighborDr[k];
      const auto nc = c + kNeighborDc[k];
      if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
      const auto ni = static_cast<std::size_t>(nr) * mask.cols() + static_cast<std::size_t>(nc);
      if (attached[ni] || mask[ni] == 0) continue;
      attached[ni] = 1;
      stack.push_back(ni);
    }
  }
}

}  // namespace connector_detail

/// Rounds the tile's probabilities, drops components belonging to adjacent
/// basins, then connects each remaining component to the reference network.
/// Components are tried in ascending order of their lowest cell's elevation
/// (ties row-major) from that lowest cell; each search stops at the first
/// already-connected cell (reference, a connected component, or an earlier
/// path). Components still detached after every iteration of the schedule
/// are reported as unreachable and left in the mask.
inline ConnectionResult connect_components(const BasinTile& tile, const EdgeWeightParams& params = {},
                                           const SearchSchedule& schedule = {},
                                           double rounding_threshold = 0.5) {
  params.validate();
  schedule.validate();
  require_aligned(tile.probability, tile.elevation);
  require_aligned(tile.probability, tile.reference_mask);
  require_aligned(tile.probability, tile.inside_basin);
  const std::size_t n = tile.probability.size();
  if (std::none_of(tile.reference_mask.values().begin(), tile.reference_mask.values().end(),
                   [](std::uint8_t v) { return v != 0; }))
    throw InputError("no reference network in tile");

  const CostGraph graph(tile.probability, tile.elevation, tile.reference_mask, params);

  ConnectionResult res;
  res.rounded = make_like<std::uint8_t>(tile.probability);
  for (std::size_t i = 0; i < n; ++i)
    if (tile.probability.valid(i) && graph.in_graph[i] &&
        static_cast<double>(tile.probability[i]) >= rounding_threshold)
      res.rounded[i] = 1;

  res.components = label_components(res.rounded, tile.elevation);
  res.pruned_component_ids = prune_foreign_components(res.components, tile.inside_basin);
  std::vector<std::uint8_t> pruned(static_cast<std::size_t>(res.components.component_count) + 1, 0);
  for (auto id : res.pruned_component_ids) pruned[static_cast<std::size_t>(id)] = 1;

  res.connected_mask = make_like<std::uint8_t>(tile.probability);
  std::vector<std::size_t> reference_cells;
  for (std::size_t i = 0; i < n; ++i) {
    if (tile.reference_mask[i] != 0) {
      res.connected_mask[i] = 1;
      reference_cells.push_back(i);
    }
    const auto lab = res.components.labels[i];
    if (lab != 0 && !pruned[static_cast<std::size_t>(lab)]) res.connected_mask[i] = 1;
  }

  std::vector<std::uint8_t> attached(n, 0);
  connector_detail::flood_attach(res.connected_mask, reference_cells, attached);

  std::vector<std::int32_t> pending;
  for (std::int32_t id = 1; id <= res.components.component_count; ++id) {
    if (pruned[static_cast<std::size_t>(id)]) continue;
    const std::size_t m = res.components.min_cell[static_cast<std::size_t>(id - 1)];
    if (attached[m]) res.initially_connected_ids.push_back(id);
    else pending.push_back(id);
  }
  std::stable_sort(pending.begin(), pending.end(), [&](std::int32_t a, std::int32_t b) {
    const std::size_t ma = res.components.min_cell[static_cast<std::size_t>(a - 1)];
    const std::size_t mb = res.components.min_cell[static_cast<std::size_t>(b - 1)];
    return std::tie(graph.elevation[ma], ma) < std::tie(graph.elevation[mb], mb);
  });

  std::vector<std::uint8_t> added(n, 0);
  for (int k = 0; k <= schedule.max_iterations && !pending.empty(); ++k) {
    const double budget = schedule.budget(k);
    for (const auto id : pending) {
      const std::size_t source = res.components.min_cell[static_cast<std::size_t>(id - 1)];
      if (attached[source]) continue;
      auto found = connector_detail::least_cost_search(graph, source, attached, budget);
      if (!found.found) continue;
      for (auto c : found.path) {
        if (res.connected_mask[c] == 0) {
          res.connected_mask[c] = 1;
          if (!added[c]) {
            added[c] = 1;
            res.added_path_cells.push_back(c);
          }
        }
      }
      connector_detail::flood_attach(res.connected_mask, found.path, attached);
      res.events.push_back({id, source, k, found.cost, std::move(found.path)});
    }
    std::erase_if(pending, [&](std::int32_t id) {
      return attached[res.components.min_cell[static_cast<std::size_t>(id - 1)]] != 0;
    });
  }
  res.unreachable_component_ids = pending;
  std::sort(res.unreachable_component_ids.begin(), res.unreachable_component_ids.end());
  return res;
}

}  // namespace hydrovec
