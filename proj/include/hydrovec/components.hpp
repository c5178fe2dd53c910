#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "hydrovec/raster.hpp"

namespace hydrovec {

enum class Connectivity { four = 4, eight = 8 };

/// Water joins across diagonals, land does not, so a diagonal pair of water
/// cells never lets land leak through and vice versa.
struct ConnectivityRule {
  Connectivity water = Connectivity::eight;
  Connectivity land = Connectivity::four;
};

inline int neighbor_count(Connectivity c) { return c == Connectivity::eight ? 8 : 4; }

/// Partition of the selected cells of a grid into connected regions.
/// Label 0 is background; regions are numbered 1..component_count in the
/// row-major order of their first cell.
struct ComponentLabels {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> labels;
  std::int32_t component_count = 0;
  /// cells[k] lists the row-major indices of component k + 1, ascending.
  std::vector<std::vector<std::size_t>> cells;
  /// min_cell[k] is the lowest-elevation cell of component k + 1 (ties go to
  /// the smaller index). Empty when labeling was done without elevation.
  std::vector<std::size_t> min_cell;

  [[nodiscard]] std::int32_t at(std::size_t r, std::size_t c) const { return labels[r * cols + c]; }
  [[nodiscard]] const std::vector<std::size_t>& cells_of(std::int32_t label) const {
    return cells[static_cast<std::size_t>(label - 1)];
  }
};

namespace detail {

/// Labels cells where `select(idx)` holds using BFS under `conn`.
template <class Select>
ComponentLabels label_where(std::size_t rows, std::size_t cols, Connectivity conn,
                            Select&& select) {
  ComponentLabels out;
  out.rows = rows;
  out.cols = cols;
  out.labels.assign(rows * cols, 0);
  const int nn = neighbor_count(conn);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < rows * cols; ++start) {
    if (out.labels[start] != 0 || !select(start)) continue;
    const std::int32_t label = ++out.component_count;
    out.labels[start] = label;
    queue.clear();
    queue.push_back(start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t cur = queue[head];
      const auto r = static_cast<std::ptrdiff_t>(cur / cols);
      const auto c = static_cast<std::ptrdiff_t>(cur % cols);
      for (int k = 0; k < nn; ++k) {
        const auto nr = r + kNeighborDr[k];
        const auto nc = c + kNeighborDc[k];
        if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(rows) ||
            nc >= static_cast<std::ptrdiff_t>(cols))
          continue;
        const auto ni = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
        if (out.labels[ni] != 0 || !select(ni)) continue;
        out.labels[ni] = label;
        queue.push_back(ni);
      }
    }
    std::sort(queue.begin(), queue.end());
    out.cells.push_back(queue);
  }
  return out;
}

}  // namespace detail

inline bool is_water(const Mask& mask, std::size_t idx) { return mask[idx] != 0 && mask.valid(idx); }

/// Connected water regions of `water`. Nodata cells count as land.
inline ComponentLabels label_components(const Mask& water, ConnectivityRule rule = {}) {
  if (water.empty()) throw InputError("empty raster");
  return detail::label_where(water.rows(), water.cols(), rule.water,
                             [&](std::size_t i) { return is_water(water, i); });
}

/// As above, additionally recording each component's minimum-elevation cell.
template <class E>
ComponentLabels label_components(const Mask& water, const Raster<E>& elevation,
                                 ConnectivityRule rule = {}) {
  require_aligned(water, elevation);
  auto out = label_components(water, rule);
  out.min_cell.reserve(out.cells.size());
  for (const auto& cells : out.cells) {
    std::size_t best = cells.front();
    for (std::size_t idx : cells)
      if (elevation[idx] < elevation[best]) best = idx;
    out.min_cell.push_back(best);
  }
  return out;
}

/// Connected land regions (everything not water, including nodata).
inline ComponentLabels label_land(const Mask& water, ConnectivityRule rule = {}) {
  if (water.empty()) throw InputError("empty raster");
  return detail::label_where(water.rows(), water.cols(), rule.land,
                             [&](std::size_t i) { return !is_water(water, i); });
}

}  // namespace hydrovec
