#pragma once

// Topology-preserving thinning of a water mask. Higher cells are peeled
// first so the surviving centerline follows the low side of wide channels.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hydrovec/raster.hpp"

namespace hydrovec {

enum class CellClass { skeleton, interior, removable };

namespace thinner_detail {

/// Bit k of a neighborhood code is neighbor k in kNeighborDr/kNeighborDc
/// order (N, W, E, S, NW, NE, SW, SE).
inline constexpr std::uint8_t kFourMask = 0b0000'1111;

/// Number of 8-connected groups among the set neighbors, where two
/// neighbors connect when they are adjacent within the 3x3 window.
constexpr std::array<std::uint8_t, 256> make_ring_component_table() {
  std::array<std::uint8_t, 256> table{};
  for (int code = 0; code < 256; ++code) {
    int seen = 0;
    int groups = 0;
    for (int start = 0; start < 8; ++start) {
      if (!(code >> start & 1) || (seen >> start & 1)) continue;
      ++groups;
      int stack[8];
      int top = 0;
      stack[top++] = start;
      seen |= 1 << start;
      while (top > 0) {
        const int cur = stack[--top];
        for (int nb = 0; nb < 8; ++nb) {
          if (!(code >> nb & 1) || (seen >> nb & 1)) continue;
          const auto dr = kNeighborDr[cur] - kNeighborDr[nb];
          const auto dc = kNeighborDc[cur] - kNeighborDc[nb];
          if (dr >= -1 && dr <= 1 && dc >= -1 && dc <= 1) {
            seen |= 1 << nb;
            stack[top++] = nb;
          }
        }
      }
    }
    table[static_cast<std::size_t>(code)] = static_cast<std::uint8_t>(groups);
  }
  return table;
}

inline constexpr auto kRingComponents = make_ring_component_table();

inline std::uint8_t neighborhood_code(const Mask& mask, std::size_t idx) {
  const auto r = static_cast<std::ptrdiff_t>(idx / mask.cols());
  const auto c = static_cast<std::ptrdiff_t>(idx % mask.cols());
  std::uint8_t code = 0;
  for (int k = 0; k < 8; ++k) {
    const auto nr = r + kNeighborDr[k];
    const auto nc = c + kNeighborDc[k];
    if (!mask.in_bounds(nr, nc)) continue;
    const std::size_t ni = mask.index(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc));
    if (mask[ni] != 0) code = static_cast<std::uint8_t>(code | (1u << k));
  }
  return code;
}

inline CellClass classify_code(std::uint8_t code) {
  if (std::popcount(code) <= 1) return CellClass::skeleton;
  if (kRingComponents[code] > 1) return CellClass::skeleton;
  // Every 4-neighbor is water: the emptied cell would be enclosed land.
  if ((code & kFourMask) == kFourMask) return CellClass::interior;
  return CellClass::removable;
}

}  // namespace thinner_detail

/// Classifies a water cell from its 3x3 neighborhood. Out-of-grid cells are
/// land that belongs to the outside region. Reference cells are always
/// skeleton.
inline CellClass classify_cell(const Mask& mask, const Mask& reference_mask, std::size_t idx) {
  require_aligned(mask, reference_mask);
  if (idx >= mask.size() || mask[idx] == 0) throw InputError("cell is not a water cell");
  if (reference_mask[idx] != 0) return CellClass::skeleton;
  return thinner_detail::classify_code(thinner_detail::neighborhood_code(mask, idx));
}

template <class E>
CellClass classify_cell(const Mask& mask, const Raster<E>& elevation, const Mask& reference_mask,
                        Cell cell) {
  require_aligned(mask, elevation);
  if (!mask.in_bounds(cell.row, cell.col)) throw InputError("cell outside raster");
  return classify_cell(mask, reference_mask,
                       mask.index(static_cast<std::size_t>(cell.row), static_cast<std::size_t>(cell.col)));
}

/// Removes removable cells in descending elevation order until none remain.
/// Each candidate is re-checked when its turn comes; whenever a cell is
/// removed its water neighbors are re-examined for the next pass. Elevation
/// ties go to the lower row-major index first; nodata elevations sort last.
/// Reference cells are kept (and added if the mask lacks them).
template <class E>
Mask thin(const Mask& mask, const Raster<E>& elevation, const Mask& reference_mask) {
  using thinner_detail::classify_code;
  using thinner_detail::neighborhood_code;
  require_aligned(mask, elevation);
  require_aligned(mask, reference_mask);
  const std::size_t n = mask.size();

  Mask work = make_like<std::uint8_t>(mask);
  for (std::size_t i = 0; i < n; ++i)
    work[i] = ((mask[i] != 0 && mask.valid(i)) || reference_mask[i] != 0) ? 1 : 0;

  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = static_cast<double>(elevation[i]);
    key[i] = elevation.valid(i) && std::isfinite(e) ? e : -std::numeric_limits<double>::infinity();
  }

  auto removable = [&](std::size_t i) {
    return work[i] != 0 && reference_mask[i] == 0 &&
           classify_code(neighborhood_code(work, i)) == CellClass::removable;
  };

  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (removable(i)) current.push_back(i);

  std::vector<std::uint8_t> queued(n, 0);
  std::vector<std::size_t> next;
  const auto rows = static_cast<std::ptrdiff_t>(mask.rows());
  const auto cols = static_cast<std::ptrdiff_t>(mask.cols());
  while (!current.empty()) {
    std::sort(current.begin(), current.end(), [&](std::size_t a, std::size_t b) {
      if (key[a] != key[b]) return key[a] > key[b];
      return a < b;
    });
    next.clear();
    for (const std::size_t cell : current) {
      if (!removable(cell)) continue;  // now skeleton or interior
      work[cell] = 0;
      const auto r = static_cast<std::ptrdiff_t>(cell / mask.cols());
      const auto c = static_cast<std::ptrdiff_t>(cell % mask.cols());
      for (int k = 0; k < 8; ++k) {
        const auto nr = r + kNeighborDr[k];
        const auto nc = c + kNeighborDc[k];
        if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
        const auto ni = static_cast<std::size_t>(nr) * mask.cols() + static_cast<std::size_t>(nc);
        if (!queued[ni] && removable(ni)) {
          queued[ni] = 1;
          next.push_back(ni);
        }
      }
    }
    for (auto i : next) queued[i] = 0;
    current.swap(next);
  }
  return work;
}

}  // namespace hydrovec
