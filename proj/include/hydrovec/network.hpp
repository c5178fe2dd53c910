#pragma once

// Segment graph built from a thinned mask, attached to a reference network,
// reduced to a forest of least-cost drainage paths and stream ordered.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hydrovec/error.hpp"
#include "hydrovec/geojson.hpp"
#include "hydrovec/geometry.hpp"
#include "hydrovec/raster.hpp"

namespace hydrovec {

enum class Origin { model, reference };

inline const char* to_string(Origin o) { return o == Origin::model ? "model" : "reference"; }

inline Origin origin_from_string(const std::string& s) {
  if (s == "model") return Origin::model;
  if (s == "reference") return Origin::reference;
  throw FormatError("unknown segment origin '" + s + "'");
}

struct NetworkNode {
  LonLat pos;
  /// Row-major index of the source cell for model nodes, -1 otherwise.
  std::int64_t cell = -1;
  double elevation = 0.0;
  Origin origin = Origin::model;
};

struct Segment {
  std::int64_t id = 0;
  Origin origin = Origin::model;
  /// Node indices from head (upstream, once oriented) to tail.
  std::vector<std::size_t> nodes;
  std::vector<std::int64_t> source_ids;
  std::int64_t target_id = -1;
  /// 0 while unassigned.
  int strahler = 0;
  double length_km = 0.0;
  /// Extra tail vertex where the segment meets the reference line.
  std::optional<LonLat> outlet;
};

/// A model node joined to a reference segment.
struct Junction {
  std::size_t node = 0;
  std::int64_t reference_segment = -1;
  LonLat attach_point;
};

struct WaterNetwork {
  /// Cell size (degrees) of the grid model nodes came from.
  double cell_size = 0.0;
  std::vector<NetworkNode> nodes;
  std::vector<Segment> segments;
  std::vector<Junction> junctions;
  /// Model segments in components with no reference contact.
  std::vector<std::int64_t> detached_segment_ids;
  /// Model segments discarded because they have no path to a junction.
  std::vector<std::int64_t> dropped_segment_ids;

  [[nodiscard]] Polyline geometry(const Segment& s) const {
    Polyline line;
    line.reserve(s.nodes.size() + 1);
    for (auto n : s.nodes) line.push_back(nodes[n].pos);
    if (s.outlet) line.push_back(*s.outlet);
    return line;
  }

  [[nodiscard]] const Segment* find(std::int64_t id) const {
    for (const auto& s : segments)
      if (s.id == id) return &s;
    return nullptr;
  }

  void update_lengths() {
    for (auto& s : segments) s.length_km = polyline_length_km(geometry(s));
  }
};

namespace network_detail {

inline void link_sources(WaterNetwork& net) {
  std::unordered_map<std::int64_t, std::size_t> by_id;
  for (std::size_t i = 0; i < net.segments.size(); ++i) {
    net.segments[i].source_ids.clear();
    by_id[net.segments[i].id] = i;
  }
  for (const auto& s : net.segments) {
    if (s.target_id < 0) continue;
    auto it = by_id.find(s.target_id);
    if (it != by_id.end()) net.segments[it->second].source_ids.push_back(s.id);
  }
  for (auto& s : net.segments) std::sort(s.source_ids.begin(), s.source_ids.end());
}

/// Undirected model-node adjacency implied by consecutive segment nodes.
inline std::vector<std::vector<std::size_t>> model_adjacency(const WaterNetwork& net) {
  std::vector<std::vector<std::size_t>> adj(net.nodes.size());
  for (const auto& s : net.segments) {
    if (s.origin != Origin::model) continue;
    for (std::size_t i = 1; i < s.nodes.size(); ++i) {
      const auto a = s.nodes[i - 1];
      const auto b = s.nodes[i];
      if (a == b) continue;
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

/// Uniform bucket index over reference polyline edges.
class EdgeIndex {
 public:
  struct Edge {
    LonLat a;
    LonLat b;
    std::int64_t segment;
  };

  EdgeIndex(const WaterNetwork& ref, double bucket) : bucket_(bucket > 0 ? bucket : 1.0) {
    for (const auto& s : ref.segments) {
      const auto line = ref.geometry(s);
      for (std::size_t i = 0; i + 1 < line.size() || (line.size() == 1 && i == 0); ++i) {
        const LonLat a = line[i];
        const LonLat b = line.size() == 1 ? line[0] : line[i + 1];
        const std::size_t e = edges_.size();
        edges_.push_back({a, b, s.id});
        const auto x0 = key(std::min(a.lon, b.lon));
        const auto x1 = key(std::max(a.lon, b.lon));
        const auto y0 = key(std::min(a.lat, b.lat));
        const auto y1 = key(std::max(a.lat, b.lat));
        for (auto x = x0; x <= x1; ++x)
          for (auto y = y0; y <= y1; ++y) buckets_[pack(x, y)].push_back(e);
        if (line.size() == 1) break;
      }
    }
  }

  template <class F>
  void query(double min_x, double min_y, double max_x, double max_y, F&& f) const {
    std::vector<std::size_t> hits;
    for (auto x = key(min_x); x <= key(max_x); ++x)
      for (auto y = key(min_y); y <= key(max_y); ++y) {
        auto it = buckets_.find(pack(x, y));
        if (it == buckets_.end()) continue;
        hits.insert(hits.end(), it->second.begin(), it->second.end());
      }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (auto e : hits) f(edges_[e]);
  }

 private:
  [[nodiscard]] std::int64_t key(double v) const { return static_cast<std::int64_t>(std::floor(v / bucket_)); }
  static std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
  }

  double bucket_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

inline LonLat closest_point(const LonLat& p, const LonLat& a, const LonLat& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2, 0.0, 1.0);
  return {a.lon + t * dx, a.lat + t * dy};
}

}  // namespace network_detail

/// Turns a thinned mask into model segments: one node per water cell at its
/// midpoint, edges between 8-adjacent cells, and edges grouped into maximal
/// chains whose interior nodes have degree 2. Isolated cells become
/// single-node segments; closed rings start at their lowest-index node.
inline WaterNetwork extract_segments(const Mask& skeleton) {
  WaterNetwork net;
  if (skeleton.empty()) return net;
  net.cell_size = skeleton.geo().cell_size;
  const std::size_t n = skeleton.size();
  std::vector<std::int64_t> node_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (skeleton[i] == 0 || !skeleton.valid(i)) continue;
    node_of[i] = static_cast<std::int64_t>(net.nodes.size());
    const auto cell = skeleton.cell_of(i);
    net.nodes.push_back({skeleton.cell_center(static_cast<std::size_t>(cell.row), static_cast<std::size_t>(cell.col)),
                         static_cast<std::int64_t>(i), 0.0, Origin::model});
  }
  const std::size_t m = net.nodes.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t v = 0; v < m; ++v) {
    const auto cell = skeleton.cell_of(static_cast<std::size_t>(net.nodes[v].cell));
    for (int k = 0; k < 8; ++k) {
      const auto nr = cell.row + kNeighborDr[k];
      const auto nc = cell.col + kNeighborDc[k];
      if (!skeleton.in_bounds(nr, nc)) continue;
      const auto w = node_of[skeleton.index(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc))];
      if (w >= 0) adj[v].push_back(static_cast<std::size_t>(w));
    }
  }
  std::vector<std::vector<std::uint8_t>> used(m);
  for (std::size_t v = 0; v < m; ++v) used[v].assign(adj[v].size(), 0);
  auto mark = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < adj[a].size(); ++k)
      if (adj[a][k] == b) used[a][k] = 1;
    for (std::size_t k = 0; k < adj[b].size(); ++k)
      if (adj[b][k] == a) used[b][k] = 1;
  };
  std::int64_t next_id = 0;
  auto walk = [&](std::size_t start, std::size_t first) {
    Segment seg;
    seg.id = next_id++;
    seg.origin = Origin::model;
    seg.nodes = {start, first};
    mark(start, first);
    std::size_t cur = first;
    while (adj[cur].size() == 2 && cur != start) {
      std::optional<std::size_t> nxt;
      for (std::size_t k = 0; k < 2; ++k)
        if (!used[cur][k]) nxt = adj[cur][k];
      if (!nxt) break;
      mark(cur, *nxt);
      seg.nodes.push_back(*nxt);
      cur = *nxt;
    }
    net.segments.push_back(std::move(seg));
  };
  for (std::size_t v = 0; v < m; ++v) {
    if (adj[v].empty()) {
      Segment seg;
      seg.id = next_id++;
      seg.nodes = {v};
      net.segments.push_back(std::move(seg));
      continue;
    }
    if (adj[v].size() == 2) continue;
    for (std::size_t k = 0; k < adj[v].size(); ++k)
      if (!used[v][k]) walk(v, adj[v][k]);
  }
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t k = 0; k < adj[v].size(); ++k)
      if (!used[v][k]) walk(v, adj[v][k]);
  net.update_lengths();
  return net;
}

/// Samples node elevations for model nodes from the grid they came from.
template <class E>
void assign_elevations(WaterNetwork& net, const Raster<E>& elevation) {
  for (auto& node : net.nodes) {
    if (node.cell < 0) continue;
    const auto idx = static_cast<std::size_t>(node.cell);
    if (idx >= elevation.size()) throw InputError("model node outside elevation grid");
    const double e = static_cast<double>(elevation[idx]);
    if (!elevation.valid(idx) || !std::isfinite(e)) throw InputError("model node has no elevation");
    node.elevation = e;
  }
}

/// Builds the reference network from line features. Targets come from the
/// features' target_id when present; otherwise a line drains into the line
/// that starts at its last vertex (or, failing that, passes through it).
/// Lines are assumed to be digitized upstream to downstream.
inline WaterNetwork reference_network(std::span<const LineFeature> lines) {
  WaterNetwork net;
  std::map<std::pair<double, double>, std::vector<std::int64_t>> starts;
  std::map<std::pair<double, double>, std::vector<std::int64_t>> passes;
  std::vector<std::uint8_t> explicit_target;
  for (const auto& f : lines) {
    if (f.line.empty()) continue;
    explicit_target.push_back(f.target_id ? 1 : 0);
    Segment seg;
    seg.id = f.id;
    seg.origin = Origin::reference;
    for (const auto& p : f.line) {
      seg.nodes.push_back(net.nodes.size());
      net.nodes.push_back({p, -1, 0.0, Origin::reference});
    }
    seg.target_id = f.target_id.value_or(-1);
    starts[{f.line.front().lon, f.line.front().lat}].push_back(f.id);
    for (std::size_t i = 1; i + 1 < f.line.size(); ++i) passes[{f.line[i].lon, f.line[i].lat}].push_back(f.id);
    net.segments.push_back(std::move(seg));
  }
  for (std::size_t i = 0; i < net.segments.size(); ++i) {
    auto& seg = net.segments[i];
    if (explicit_target[i]) continue;
    const auto& tail = net.nodes[seg.nodes.back()].pos;
    const std::pair key{tail.lon, tail.lat};
    auto pick = [&](const auto& table) -> std::int64_t {
      auto it = table.find(key);
      if (it == table.end()) return -1;
      std::int64_t best = -1;
      for (auto id : it->second)
        if (id != seg.id && (best < 0 || id < best)) best = id;
      return best;
    };
    seg.target_id = pick(starts);
    if (seg.target_id < 0) seg.target_id = pick(passes);
  }
  network_detail::link_sources(net);
  net.update_lengths();
  return net;
}

inline std::map<std::int64_t, int> existing_orders(std::span<const LineFeature> lines) {
  std::map<std::int64_t, int> out;
  for (const auto& f : lines)
    if (f.strahler) out[f.id] = *f.strahler;
  return out;
}

/// Merges model and reference networks and joins every model segment that
/// touches the reference through exactly one node. A model node touches the
/// reference when a reference line crosses its cell or one of its 8
/// neighbors; the joining node is the segment's lowest touching node (ties go
/// to the lower cell index) and joins the nearest reference segment there.
/// Model components without any contact are left detached and reported.
inline WaterNetwork attach_to_reference(const WaterNetwork& model_net, const WaterNetwork& reference_net) {
  WaterNetwork out;
  out.cell_size = model_net.cell_size;
  out.nodes = model_net.nodes;
  const std::size_t offset = out.nodes.size();
  out.nodes.insert(out.nodes.end(), reference_net.nodes.begin(), reference_net.nodes.end());
  for (auto s : reference_net.segments) {
    for (auto& n : s.nodes) n += offset;
    out.segments.push_back(std::move(s));
  }
  std::int64_t max_ref = -1;
  for (const auto& s : reference_net.segments) max_ref = std::max(max_ref, s.id);

  const double cs = model_net.cell_size > 0 ? model_net.cell_size : 1.0;
  const network_detail::EdgeIndex index(reference_net, cs);

  struct Contact {
    bool touches = false;
    std::int64_t segment = -1;
    double distance = std::numeric_limits<double>::infinity();
    LonLat point;
  };
  std::vector<std::optional<Contact>> contact(model_net.nodes.size());
  auto contact_of = [&](std::size_t v) -> const Contact& {
    if (contact[v]) return *contact[v];
    Contact c;
    const auto& p = model_net.nodes[v].pos;
    const double h = 1.5 * cs;
    index.query(p.lon - h, p.lat - h, p.lon + h, p.lat + h, [&](const network_detail::EdgeIndex::Edge& e) {
      if (!segment_intersects_box(e.a, e.b, p.lon - h, p.lat - h, p.lon + h, p.lat + h)) return;
      const double d = point_segment_distance(p, e.a, e.b);
      if (!c.touches || d < c.distance || (d == c.distance && e.segment < c.segment)) {
        c.touches = true;
        c.distance = d;
        c.segment = e.segment;
        c.point = network_detail::closest_point(p, e.a, e.b);
      }
    });
    contact[v] = c;
    return *contact[v];
  };

  std::vector<std::uint8_t> is_junction(model_net.nodes.size(), 0);
  for (auto s : model_net.segments) {
    if (s.origin != Origin::model) continue;
    std::optional<std::size_t> best;
    for (auto v : s.nodes) {
      if (!contact_of(v).touches) continue;
      const auto& nv = model_net.nodes[v];
      if (!best || std::tie(nv.elevation, nv.cell) <
                       std::tie(model_net.nodes[*best].elevation, model_net.nodes[*best].cell))
        best = v;
    }
    s.id += max_ref + 1;
    s.target_id = -1;
    s.outlet.reset();
    if (best) {
      const auto& c = contact_of(*best);
      s.target_id = c.segment;
      if (!is_junction[*best]) {
        is_junction[*best] = 1;
        out.junctions.push_back({*best, c.segment, c.point});
      }
    }
    out.segments.push_back(std::move(s));
  }
  std::sort(out.junctions.begin(), out.junctions.end(),
            [](const Junction& a, const Junction& b) { return a.node < b.node; });

  // Components (over model nodes) that received no junction stay detached.
  const auto adj = network_detail::model_adjacency(out);
  std::vector<std::int64_t> comp(out.nodes.size(), -1);
  std::vector<std::uint8_t> comp_attached;
  for (std::size_t v = 0; v < offset; ++v) {
    if (comp[v] >= 0) continue;
    const auto id = static_cast<std::int64_t>(comp_attached.size());
    comp_attached.push_back(0);
    std::vector<std::size_t> stack{v};
    comp[v] = id;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      if (is_junction[u]) comp_attached.back() = 1;
      for (auto w : adj[u])
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
  }
  for (const auto& s : out.segments)
    if (s.origin == Origin::model && !s.nodes.empty() &&
        !comp_attached[static_cast<std::size_t>(comp[s.nodes.front()])])
      out.detached_segment_ids.push_back(s.id);

  network_detail::link_sources(out);
  out.update_lengths();
  return out;
}

/// Cost of the canonical path from each node to the nearest junction:
/// lexicographic (accumulated uphill elevation, hop count).
struct DrainageCost {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t hops = std::numeric_limits<std::size_t>::max();

  [[nodiscard]] bool reachable() const { return std::isfinite(cost); }
  friend bool operator==(const DrainageCost&, const DrainageCost&) = default;
  friend bool operator<(const DrainageCost& a, const DrainageCost& b) {
    return std::tie(a.cost, a.hops) < std::tie(b.cost, b.hops);
  }
};

inline double uphill_cost(double elev_from, double elev_to) { return std::max(0.0, elev_to - elev_from); }

/// Next hop of every model node on its least-cost path to a junction, or
/// nullopt for junctions and nodes with no path. Among equal-cost paths the
/// fewest hops win, then the lowest next node index.
inline std::vector<std::optional<std::size_t>> drainage_successors(const WaterNetwork& net,
                                                                   std::vector<DrainageCost>* costs = nullptr) {
  const auto adj = network_detail::model_adjacency(net);
  const std::size_t n = net.nodes.size();
  std::vector<DrainageCost> dist(n);
  using Entry = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (const auto& j : net.junctions) {
    dist[j.node] = {0.0, 0};
    heap.emplace(0.0, 0, j.node);
  }
  std::vector<std::uint8_t> done(n, 0);
  while (!heap.empty()) {
    const auto [d, h, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (auto x : adj[u]) {
      if (done[x]) continue;
      // Reverse search: the forward step is x -> u.
      const DrainageCost cand{d + uphill_cost(net.nodes[x].elevation, net.nodes[u].elevation), h + 1};
      if (cand < dist[x]) {
        dist[x] = cand;
        heap.emplace(cand.cost, cand.hops, x);
      }
    }
  }
  std::vector<std::optional<std::size_t>> succ(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (!dist[x].reachable() || dist[x].hops == 0) continue;
    for (auto v : adj[x]) {
      if (!dist[v].reachable()) continue;
      const DrainageCost via{dist[v].cost + uphill_cost(net.nodes[x].elevation, net.nodes[v].elevation),
                             dist[v].hops + 1};
      if (via == dist[x]) {
        succ[x] = v;
        break;  // adj is sorted, so this is the lowest index
      }
    }
  }
  if (costs) *costs = std::move(dist);
  return succ;
}

/// Keeps exactly the edges on each model node's least-cost path to a
/// junction (edge cost: elevation gained), orients them downstream and
/// rebuilds the model segments from the resulting forest. Nodes with no
/// path are dropped with their segments.
inline WaterNetwork remove_cycles(const WaterNetwork& net) {
  const auto succ = drainage_successors(net);
  const std::size_t n = net.nodes.size();
  std::vector<std::uint8_t> is_junction(n, 0);
  std::unordered_map<std::size_t, const Junction*> junction_of;
  for (const auto& j : net.junctions) {
    is_junction[j.node] = 1;
    junction_of[j.node] = &j;
  }
  std::vector<std::uint8_t> kept(n, 0);
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (net.nodes[x].origin != Origin::model) continue;
    if (succ[x] || is_junction[x]) kept[x] = 1;
    if (succ[x]) ++indeg[*succ[x]];
  }

  WaterNetwork out;
  out.cell_size = net.cell_size;
  out.nodes = net.nodes;
  out.detached_segment_ids = net.detached_segment_ids;
  std::int64_t next_id = 0;
  for (const auto& s : net.segments) {
    if (s.origin == Origin::reference) {
      out.segments.push_back(s);
      next_id = std::max(next_id, s.id + 1);
    } else {
      const bool any = std::any_of(s.nodes.begin(), s.nodes.end(), [&](std::size_t v) { return kept[v] != 0; });
      if (!any) out.dropped_segment_ids.push_back(s.id);
    }
  }
  for (const auto& j : net.junctions)
    if (kept[j.node]) out.junctions.push_back(j);

  std::vector<std::int64_t> segment_starting_at(n, -1);
  std::vector<std::size_t> model_begin;
  std::vector<Segment> model;
  for (std::size_t x = 0; x < n; ++x) {
    if (!kept[x] || indeg[x] == 1) continue;
    Segment seg;
    seg.origin = Origin::model;
    seg.nodes.push_back(x);
    if (is_junction[x]) {
      if (indeg[x] != 0) continue;  // only other segments' tail
    } else {
      std::size_t cur = x;
      while (true) {
        const std::size_t nxt = *succ[cur];
        seg.nodes.push_back(nxt);
        if (is_junction[nxt] || indeg[nxt] != 1) break;
        cur = nxt;
      }
    }
    seg.id = next_id++;
    segment_starting_at[x] = seg.id;
    model.push_back(std::move(seg));
  }
  for (auto& seg : model) {
    const std::size_t tail = seg.nodes.back();
    if (is_junction[tail]) {
      const Junction* j = junction_of.at(tail);
      seg.target_id = j->reference_segment;
      seg.outlet = j->attach_point;
    } else {
      seg.target_id = segment_starting_at[tail];
    }
    out.segments.push_back(std::move(seg));
  }
  network_detail::link_sources(out);
  out.update_lengths();
  return out;
}

template <class E>
WaterNetwork remove_cycles(WaterNetwork net, const Raster<E>& elevation) {
  assign_elevations(net, elevation);
  return remove_cycles(net);
}

/// Strahler order over the target links. Reference segments take the larger
/// of the computed order and their stored order, and that value feeds the
/// segments downstream.
inline WaterNetwork assign_strahler(WaterNetwork net, const std::map<std::int64_t, int>& existing = {}) {
  std::unordered_map<std::int64_t, std::size_t> by_id;
  for (std::size_t i = 0; i < net.segments.size(); ++i) by_id[net.segments[i].id] = i;
  const std::size_t m = net.segments.size();
  std::vector<std::size_t> pending(m, 0);
  std::vector<std::vector<std::size_t>> children(m);
  std::vector<std::optional<std::size_t>> parent(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto t = net.segments[i].target_id;
    if (t < 0) continue;
    auto it = by_id.find(t);
    if (it == by_id.end()) continue;
    parent[i] = it->second;
    children[it->second].push_back(i);
    ++pending[it->second];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < m; ++i)
    if (pending[i] == 0) ready.push_back(i);
  std::size_t processed = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    ++processed;
    int top = 0;
    int ties = 0;
    for (auto c : children[i]) {
      const int o = net.segments[c].strahler;
      if (o > top) {
        top = o;
        ties = 1;
      } else if (o == top) {
        ++ties;
      }
    }
    int order = children[i].empty() ? 1 : (ties >= 2 ? top + 1 : top);
    auto& seg = net.segments[i];
    if (seg.origin == Origin::reference) {
      auto it = existing.find(seg.id);
      if (it != existing.end()) order = std::max(order, it->second);
    }
    seg.strahler = order;
    if (parent[i] && --pending[*parent[i]] == 0) ready.push_back(*parent[i]);
  }
  if (processed != m) throw CycleError();
  return net;
}

/// FeatureCollection of LineStrings with id, source_ids, target_id, origin,
/// strahler and length_km; -1 stands for a missing id or order.
inline json network_to_geojson(const WaterNetwork& net) {
  std::vector<json> features;
  features.reserve(net.segments.size());
  std::vector<const Segment*> order;
  for (const auto& s : net.segments) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const Segment* a, const Segment* b) { return a->id < b->id; });
  for (const auto* s : order) {
    json sources = json::array();
    for (auto id : s->source_ids) sources.push_back(id);
    if (sources.empty()) sources.push_back(-1);
    json props = {{"id", s->id},
                  {"source_ids", sources},
                  {"target_id", s->target_id},
                  {"origin", to_string(s->origin)},
                  {"strahler", s->strahler > 0 ? s->strahler : -1},
                  {"length_km", s->length_km}};
    features.push_back(line_feature(net.geometry(*s), std::move(props)));
  }
  return feature_collection(std::move(features));
}

inline WaterNetwork network_from_geojson(const json& doc) {
  WaterNetwork net;
  if (!doc.contains("features")) throw FormatError("network is not a FeatureCollection");
  for (const auto& f : doc.at("features")) {
    const auto& p = f.at("properties");
    Segment s;
    s.id = p.at("id").get<std::int64_t>();
    for (const auto& v : p.at("source_ids")) {
      const auto id = v.get<std::int64_t>();
      if (id >= 0) s.source_ids.push_back(id);
    }
    s.target_id = p.at("target_id").get<std::int64_t>();
    s.origin = origin_from_string(p.at("origin").get<std::string>());
    const int order = p.at("strahler").get<int>();
    s.strahler = order > 0 ? order : 0;
    s.length_km = p.at("length_km").get<double>();
    const auto& coords = f.at("geometry").at("coordinates");
    for (const auto& c : coords) {
      s.nodes.push_back(net.nodes.size());
      net.nodes.push_back({{c.at(0).get<double>(), c.at(1).get<double>()}, -1, 0.0, s.origin});
    }
    net.segments.push_back(std::move(s));
  }
  return net;
}

}  // namespace hydrovec
