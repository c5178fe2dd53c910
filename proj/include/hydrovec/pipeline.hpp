#pragma once

// Stage functions shared by the CLI subcommands, and the multi-basin runner.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hydrovec/config.hpp"
#include "hydrovec/connector.hpp"
#include "hydrovec/error.hpp"
#include "hydrovec/features.hpp"
#include "hydrovec/geojson.hpp"
#include "hydrovec/geotiff.hpp"
#include "hydrovec/metrics.hpp"
#include "hydrovec/network.hpp"
#include "hydrovec/raster.hpp"
#include "hydrovec/thinner.hpp"

namespace hydrovec {

namespace fs = std::filesystem;

// ---- stages ----------------------------------------------------------------

/// Writes the ten channels as float32 GeoTIFFs named after kChannelNames,
/// plus degenerate.tif with the zero-denominator flags.
inline void write_feature_stack(const FeatureStack& st, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < kChannelCount; ++k) {
    const auto& ch = st.channels[k];
    auto out = make_like<float>(ch);
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (ch.is_nodata(i)) out.set_nodata(i);
      else out[i] = static_cast<float>(ch[i]);
    }
    save_raster(out, dir / (std::string(kChannelNames[k]) + ".tif"));
  }
  save_raster(st.degenerate, dir / "degenerate.tif");
}

inline FeatureStack prepare_features(const std::array<fs::path, 4>& nrgb, const fs::path& dem) {
  const auto n = load_raster<std::uint8_t>(nrgb[0]);
  const auto r = load_raster<std::uint8_t>(nrgb[1]);
  const auto g = load_raster<std::uint8_t>(nrgb[2]);
  const auto b = load_raster<std::uint8_t>(nrgb[3]);
  const auto e = align_to(load_raster<double>(dem), n);
  return compute_feature_stack(NrgbBands{n, r, g, b}, e);
}

inline std::vector<Polyline> polylines_of(std::span<const LineFeature> lines) {
  std::vector<Polyline> out;
  out.reserve(lines.size());
  for (const auto& f : lines) out.push_back(f.line);
  return out;
}

struct ConnectOutput {
  BasinTile tile;
  ConnectionResult result;
};

template <class P, class E>
ConnectOutput connect_stage(const Raster<P>& probability, const Raster<E>& elevation, std::vector<Polygon> basin,
                            std::span<const LineFeature> reference, const PipelineConfig& cfg) {
  cfg.validate();
  const auto lines = polylines_of(reference);
  ConnectOutput out;
  out.tile = make_basin_tile(probability, elevation, std::move(basin), lines, cfg.buffer_degrees);
  out.result = connect_components(out.tile, cfg.edge_params(), cfg.schedule(), cfg.rounding_threshold);
  return out;
}

inline json connection_summary(const ConnectionResult& r) {
  std::size_t model_cells = 0;
  for (std::size_t i = 0; i < r.rounded.size(); ++i) model_cells += r.rounded[i] != 0 ? 1 : 0;
  json events = json::array();
  for (const auto& e : r.events)
    events.push_back({{"component", e.component},
                      {"iteration", e.iteration},
                      {"cost", e.cost},
                      {"path_cells", e.path.size()}});
  return {{"component_count", r.components.component_count},
          {"rounded_cells", model_cells},
          {"initially_connected_ids", r.initially_connected_ids},
          {"pruned_component_ids", r.pruned_component_ids},
          {"unreachable_component_ids", r.unreachable_component_ids},
          {"added_path_cells", r.added_path_cells.size()},
          {"connections", events}};
}

/// Segments the skeleton (reference cells excluded), joins it to the
/// reference lines, removes cycles and assigns stream order.
template <class E>
WaterNetwork vectorize_stage(const Mask& skeleton, const Raster<E>& elevation, std::span<const LineFeature> reference) {
  const auto lines = polylines_of(reference);
  const Mask ref_cells = burn_polylines(skeleton, std::span<const Polyline>(lines));
  Mask model = skeleton;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (ref_cells[i] != 0) model[i] = 0;
  auto net = extract_segments(model);
  assign_elevations(net, align_to(elevation, skeleton));
  const auto attached = attach_to_reference(net, reference_network(reference));
  return assign_strahler(remove_cycles(attached), existing_orders(reference));
}

inline void write_length_csv(const LengthTable& table, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_length_csv(table, out);
}

inline json length_table_json(const LengthTable& table) {
  json rows = json::array();
  for (const auto& [key, km] : table)
    rows.push_back({{"origin", to_string(key.first)}, {"strahler", key.second}, {"total_km", km}});
  return rows;
}

inline Mask round_probability(const FloatRaster& prob, double threshold) {
  Mask out = make_like<std::uint8_t>(prob);
  for (std::size_t i = 0; i < prob.size(); ++i)
    out[i] = prob.valid(i) && static_cast<double>(prob[i]) >= threshold ? 1 : 0;
  return out;
}

// ---- manifest and runner ---------------------------------------------------

struct BasinInputs {
  std::string id;
  fs::path probability;
  fs::path dem;
  fs::path basin;
  fs::path reference;
  std::optional<std::array<fs::path, 4>> nrgb;
  std::optional<fs::path> lakes;
  std::optional<fs::path> truth;
  std::optional<fs::path> fcodes;

  [[nodiscard]] std::vector<fs::path> all_paths() const {
    std::vector<fs::path> v{probability, dem, basin, reference};
    if (nrgb) v.insert(v.end(), nrgb->begin(), nrgb->end());
    for (const auto& p : {lakes, truth, fcodes})
      if (p) v.push_back(*p);
    return v;
  }
};

/// Manifest layout:
///   {"basins": [{"id": "...", "prob": "...", "dem": "...", "basin": "...",
///                "reference": "...", "nrgb": [n, r, g, b], "lakes": "...",
///                "truth": "...", "fcodes": "..."}]}
/// nrgb, lakes, truth and fcodes are optional. Relative paths are resolved
/// against the manifest's directory.
inline std::vector<BasinInputs> parse_manifest(const json& doc, const fs::path& base) {
  try {
    std::vector<BasinInputs> out;
    auto path = [&](const json& v) {
      fs::path p = v.get<std::string>();
      return p.is_absolute() ? p : base / p;
    };
    for (const auto& b : doc.at("basins")) {
      BasinInputs in;
      in.id = b.at("id").get<std::string>();
      if (in.id.empty() || in.id.find_first_of("/\\") != std::string::npos || in.id == "." || in.id == "..")
        throw FormatError("bad basin id '" + in.id + "'");
      in.probability = path(b.at("prob"));
      in.dem = path(b.at("dem"));
      in.basin = path(b.at("basin"));
      in.reference = path(b.at("reference"));
      if (b.contains("nrgb")) {
        const auto& a = b.at("nrgb");
        if (!a.is_array() || a.size() != 4) throw FormatError("nrgb needs four paths");
        in.nrgb = std::array<fs::path, 4>{path(a[0]), path(a[1]), path(a[2]), path(a[3])};
      }
      if (b.contains("lakes")) in.lakes = path(b.at("lakes"));
      if (b.contains("truth")) in.truth = path(b.at("truth"));
      if (b.contains("fcodes")) in.fcodes = path(b.at("fcodes"));
      out.push_back(std::move(in));
    }
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t k = i + 1; k < out.size(); ++k)
        if (out[i].id == out[k].id) throw FormatError("duplicate basin id '" + out[i].id + "'");
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  } catch (const FormatError& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

inline std::vector<BasinInputs> load_manifest(const fs::path& path) {
  return parse_manifest(read_json_file(path), path.parent_path());
}

namespace pipeline_detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace pipeline_detail

/// Runs every stage for one basin, writing into `dir`:
///   features/          (only with nrgb inputs)
///   connected.tif, reference_mask.tif, connected.json
///   skeleton.tif, network.geojson, lengths.csv, evaluation.json (with truth)
/// Returns the basin's report entry.
inline json run_basin(const BasinInputs& in, const PipelineConfig& cfg, const fs::path& dir) {
  pipeline_detail::Stopwatch clock;
  json timings = json::object();
  fs::create_directories(dir);

  if (in.nrgb) {
    write_feature_stack(prepare_features(*in.nrgb, in.dem), dir / "features");
    timings["prepare_features"] = clock.lap();
  }

  const auto prob = load_raster<float>(in.probability);
  const auto dem = load_raster<double>(in.dem);
  const auto reference = read_lines(in.reference);
  auto conn = connect_stage(prob, align_to(dem, prob), read_polygons(in.basin), reference, cfg);
  save_raster(conn.result.connected_mask, dir / "connected.tif");
  save_raster(conn.tile.reference_mask, dir / "reference_mask.tif");
  const json summary = connection_summary(conn.result);
  write_json_file(summary, dir / "connected.json");
  timings["connect"] = clock.lap();

  const Mask skeleton = thin(conn.result.connected_mask, conn.tile.elevation, conn.tile.reference_mask);
  save_raster(skeleton, dir / "skeleton.tif");
  timings["thin"] = clock.lap();

  const auto net = vectorize_stage(skeleton, conn.tile.elevation, reference);
  write_json_file(network_to_geojson(net), dir / "network.geojson");
  timings["vectorize"] = clock.lap();

  std::vector<Polygon> lakes;
  if (in.lakes) lakes = read_polygons(*in.lakes);
  const auto table = length_stats(net, lakes);
  write_length_csv(table, dir / "lengths.csv");
  timings["stats"] = clock.lap();

  double added_km = 0.0;
  for (const auto& [key, km] : table)
    if (key.first == Origin::model) added_km += km;
  std::size_t model_segments = 0;
  for (const auto& s : net.segments) model_segments += s.origin == Origin::model ? 1 : 0;

  json report = {{"id", in.id},
                 {"status", "ok"},
                 {"pruned_component_count", conn.result.pruned_component_ids.size()},
                 {"unreachable_component_count", conn.result.unreachable_component_ids.size()},
                 {"component_count", conn.result.components.component_count},
                 {"added_path_cells", conn.result.added_path_cells.size()},
                 {"model_segments", model_segments},
                 {"reference_segments", net.segments.size() - model_segments},
                 {"detached_segment_ids", net.detached_segment_ids},
                 {"dropped_segment_ids", net.dropped_segment_ids},
                 {"added_length_km", added_km},
                 {"lengths_km", length_table_json(table)}};

  if (in.truth) {
    const auto truth = load_raster<std::uint8_t>(*in.truth);
    const Mask pred = round_probability(align_to(prob, truth), cfg.rounding_threshold);
    std::optional<LabelRaster> fcodes;
    if (in.fcodes) fcodes = align_to(load_raster<std::int32_t>(*in.fcodes), truth);
    const auto ev = evaluate(pred, truth, fcodes ? &*fcodes : nullptr, cfg.masked_fcodes, cfg.tolerant_adjacency);
    write_json_file(ev.to_json(), dir / "evaluation.json");
    report["evaluation"] = ev.to_json();
    timings["evaluate"] = clock.lap();
  }
  report["timings_s"] = timings;
  return report;
}

/// run_basin with failures turned into a report entry.
inline json run_basin_isolated(const BasinInputs& in, const PipelineConfig& cfg, const fs::path& dir) {
  for (const auto& p : in.all_paths()) {
    std::error_code ec;
    if (!fs::exists(p, ec))
      return {{"id", in.id}, {"status", "failed: missing input"}, {"error", "missing " + p.string()}};
  }
  try {
    return run_basin(in, cfg, dir);
  } catch (const std::exception& e) {
    return {{"id", in.id}, {"status", "failed: error"}, {"error", e.what()}};
  }
}

inline json config_json(const PipelineConfig& cfg) {
  return {{"buffer_degrees", cfg.buffer_degrees},
          {"prob_floor", cfg.prob_floor},
          {"prob_ceil", cfg.prob_ceil},
          {"slope_coefficient_b", cfg.slope_coefficient_b},
          {"rounding_threshold", cfg.rounding_threshold},
          {"max_iterations", cfg.max_iterations},
          {"base_cost", cfg.base_cost},
          {"masked_fcodes", cfg.masked_fcodes},
          {"worker_count", cfg.worker_count},
          {"tolerant_adjacency", cfg.tolerant_adjacency == Connectivity::four ? 4 : 8}};
}

/// Processes basins on up to cfg.worker_count threads, each basin into
/// <out_dir>/<id>/. Writes and returns run_report.json. Report entries follow
/// manifest order.
inline json run_pipeline(const PipelineConfig& cfg, const std::vector<BasinInputs>& basins, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  std::vector<json> entries(basins.size());
  std::atomic<std::size_t> next{0};
  {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.worker_count),
                                               std::max<std::size_t>(1, basins.size()));
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < basins.size(); i = next++)
          entries[i] = run_basin_isolated(basins[i], cfg, out_dir / basins[i].id);
      });
  }
  std::size_t ok = 0;
  for (const auto& e : entries) ok += e.at("status") == "ok" ? 1 : 0;
  json report = {{"config", config_json(cfg)},
                 {"basin_count", basins.size()},
                 {"succeeded", ok},
                 {"failed", basins.size() - ok},
                 {"basins", entries}};
  write_json_file(report, out_dir / "run_report.json");
  return report;
}

inline json run_pipeline(const PipelineConfig& cfg, const fs::path& manifest, const fs::path& out_dir) {
  return run_pipeline(cfg, load_manifest(manifest), out_dir);
}

}  // namespace hydrovec
