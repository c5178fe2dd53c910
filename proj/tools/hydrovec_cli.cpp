// hydrovec command line: one subcommand per pipeline stage plus `run` for
// whole manifests and `synth` for the synthetic fixture.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydrovec.hpp"

namespace fs = std::filesystem;
using namespace hydrovec;

namespace {

void log_event(const json& event) { std::cerr << event.dump() << '\n'; }

struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> settings;
  std::optional<double> b, prob_floor, prob_ceil, buffer, rounding, base_cost;
  std::optional<int> max_iters, workers;

  void add_to(CLI::App* app, bool with_workers = false) {
    app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--set", settings, "override one setting, key=value");
    app->add_option("--b", b, "slope coefficient of the uphill edge weight");
    app->add_option("--prob-floor", prob_floor);
    app->add_option("--prob-ceil", prob_ceil);
    app->add_option("--buffer", buffer, "basin buffer in degrees");
    app->add_option("--rounding", rounding, "probability rounding threshold");
    app->add_option("--max-iters", max_iters);
    app->add_option("--base-cost", base_cost);
    if (with_workers) app->add_option("--workers", workers);
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_file.empty()) cfg = load_config(config_file);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InputError("--set expects key=value");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (b) cfg.slope_coefficient_b = *b;
    if (prob_floor) cfg.prob_floor = *prob_floor;
    if (prob_ceil) cfg.prob_ceil = *prob_ceil;
    if (buffer) cfg.buffer_degrees = *buffer;
    if (rounding) cfg.rounding_threshold = *rounding;
    if (base_cost) cfg.base_cost = *base_cost;
    if (max_iters) cfg.max_iterations = *max_iters;
    if (workers) cfg.worker_count = *workers;
    cfg.validate();
    return cfg;
  }
};

std::set<std::int32_t> read_code_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::set<std::int32_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size()) throw FormatError("bad fcode '" + tok + "' in " + path.string());
      out.insert(static_cast<std::int32_t>(v));
    }
  }
  return out;
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raster-to-vector waterway network builder"};
  app.require_subcommand(1);

  // prepare-features
  auto* prep = app.add_subcommand("prepare-features", "build the 10 model input channels");
  std::vector<std::string> nrgb;
  std::string prep_dem, prep_out;
  prep->add_option("--nrgb", nrgb, "N R G B byte rasters")->expected(4)->required()->check(CLI::ExistingFile);
  prep->add_option("--dem", prep_dem)->required()->check(CLI::ExistingFile);
  prep->add_option("--out", prep_out, "output directory")->required();

  // connect
  auto* conn = app.add_subcommand("connect", "clip, prune and connect model waterways");
  std::string c_prob, c_dem, c_basin, c_ref, c_out;
  ConfigFlags c_cfg;
  conn->add_option("--prob", c_prob)->required()->check(CLI::ExistingFile);
  conn->add_option("--dem", c_dem)->required()->check(CLI::ExistingFile);
  conn->add_option("--basin", c_basin)->required()->check(CLI::ExistingFile);
  conn->add_option("--reference", c_ref)->required()->check(CLI::ExistingFile);
  conn->add_option("--out", c_out, "connected mask GeoTIFF")->required();
  c_cfg.add_to(conn);

  // thin
  auto* thn = app.add_subcommand("thin", "thin the connected mask to a skeleton");
  std::string t_conn, t_dem, t_ref, t_out;
  thn->add_option("--connected", t_conn)->required()->check(CLI::ExistingFile);
  thn->add_option("--dem", t_dem)->required()->check(CLI::ExistingFile);
  thn->add_option("--reference-mask", t_ref)->required()->check(CLI::ExistingFile);
  thn->add_option("--out", t_out)->required();

  // vectorize
  auto* vec = app.add_subcommand("vectorize", "skeleton to stream-ordered network");
  std::string v_skel, v_dem, v_ref, v_out;
  vec->add_option("--skeleton", v_skel)->required()->check(CLI::ExistingFile);
  vec->add_option("--dem", v_dem)->required()->check(CLI::ExistingFile);
  vec->add_option("--reference", v_ref)->required()->check(CLI::ExistingFile);
  vec->add_option("--out", v_out)->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "pixel, tolerant and mask-aware scores");
  std::string e_pred, e_truth, e_fcodes, e_masked, e_out;
  int e_adj = 8;
  double e_threshold = 0.5;
  ev->add_option("--pred", e_pred, "prediction mask or probability raster")->required()->check(CLI::ExistingFile);
  ev->add_option("--truth", e_truth)->required()->check(CLI::ExistingFile);
  ev->add_option("--fcodes", e_fcodes)->check(CLI::ExistingFile);
  ev->add_option("--masked-list", e_masked, "fcodes to exclude")->check(CLI::ExistingFile);
  ev->add_option("--adjacency", e_adj, "4 or 8")->check(CLI::IsMember({4, 8}));
  ev->add_option("--threshold", e_threshold, "rounding threshold for the prediction");
  ev->add_option("--out", e_out)->required();

  // stats
  auto* st = app.add_subcommand("stats", "length totals by origin and stream order");
  std::string s_net, s_lakes, s_out;
  st->add_option("--network", s_net)->required()->check(CLI::ExistingFile);
  st->add_option("--lakes", s_lakes)->check(CLI::ExistingFile);
  st->add_option("--out", s_out)->required();

  // run
  auto* run = app.add_subcommand("run", "full pipeline over a basin manifest");
  std::string r_manifest, r_out;
  ConfigFlags r_cfg;
  run->add_option("--manifest", r_manifest)->required()->check(CLI::ExistingFile);
  run->add_option("--out", r_out)->required();
  r_cfg.add_to(run, true);

  // synth
  auto* syn = app.add_subcommand("synth", "write the synthetic basin fixture");
  std::string y_out;
  std::size_t y_size = 256;
  std::uint32_t y_seed = 7;
  syn->add_option("--out", y_out)->required();
  syn->add_option("--size", y_size);
  syn->add_option("--seed", y_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep) {
      const auto stack = prepare_features({nrgb[0], nrgb[1], nrgb[2], nrgb[3]}, prep_dem);
      write_feature_stack(stack, prep_out);
      log_event({{"event", "prepare-features"}, {"out", prep_out}, {"channels", kChannelCount}});
    } else if (*conn) {
      const auto cfg = c_cfg.resolve();
      const auto prob = load_raster<float>(c_prob);
      const auto dem = align_to(load_raster<double>(c_dem), prob);
      const auto out = connect_stage(prob, dem, read_polygons(c_basin), read_lines(c_ref), cfg);
      const fs::path path = c_out;
      save_raster(out.result.connected_mask, path);
      save_raster(out.tile.reference_mask, sibling(path, ".reference.tif"));
      const auto summary = connection_summary(out.result);
      write_json_file(summary, sibling(path, ".json"));
      log_event({{"event", "connect"},
                 {"out", c_out},
                 {"pruned", summary["pruned_component_ids"].size()},
                 {"unreachable", summary["unreachable_component_ids"].size()},
                 {"added_path_cells", summary["added_path_cells"]}});
    } else if (*thn) {
      const auto mask = load_raster<std::uint8_t>(t_conn);
      const auto ref = load_raster<std::uint8_t>(t_ref);
      const auto dem = align_to(load_raster<double>(t_dem), mask);
      save_raster(thin(mask, dem, ref), t_out);
      log_event({{"event", "thin"}, {"out", t_out}});
    } else if (*vec) {
      const auto skel = load_raster<std::uint8_t>(v_skel);
      const auto dem = load_raster<double>(v_dem);
      const auto net = vectorize_stage(skel, dem, read_lines(v_ref));
      write_json_file(network_to_geojson(net), v_out);
      log_event({{"event", "vectorize"},
                 {"out", v_out},
                 {"segments", net.segments.size()},
                 {"dropped", net.dropped_segment_ids.size()},
                 {"detached", net.detached_segment_ids.size()}});
    } else if (*ev) {
      const auto truth = load_raster<std::uint8_t>(e_truth);
      const auto pred = round_probability(align_to(load_raster<float>(e_pred), truth), e_threshold);
      std::optional<LabelRaster> fcodes;
      if (!e_fcodes.empty()) fcodes = align_to(load_raster<std::int32_t>(e_fcodes), truth);
      const auto masked = e_masked.empty() ? default_masked_fcodes() : read_code_list(e_masked);
      const auto rep = evaluate(pred, truth, fcodes ? &*fcodes : nullptr, masked,
                                e_adj == 4 ? Connectivity::four : Connectivity::eight);
      write_json_file(rep.to_json(), e_out);
      log_event({{"event", "evaluate"}, {"out", e_out}, {"f1", rep.standard.f1}, {"f1_star", rep.tolerant.f1}});
    } else if (*st) {
      const auto net = network_from_geojson(read_json_file(s_net));
      std::vector<Polygon> lakes;
      if (!s_lakes.empty()) lakes = read_polygons(s_lakes);
      write_length_csv(length_stats(net, lakes), fs::path(s_out));
      log_event({{"event", "stats"}, {"out", s_out}});
    } else if (*run) {
      const auto cfg = r_cfg.resolve();
      const auto report = run_pipeline(cfg, fs::path(r_manifest), fs::path(r_out));
      for (const auto& b : report["basins"])
        log_event({{"event", "basin"}, {"id", b["id"]}, {"status", b["status"]}});
      return report["failed"].get<std::size_t>() == 0 ? 0 : 1;
    } else if (*syn) {
      const auto path = write_synthetic_basin(make_synthetic_basin(y_size, y_seed), y_out);
      log_event({{"event", "synth"}, {"manifest", path.string()}});
    }
  } catch (const std::exception& e) {
    log_event({{"event", "error"}, {"message", e.what()}});
    return 1;
  }
  return 0;
}
