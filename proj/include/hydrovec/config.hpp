#pragma once

// Pipeline settings and the flat config file format:
//
//   # comment
//   key = value
//
// One setting per line; blank lines and text after '#' are ignored.
// masked_fcodes takes a comma-separated list of integers. Unknown keys are
// rejected.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "hydrovec/components.hpp"
#include "hydrovec/connector.hpp"
#include "hydrovec/error.hpp"
#include "hydrovec/fcodes.hpp"

namespace hydrovec {

struct PipelineConfig {
  double buffer_degrees = 0.005;
  double prob_floor = 0.1;
  double prob_ceil = 0.5;
  double slope_coefficient_b = 1.0;
  double rounding_threshold = 0.5;
  int max_iterations = 6;
  double base_cost = 64.0;
  std::set<std::int32_t> masked_fcodes = default_masked_fcodes();
  int worker_count = 1;
  /// Neighborhood used by the thickness-tolerant scores.
  Connectivity tolerant_adjacency = Connectivity::eight;

  [[nodiscard]] EdgeWeightParams edge_params() const { return {prob_floor, prob_ceil, slope_coefficient_b}; }
  [[nodiscard]] SearchSchedule schedule() const { return {base_cost, max_iterations}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw InputError(std::string("config: ") + name + " must be positive");
    };
    positive(buffer_degrees, "buffer_degrees");
    positive(prob_floor, "prob_floor");
    positive(prob_ceil, "prob_ceil");
    positive(slope_coefficient_b, "slope_coefficient_b");
    positive(rounding_threshold, "rounding_threshold");
    positive(base_cost, "base_cost");
    if (max_iterations < 1) throw InputError("config: max_iterations must be positive");
    if (worker_count < 1) throw InputError("config: worker_count must be positive");
    if (!(prob_floor < rounding_threshold && rounding_threshold <= prob_ceil && prob_ceil <= 1.0))
      throw InputError("config: need prob_floor < rounding_threshold <= prob_ceil <= 1");
    edge_params().validate();
    schedule().validate();
  }
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || p != end) throw InputError("config: bad value for " + std::string(key));
  return v;
}

}  // namespace config_detail

/// Applies one `key = value` setting.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  using config_detail::parse_number;
  using config_detail::trim;
  key = trim(key);
  value = trim(value);
  if (key == "buffer_degrees") cfg.buffer_degrees = parse_number<double>(value, key);
  else if (key == "prob_floor") cfg.prob_floor = parse_number<double>(value, key);
  else if (key == "prob_ceil") cfg.prob_ceil = parse_number<double>(value, key);
  else if (key == "slope_coefficient_b") cfg.slope_coefficient_b = parse_number<double>(value, key);
  else if (key == "rounding_threshold") cfg.rounding_threshold = parse_number<double>(value, key);
  else if (key == "max_iterations") cfg.max_iterations = parse_number<int>(value, key);
  else if (key == "base_cost") cfg.base_cost = parse_number<double>(value, key);
  else if (key == "worker_count") cfg.worker_count = parse_number<int>(value, key);
  else if (key == "tolerant_adjacency") {
    const int k = parse_number<int>(value, key);
    if (k != 4 && k != 8) throw InputError("config: tolerant_adjacency must be 4 or 8");
    cfg.tolerant_adjacency = k == 4 ? Connectivity::four : Connectivity::eight;
  } else if (key == "masked_fcodes") {
    cfg.masked_fcodes.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const auto item = trim(value.substr(pos, comma == std::string_view::npos ? value.size() - pos : comma - pos));
      if (!item.empty()) cfg.masked_fcodes.insert(parse_number<std::int32_t>(item, key));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  } else {
    throw InputError("config: unknown key '" + std::string(key) + "'");
  }
}

inline PipelineConfig parse_config(std::string_view text, PipelineConfig cfg = {}) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = config_detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(cfg));
}

}  // namespace hydrovec
