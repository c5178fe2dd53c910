#pragma once

// NHD waterway type codes with their training weights. A weight of 0 marks
// non-waterways, weights strictly between 0 and 1 were masked in training,
// and weights >= 1 scale a positive pixel's loss.

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <string_view>

namespace hydrovec {

struct FcodeLabel {
  std::int32_t code;
  std::string_view description;
  double training_weight;

  [[nodiscard]] constexpr bool masked_in_training() const {
    return training_weight > 0.0 && training_weight < 1.0;
  }
};

inline constexpr std::array<FcodeLabel, 20> kFcodeCatalog = {{
    {33600, "Canal/Ditch", 0.5},
    {33601, "Canal/Ditch: Aqueduct", 1.0},
    {33603, "Canal/Ditch: Stormwater", 0.5},
    {36100, "Playa", 0.0},
    {39000, "Lake/Pond", 7.0},
    {39001, "Lake/Pond: Intermittent", 0.5},
    {39004, "Lake/Pond: Perennial", 7.0},
    {40300, "Inundation Area", 0.0},
    {43600, "Reservoir", 2.0},
    {45500, "Spillway", 0.0},
    {46000, "Stream/River", 6.5},
    {46003, "Stream/River: Intermittent", 7.5},
    {46006, "Stream/River: Perennial", 6.5},
    {46007, "Stream/River: Ephemeral", 7.5},
    {46600, "Swamp/Marsh", 0.5},
    {46601, "Swamp/Marsh: Intermittent", 0.5},
    {46602, "Swamp/Marsh: Perennial", 0.5},
    {46800, "Drainageway", 0.5},
    {48400, "Wash", 0.5},
    {55800, "Artificial Path", 1.0},
}};

/// Weight applied to codes missing from the catalog.
inline constexpr double kOtherFcodeWeight = 1.0;

inline const FcodeLabel* find_fcode(std::int32_t code) {
  auto it = std::find_if(kFcodeCatalog.begin(), kFcodeCatalog.end(),
                         [code](const FcodeLabel& f) { return f.code == code; });
  return it == kFcodeCatalog.end() ? nullptr : &*it;
}

inline std::string_view fcode_description(std::int32_t code) {
  const auto* f = find_fcode(code);
  return f ? f->description : std::string_view{"Unknown"};
}

inline double fcode_weight(std::int32_t code) {
  const auto* f = find_fcode(code);
  return f ? f->training_weight : kOtherFcodeWeight;
}

/// Swamps, canals and ditches, drainageways, intermittent lakes and playas.
inline std::set<std::int32_t> default_masked_fcodes() {
  return {33600, 33601, 33603, 36100, 39001, 46600, 46601, 46602, 46800};
}

}  // namespace hydrovec
