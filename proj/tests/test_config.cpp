#include <gtest/gtest.h>

#include "hydrovec/config.hpp"

using namespace hydrovec;

TEST(Config, Defaults) {
  const PipelineConfig cfg;
  EXPECT_EQ(cfg.buffer_degrees, 0.005);
  EXPECT_EQ(cfg.prob_floor, 0.1);
  EXPECT_EQ(cfg.prob_ceil, 0.5);
  EXPECT_EQ(cfg.slope_coefficient_b, 1.0);
  EXPECT_EQ(cfg.max_iterations, 6);
  EXPECT_EQ(cfg.schedule().budget(0), 64.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesKeyValueText) {
  const auto cfg = parse_config(R"(
# comment
prob_floor = 0.2
slope_coefficient_b=2.5   # trailing comment
masked_fcodes = 46600, 33600
tolerant_adjacency = 4
)");
  EXPECT_EQ(cfg.prob_floor, 0.2);
  EXPECT_EQ(cfg.slope_coefficient_b, 2.5);
  EXPECT_EQ(cfg.masked_fcodes, (std::set<std::int32_t>{33600, 46600}));
  EXPECT_EQ(cfg.tolerant_adjacency, Connectivity::four);
  EXPECT_EQ(cfg.prob_ceil, 0.5);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("colour = blue"), InputError);
  EXPECT_THROW(parse_config("prob_floor"), InputError);
  EXPECT_THROW(parse_config("prob_floor = abc"), InputError);
  EXPECT_THROW(parse_config("tolerant_adjacency = 6"), InputError);
  EXPECT_THROW(load_config("/nonexistent/hydrovec.conf"), IoError);
  auto cfg = parse_config("prob_floor = 0.6");
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = parse_config("slope_coefficient_b = -1");
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = parse_config("rounding_threshold = 0.7");
  EXPECT_THROW(cfg.validate(), InputError);
}
