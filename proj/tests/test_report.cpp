#include <gtest/gtest.h>

#include <cctype>
#include <cmath>

#include "caqr/report.hpp"

using namespace caqr;

namespace {

RunReport sample() {
  RunReport r;
  r.algorithm = "tsqr";
  r.m = 64;
  r.n = 6;
  r.procs = 4;
  r.tree = "binary";
  r.seed = 1;
  r.flops = 12345;
  r.multiplies = 6000;
  r.divisions = 12;
  r.words = 42;
  r.messages = 2;
  r.total_words = 63;
  r.total_messages = 3;
  r.residual = 1.0 / 3.0 * 1e-15;
  r.orthogonality = 2.220446049250313e-16;
  r.set_model(model_par_tsqr(64, 6, 4));
  r.set_bound("reduction-edge", {42, 2});
  r.compute_ratios();
  return r;
}

}  // namespace

TEST(Report, RoundTrip) {
  RunReport r = sample();
  EXPECT_EQ(parse_report(dump_report(r)), r);
  RunReport bare;
  bare.algorithm = "hh";
  bare.m = bare.n = 4;
  EXPECT_EQ(parse_report(dump_report(bare)), bare);
}

TEST(Report, FlatSchemaWithIntegerCounts) {
  nlohmann::json j = to_json(sample());
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["messages"].is_number_integer());
  EXPECT_TRUE(j["words"].is_number_integer());
  EXPECT_TRUE(j["residual"].is_number_float());
  for (auto& [k, v] : j.items()) {
    EXPECT_FALSE(v.is_object() || v.is_array()) << k;
    for (char c : k) EXPECT_TRUE(std::islower(static_cast<unsigned char>(c)) || c == '_' || std::isdigit(c)) << k;
  }
  EXPECT_FALSE(j.contains("fast_memory"));
}

TEST(Report, RatiosOnlyForPositiveDenominators) {
  RunReport r;
  r.words = 10;
  r.messages = 0;
  r.set_model({"x", 0, 5, 0, std::nullopt});
  r.set_bound("y", {0, 0});
  r.compute_ratios();
  ASSERT_TRUE(r.ratio_words_model.has_value());
  EXPECT_DOUBLE_EQ(*r.ratio_words_model, 2);
  EXPECT_FALSE(r.ratio_messages_model.has_value());
  EXPECT_FALSE(r.ratio_words_bound.has_value());
}

TEST(Report, RejectsOtherSchemas) {
  EXPECT_THROW(parse_report("{\"schema_version\": 2}"), std::runtime_error);
  EXPECT_THROW(parse_report("[]"), std::runtime_error);
}
