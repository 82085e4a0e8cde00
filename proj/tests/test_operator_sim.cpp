#include <gtest/gtest.h>

#include "asdp/operator_sim.hpp"

namespace asdp::opsim {
namespace {

TEST(Translation, ExactIterationDisplacesByTranslation) {
  Options o;
  o.iterations = 3;
  o.trace_every = 1;
  auto r = run_translation(ErrorSchedule::Zero, o);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_LE(r.trace.front().error, 1e-15);
  EXPECT_NEAR(r.trace.front().step_norm, r.target.norm(), 1e-15);
  EXPECT_NEAR(r.target(0), 1.0, 0);
  EXPECT_NEAR(r.target(1), -2.0, 0);
  EXPECT_NEAR(r.target(2), 0.5, 0);
  ASSERT_TRUE(r.passed.has_value());
  EXPECT_TRUE(*r.passed);
}

TEST(Translation, SummableErrorsStillRecoverDisplacement) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Options o;
    o.seed = seed;
    auto r = run_translation(ErrorSchedule::Summable, o);
    EXPECT_LE(r.final_error, 1e-3) << "seed " << seed;
    ASSERT_TRUE(r.passed.has_value());
    EXPECT_TRUE(*r.passed);
  }
}

TEST(Translation, NonsummableScheduleHasNoVerdict) {
  Options o;
  o.iterations = 500;
  auto r = run_translation(ErrorSchedule::Nonsummable, o);
  EXPECT_FALSE(r.passed.has_value());
  EXPECT_TRUE(std::isfinite(r.final_error));
}

TEST(RotationTranslation, DisplacementConvergesToVerticalHalf) {
  for (auto schedule : {ErrorSchedule::Zero, ErrorSchedule::Summable}) {
    Options o;
    auto r = run_rotation_translation(schedule, o);
    EXPECT_NEAR(r.target(0), 0.0, 0);
    EXPECT_NEAR(r.target(1), 0.0, 0);
    EXPECT_NEAR(r.target(2), 0.5, 1e-15);
    EXPECT_LE(r.final_error, 1e-3) << to_string(schedule);
  }
}

TEST(Schedule, ParsesNames) {
  EXPECT_EQ(parse_schedule("summable"), ErrorSchedule::Summable);
  EXPECT_EQ(parse_schedule("zero"), ErrorSchedule::Zero);
  EXPECT_FALSE(parse_schedule("sometimes").has_value());
}

TEST(AdmmEquivalence, OperatorIdentitiesHold) {
  auto r = run_admm_equivalence(100, 3);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_violation, 1e-10);
  EXPECT_EQ(r.trace.size(), 100u);
}

TEST(Trace, CsvHasHeaderAndRows) {
  Options o;
  o.iterations = 200;
  o.trace_every = 100;
  const std::string csv = trace_csv(run_translation(ErrorSchedule::Zero, o));
  EXPECT_EQ(csv.rfind("# scenario=translation", 0), 0u);
  EXPECT_NE(csv.find("\nk,error,step_norm\n"), std::string::npos);
  EXPECT_GE(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace asdp::opsim
