// Copyright 2026 The agent_driver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "agent_driver/errors.hpp"
#include "agent_driver/trajectory_codec.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace agent_driver::reasoning
{
namespace
{

Trajectory ramp()
{
  Trajectory t;
  for (std::size_t i = 0; i < kHorizonSteps; ++i) {
    t.points[i] = {-0.001 * static_cast<double>(i), 1.234 * static_cast<double>(i + 1)};
  }
  return t;
}

TEST(Codec, EncodesTwoDecimalsWithoutNegativeZero)
{
  EXPECT_EQ(encode_trajectory(ramp()),
    "(0.00,1.23), (0.00,2.47), (0.00,3.70), (0.00,4.94), (0.00,6.17), (-0.01,7.40)");
}

TEST(Codec, RoundTripWithinHalfCentimeter)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    Trajectory t;
    for (auto & p : t.points) {
      p = {u(rng), u(rng)};
    }
    const auto back = decode_trajectory(encode_trajectory(t));
    for (std::size_t k = 0; k < kHorizonSteps; ++k) {
      EXPECT_LE(std::abs(back.points[k].x - t.points[k].x), 0.005 + 1e-12);
      EXPECT_LE(std::abs(back.points[k].y - t.points[k].y), 0.005 + 1e-12);
    }
  }
}

TEST(Codec, AcceptsWhitespaceAndPlusSigns)
{
  const auto t = decode_trajectory(" ( +1.5 , 2 ),(3,4) (5,6)\n(7,8), (9,10), (-11.25,12)");
  EXPECT_EQ(t.points[0], (Vec2{1.5, 2.0}));
  EXPECT_EQ(t.points[5], (Vec2{-11.25, 12.0}));
}

TEST(Codec, RejectsWrongCountsAndBadTokens)
{
  try {
    decode_trajectory("(1,2), (3,4)");
    FAIL() << "expected DecodeError";
  } catch (const DecodeError & e) {
    EXPECT_EQ(e.pairs_found(), 2u);
  }
  try {
    decode_trajectory("(1,2), (3,4), (5,x), (7,8), (9,10), (11,12)");
    FAIL() << "expected DecodeError";
  } catch (const DecodeError & e) {
    EXPECT_EQ(e.pairs_found(), 5u);
    ASSERT_EQ(e.bad_tokens().size(), 1u);
    EXPECT_EQ(e.bad_tokens()[0], "(5,x)");
  }
  EXPECT_THROW(decode_trajectory("(1,2), (3,4), (5,6), (7,8), (9,10), (11,12), (13,14)"), DecodeError);
  EXPECT_THROW(decode_trajectory("(1,2), (3,4), (5,6), (7,8), (9,10), (11,nan)"), DecodeError);
  EXPECT_THROW(decode_trajectory("(1,2), (3,4), (5,6), (7,8), (9,10), (11,12"), DecodeError);
  EXPECT_THROW(decode_trajectory("(1,2,3), (3,4), (5,6), (7,8), (9,10), (11,12)"), DecodeError);
  EXPECT_THROW(decode_trajectory(""), DecodeError);
}

TEST(Codec, ExtractsTextAfterLastLabel)
{
  EXPECT_EQ(extract_trajectory_text("Thinking... Trajectory: (0,0)\nTrajectory:\n(1,1)"), "\n(1,1)");
  EXPECT_EQ(extract_trajectory_text("(1,1)"), "(1,1)");
}

TEST(PlanGrammar, ThirtyOneDistinctPlans)
{
  const auto plans = all_driving_plans();
  ASSERT_EQ(plans.size(), 31u);
  std::set<std::string> names;
  for (const auto & p : plans) {
    names.insert(p.str());
    ASSERT_EQ(parse_driving_plan(p.str()), p);
  }
  EXPECT_EQ(names.size(), 31u);
  EXPECT_TRUE(names.count("stop"));
  EXPECT_TRUE(names.count("change_lane_to_left_with_quick_deceleration"));
}

TEST(PlanGrammar, RejectsNearMisses)
{
  for (const auto * text : {"stop_with_deceleration", "Stop", "move_forward", "move_forward_with_", "turn_left_with_brake",
         " stop", "move_forward_with_constant_speed ", "stop.", "turn_left_with_deceleration_to_zero_"}) {
    EXPECT_FALSE(parse_driving_plan(text).has_value()) << text;
  }
}

TEST(PlanGrammar, ExtractsLabeledLine)
{
  EXPECT_EQ(extract_plan_text("Reasoning first.\nDriving plan: stop.\n"), "stop");
  EXPECT_EQ(extract_plan_text("Driving plan:\n\n  turn_left_with_deceleration  \nmore"), "turn_left_with_deceleration");
  EXPECT_EQ(extract_plan_text("move_forward_with_acceleration"), "move_forward_with_acceleration");
}

}  // namespace
}  // namespace agent_driver::reasoning
