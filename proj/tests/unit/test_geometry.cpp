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
#include "agent_driver/geometry.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace agent_driver
{
namespace
{

TEST(RectRegion, BoundsAreInclusive)
{
  const auto rect = ego_frame_rect(-1.0, 1.0, 0.0, 2.0);
  EXPECT_TRUE(rect.contains({-1.0, 0.0}));
  EXPECT_TRUE(rect.contains({1.0, 2.0}));
  EXPECT_FALSE(rect.contains({1.0 + 1e-12, 1.0}));
}

TEST(RectRegion, DegenerateBoundsThrow)
{
  EXPECT_THROW(ego_frame_rect(1.0, 1.0, 0.0, 2.0), DegenerateRange);
  EXPECT_THROW(ego_frame_rect(0.0, 1.0, 3.0, 2.0), DegenerateRange);
  EXPECT_THROW(ego_frame_rect(std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0, 2.0), DegenerateRange);
}

TEST(Trajectory, FromPointsNeedsSixFinitePoints)
{
  std::vector<Vec2> pts(6, Vec2{0.0, 1.0});
  EXPECT_NO_THROW(Trajectory::from_points(pts));
  pts.pop_back();
  EXPECT_THROW(Trajectory::from_points(pts), ValidationError);
  pts.push_back({std::numeric_limits<double>::infinity(), 0.0});
  EXPECT_THROW(Trajectory::from_points(pts), ValidationError);
}

TEST(OrientedBox, ContainsRespectsHeading)
{
  const OrientedBox forward{{0.0, 0.0}, kForwardHeading, 4.0, 2.0};
  EXPECT_TRUE(forward.contains({0.0, 1.9}));
  EXPECT_FALSE(forward.contains({1.9, 0.0}));
  const OrientedBox sideways{{0.0, 0.0}, 0.0, 4.0, 2.0};
  EXPECT_TRUE(sideways.contains({1.9, 0.0}));
  EXPECT_FALSE(sideways.contains({0.0, 1.9}));
}

TEST(OrientedBox, AabbIntersectionMatchesSampling)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 500; ++i) {
    const OrientedBox box{{u(rng), u(rng)}, angle(rng), 2.0 + u(rng) / 3.0 + 1.0, 1.0 + u(rng) / 6.0 + 0.5};
    const Vec2 lo{u(rng), u(rng)};
    const Vec2 hi{lo.x + 0.5, lo.y + 0.5};
    // Dense sampling of the square finds any overlap larger than the grid pitch.
    bool sampled = false;
    for (int a = 0; a <= 20 && !sampled; ++a) {
      for (int b = 0; b <= 20 && !sampled; ++b) {
        sampled = box.contains({lo.x + 0.5 * a / 20.0, lo.y + 0.5 * b / 20.0});
      }
    }
    if (sampled) {
      EXPECT_TRUE(box.intersects_aabb(lo, hi));
    }
    Vec2 bmin;
    Vec2 bmax;
    box.bounds(bmin, bmax);
    if (hi.x < bmin.x || lo.x > bmax.x || hi.y < bmin.y || lo.y > bmax.y) {
      EXPECT_FALSE(box.intersects_aabb(lo, hi));
    }
  }
}

TEST(WaypointHeadings, FollowsSegmentsAndHoldsOnStops)
{
  Trajectory traj;
  traj.points = {{{0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 2.0}, {1.0, 2.0}, {0.0, 2.0}}};
  const auto h = waypoint_headings(traj);
  EXPECT_DOUBLE_EQ(h[0], kForwardHeading);
  EXPECT_DOUBLE_EQ(h[1], 0.0);
  EXPECT_DOUBLE_EQ(h[2], 0.0);
  EXPECT_DOUBLE_EQ(h[3], kForwardHeading);
  EXPECT_DOUBLE_EQ(h[4], kForwardHeading);
  EXPECT_DOUBLE_EQ(h[5], std::numbers::pi);
}

TEST(WrapAngle, MapsIntoHalfOpenInterval)
{
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(0.25), 0.25, 1e-15);
}

}  // namespace
}  // namespace agent_driver
