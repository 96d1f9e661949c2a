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
#include "agent_driver/self_reflection.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace agent_driver::reflection
{
namespace
{

using agent_driver::testing::empty_scene;

Trajectory straight(double step = 2.0)
{
  Trajectory t;
  for (std::size_t i = 0; i < kHorizonSteps; ++i) {
    t.points[i] = {0.0, step * static_cast<double>(i + 1)};
  }
  return t;
}

void occupy_box(scene::OccupancyVolume & occ, const OrientedBox & box, double p = 0.9)
{
  for (std::size_t iy = 0; iy < occ.grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < occ.grid.nx; ++ix) {
      if (box.contains(occ.grid.cell_center(ix, iy))) {
        for (int t = 1; t <= 6; ++t) {
          occ.set(t, ix, iy, p);
        }
      }
    }
  }
}

TEST(Config, DefaultsAndValidation)
{
  const ReflectionConfig cfg;
  EXPECT_NEAR(cfg.amplitude(), 200.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi)), 1e-12);
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.sigma = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = cfg;
  bad.damping = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Cost, ValueGradientHessianAtKnownPoint)
{
  const std::vector<Vec2> obstacles{{1.0, 0.0}};
  const auto c = waypoint_cost({0.0, 0.0}, {0.0, 1.0}, obstacles, 2.0, 1.0);
  const double e = std::exp(-0.5);
  EXPECT_NEAR(c.value, 1.0 + 2.0 * e, 1e-12);
  // d/dp of A exp(-|p-o|^2/2s^2) = -A e (p-o)/s^2 with p-o = (-1, 0).
  EXPECT_NEAR(c.gradient.x, 2.0 * e, 1e-12);
  EXPECT_NEAR(c.gradient.y, -2.0, 1e-12);
  EXPECT_NEAR(c.hessian[0], 2.0 + 2.0 * e * (1.0 - 1.0), 1e-12);
  EXPECT_NEAR(c.hessian[1], 0.0, 1e-12);
  EXPECT_NEAR(c.hessian[2], 2.0 - 2.0 * e, 1e-12);
}

TEST(Rectify, NoObstaclesIsIdentity)
{
  const auto [out, report] = rectify(straight(), ObstaclePointSet{}, ReflectionConfig{});
  EXPECT_EQ(out, straight());
  EXPECT_FALSE(report.optimized);
}

TEST(Rectify, MovesAwayAndDecreasesCost)
{
  const ReflectionConfig cfg;
  const std::vector<Vec2> obstacles{{0.3, 0.0}};
  const auto r = rectify_waypoint({0.0, 0.0}, obstacles, cfg);
  EXPECT_LT(r.final_cost, r.initial_cost);
  EXPECT_LT(r.point.x, -1.0);
  for (std::size_t i = 1; i < r.cost_trace.size(); ++i) {
    EXPECT_LT(r.cost_trace[i], r.cost_trace[i - 1]);
  }
}

TEST(Rectify, ExactlyOnObstacleIsNudged)
{
  const ReflectionConfig cfg;
  const std::vector<Vec2> obstacles{{0.0, 5.0}};
  const auto r = rectify_waypoint({0.0, 5.0}, obstacles, cfg);
  EXPECT_GT((r.point - Vec2{0.0, 5.0}).norm(), 1.0);
  EXPECT_LT(r.final_cost, r.initial_cost);
}

TEST(Rectify, NeverWorseThanAnchor)
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const ReflectionConfig cfg;
  for (int i = 0; i < 200; ++i) {
    std::vector<Vec2> obstacles;
    for (int k = 0; k < 1 + i % 7; ++k) {
      obstacles.push_back({u(rng), u(rng)});
    }
    const Vec2 anchor{u(rng), u(rng)};
    const auto r = rectify_waypoint(anchor, obstacles, cfg);
    EXPECT_LE(r.final_cost, r.initial_cost);
    EXPECT_NEAR(waypoint_cost(r.point, anchor, obstacles, cfg.amplitude(), cfg.sigma).value, r.final_cost, 1e-9);
  }
}

TEST(Sampling, RadiusThresholdAndCap)
{
  auto snap = empty_scene();
  occupy_box(snap.occupancy, {{0.0, 6.0}, kForwardHeading, 4.0, 2.0});
  ReflectionConfig cfg;
  const auto obstacles = sample_obstacles(snap, straight(), cfg);
  EXPECT_GT(obstacles[2].size(), 0u);
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    for (const auto & o : obstacles[t]) {
      EXPECT_LE((o - straight().points[t]).norm(), cfg.sample_radius);
    }
  }
  cfg.max_obstacles_per_step = 4;
  const auto capped = sample_obstacles(snap, straight(), cfg);
  EXPECT_EQ(capped[2].size(), 4u);
  cfg.threshold = 0.95;
  EXPECT_TRUE(sample_obstacles(snap, straight(), cfg)[2].empty());
}

TEST(Reflect, ClearsABlockingCar)
{
  auto snap = empty_scene();
  occupy_box(snap.occupancy, {{0.0, 8.0}, kForwardHeading, 4.5, 1.9});
  const ReflectionConfig cfg;
  const auto [out, report] = reflect(snap, straight(), cfg);
  EXPECT_TRUE(report.collided_before);
  EXPECT_TRUE(report.optimized);
  EXPECT_FALSE(report.collided_after);
  EXPECT_FALSE(collision_check(snap, out, cfg).collides);
  EXPECT_LT(report.total_cost_final, report.total_cost_initial);
  const auto j = to_json(report);
  EXPECT_TRUE(j.contains("step_max_after"));
  EXPECT_TRUE(j.contains("config"));
}

TEST(Reflect, CollisionFreeIsUntouched)
{
  const auto snap = empty_scene();
  const auto [out, report] = reflect(snap, straight(), ReflectionConfig{});
  EXPECT_EQ(out, straight());
  EXPECT_FALSE(report.collided_before);
  EXPECT_FALSE(report.optimized);
}

}  // namespace
}  // namespace agent_driver::reflection
