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
#include "agent_driver/evaluation.hpp"
#include "metrics_golden.hpp"

#include <gtest/gtest.h>

namespace agent_driver::evaluation
{
namespace
{

using agent_driver::testing::golden_deviation;
using agent_driver::testing::load_metrics_golden;

Trajectory forward(double step)
{
  Trajectory t;
  for (std::size_t i = 0; i < kHorizonSteps; ++i) {
    t.points[i] = {0.0, step * static_cast<double>(i + 1)};
  }
  return t;
}

TEST(Evaluation, GoldenReportBothConventions)
{
  const auto golden = load_metrics_golden();
  for (const auto c : {Convention::uniad, Convention::stp3}) {
    const auto r = report(golden.samples, c);
    EXPECT_LE(golden_deviation(r, golden.expected.at(std::string(to_string(c)))), 1e-9) << to_string(c);
    EXPECT_EQ(r.samples, 3u);
  }
}

TEST(Evaluation, L2Profile)
{
  auto pred = forward(2.0);
  pred.points[3].x = 3.0;
  pred.points[3].y += 4.0;
  const auto l2 = l2_profile(pred, forward(2.0));
  EXPECT_DOUBLE_EQ(l2[3], 5.0);
  EXPECT_DOUBLE_EQ(l2[0], 0.0);
}

TEST(Evaluation, CategoryMapping)
{
  using scene::ObjectCategory;
  EXPECT_EQ(map_category("car"), ObjectCategory::vehicle);
  EXPECT_EQ(map_category("vehicle.bus.rigid"), ObjectCategory::vehicle);
  EXPECT_EQ(map_category("human.pedestrian.adult"), ObjectCategory::pedestrian);
  EXPECT_EQ(map_category("pedestrian"), ObjectCategory::pedestrian);
  EXPECT_EQ(map_category("vehicle.bicycle"), ObjectCategory::cyclist);
  EXPECT_EQ(map_category("traffic_cone"), ObjectCategory::other);
  EXPECT_THROW(map_category("spaceship"), UnknownCategory);
  EXPECT_TRUE(counts_for(ObjectCategory::vehicle, Convention::uniad));
  EXPECT_FALSE(counts_for(ObjectCategory::pedestrian, Convention::uniad));
  EXPECT_TRUE(counts_for(ObjectCategory::pedestrian, Convention::stp3));
  EXPECT_FALSE(counts_for(ObjectCategory::cyclist, Convention::stp3));
}

TEST(Evaluation, GtOccupancyUsesCellCenters)
{
  const scene::GridSpec grid{{-5.0, -5.0}, 0.5, 20, 20};
  scene::GtBoxesPerStep boxes;
  boxes[0].push_back({"car", {0.0, 0.0}, 1.0, 1.0, kForwardHeading});
  const auto occ = gt_occupancy(boxes, Convention::uniad, grid);
  int occupied = 0;
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      occupied += occ.value(1, ix, iy) > 0.0 ? 1 : 0;
    }
  }
  EXPECT_EQ(occupied, 4);
}

TEST(Evaluation, PedestrianOnlyCountsForStp3)
{
  Sample s;
  s.pred = forward(2.0);
  s.gt = forward(2.0);
  s.gt_boxes[2].push_back({"pedestrian", {0.0, 6.0}, 0.8, 0.8, kForwardHeading});
  const auto u = evaluate_sample(s, Convention::uniad, {});
  const auto p = evaluate_sample(s, Convention::stp3, {});
  EXPECT_FALSE(u.collisions[2]);
  EXPECT_TRUE(p.collisions[2]);
}

TEST(Evaluation, ConventionFormulas)
{
  SampleMetrics m;
  m.l2 = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  m.collisions = {false, true, false, false, false, true};
  const auto u = aggregate({m}, Convention::uniad);
  EXPECT_DOUBLE_EQ(u.l2_at[0], 2.0);
  EXPECT_DOUBLE_EQ(u.l2_at[2], 6.0);
  EXPECT_DOUBLE_EQ(u.l2_avg, 4.0);
  EXPECT_DOUBLE_EQ(u.collision_at[0], 100.0);
  EXPECT_DOUBLE_EQ(u.collision_at[1], 0.0);
  const auto s = aggregate({m}, Convention::stp3);
  EXPECT_DOUBLE_EQ(s.l2_at[0], 1.5);
  EXPECT_DOUBLE_EQ(s.l2_at[1], 2.5);
  EXPECT_DOUBLE_EQ(s.l2_at[2], 3.5);
  EXPECT_DOUBLE_EQ(s.collision_at[0], 50.0);
  EXPECT_DOUBLE_EQ(s.collision_at[2], 100.0 / 3.0);
  EXPECT_THROW(aggregate({}, Convention::uniad), EmptySet);
}

TEST(Evaluation, TableAndJson)
{
  const auto golden = load_metrics_golden();
  const auto u = report(golden.samples, Convention::uniad);
  const auto table = render_table({u});
  EXPECT_NE(table.find("uniad"), std::string::npos);
  EXPECT_NE(table.find("1.00"), std::string::npos);
  const auto j = to_json(u);
  EXPECT_EQ(j.at("convention"), "uniad");
  EXPECT_EQ(j.at("samples"), 3);
}

}  // namespace
}  // namespace agent_driver::evaluation
