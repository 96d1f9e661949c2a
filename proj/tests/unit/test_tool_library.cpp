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
#include "agent_driver/tool_library.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>

namespace agent_driver::tools
{
namespace
{

using nlohmann::json;
using agent_driver::testing::empty_scene;

scene::Detection make_detection(const std::string & id, Vec2 center, double length = 4.0, double width = 2.0)
{
  return {id, scene::ObjectCategory::vehicle, center, length, width, kForwardHeading};
}

TEST(ToolRegistry, HasTwentyToolsAcrossFourModules)
{
  const ToolRegistry registry;
  EXPECT_EQ(registry.descriptors().size(), 20u);
  EXPECT_EQ(registry.for_module(ToolModule::detection).size(), 5u);
  EXPECT_EQ(registry.for_module(ToolModule::prediction).size(), 5u);
  EXPECT_EQ(registry.for_module(ToolModule::map).size(), 8u);
  EXPECT_EQ(registry.for_module(ToolModule::occupancy).size(), 2u);
  std::set<std::string> names;
  for (const auto & d : registry.descriptors()) {
    names.insert(d.name);
    EXPECT_EQ(d.parameters.at("type"), "object");
  }
  EXPECT_EQ(names.size(), 20u);
  const auto exported = registry.export_functions();
  ASSERT_EQ(exported.size(), 20u);
  EXPECT_EQ(exported[0].at("name"), "get_leading_object_detection");
  EXPECT_TRUE(exported[0].contains("description"));
  EXPECT_TRUE(exported[0].contains("parameters"));
}

TEST(Detections, SortedByDistanceThenId)
{
  auto snap = empty_scene();
  snap.detections = {make_detection("b", {3.0, 4.0}), make_detection("a", {0.0, 5.0}), make_detection("c", {0.0, 1.0})};
  const auto all = detections_in_rect(snap, full_extent());
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].object_id, "c");
  EXPECT_EQ(all[1].object_id, "a");
  EXPECT_EQ(all[2].object_id, "b");
}

TEST(Detections, LeadingObjectStaysInCorridorAhead)
{
  auto snap = empty_scene();
  snap.detections = {make_detection("behind", {0.0, -3.0}), make_detection("side", {2.5, 4.0}),
    make_detection("far", {0.5, 20.0}), make_detection("near", {-1.75, 8.0})};
  const auto lead = leading_detection(snap);
  ASSERT_TRUE(lead.has_value());
  EXPECT_EQ(lead->object_id, "near");

  snap.detections = {make_detection("behind", {0.0, -3.0})};
  EXPECT_FALSE(leading_detection(snap).has_value());
  const auto result = dispatch(snap, {"get_leading_object_detection", json::object()}, ToolRegistry{});
  EXPECT_TRUE(result.none_flag);
  EXPECT_NE(result.text.find("None"), std::string::npos);
}

TEST(Predictions, LookupSplitsMissingAndUnknown)
{
  auto snap = empty_scene();
  snap.detections = {make_detection("a", {0.0, 5.0}), make_detection("b", {0.0, 9.0})};
  snap.predictions = {{"a", {{1, {0.0, 6.0}}, {3, {0.0, 8.0}}}}};
  const std::vector<std::string> ids{"a", "b", "a"};
  const auto lookup = trajectories_for_objects(snap, ids);
  ASSERT_EQ(lookup.found.size(), 1u);
  EXPECT_EQ(lookup.without_prediction, std::vector<std::string>{"b"});
  const std::vector<std::string> unknown{"zzz"};
  EXPECT_THROW(trajectories_for_objects(snap, unknown), UnknownObject);

  const std::vector<std::string> both{"a", "b"};
  const auto at2 = waypoints_at_timestep(snap, both, 2);
  EXPECT_TRUE(at2.points.empty());
  EXPECT_EQ(at2.missing.size(), 2u);
  const auto at3 = waypoints_at_timestep(snap, both, 3);
  ASSERT_EQ(at3.points.size(), 1u);
  EXPECT_EQ(at3.points[0].point, (Vec2{0.0, 8.0}));
  EXPECT_THROW(waypoints_at_timestep(snap, both, 7), BadTimestep);
}

TEST(Occupancy, NearestCellAndOutOfScope)
{
  auto snap = empty_scene();
  const auto cell = snap.occupancy.grid.locate({0.1, 5.1});
  ASSERT_TRUE(cell.has_value());
  snap.occupancy.set(2, cell->ix, cell->iy, 0.7);
  const std::vector<Vec2> pts{{0.1, 5.1}, {100.0, 0.0}};
  const auto probs = occupancy_at(snap, pts, 2);
  EXPECT_DOUBLE_EQ(*probs[0], 0.7);
  EXPECT_FALSE(probs[1].has_value());
  EXPECT_THROW(occupancy_at(snap, pts, 0), BadTimestep);
}

TEST(Collision, FootprintAgainstOccupiedCell)
{
  auto snap = empty_scene();
  Trajectory straight;
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    straight.points[t] = {0.0, 2.0 * static_cast<double>(t + 1)};
  }
  EXPECT_FALSE(collision_probability(snap, straight).collides);

  const auto cell = snap.occupancy.grid.locate({0.2, 8.2});
  snap.occupancy.set(4, cell->ix, cell->iy, 0.5);
  const auto check = collision_probability(snap, straight);
  EXPECT_TRUE(check.collides);
  EXPECT_TRUE(check.step_collides[3]);
  EXPECT_FALSE(check.step_collides[0]);
  EXPECT_DOUBLE_EQ(check.step_max[3], 0.5);

  // Same cell three meters to the side: outside footprint plus margin.
  snap.occupancy = scene::OccupancyVolume::zeros(snap.occupancy.grid);
  const auto side = snap.occupancy.grid.locate({3.2, 8.2});
  snap.occupancy.set(4, side->ix, side->iy, 0.5);
  EXPECT_FALSE(collision_probability(snap, straight).collides);
}

TEST(Collision, CountsCellsOutsideTheRaster)
{
  auto snap = empty_scene();
  Trajectory far;
  far.points.fill({0.0, 200.0});
  const auto check = collision_probability(snap, far);
  EXPECT_FALSE(check.collides);
  EXPECT_GT(check.cells_out_of_scope[0], 0u);
}

TEST(Map, ValuesAndStatuses)
{
  auto snap = empty_scene();
  snap.map.lane_category_names = {"lane", "junction"};
  const auto cell = snap.map.grid.locate({0.0, 0.0});
  const auto linear = snap.map.grid.linear(*cell);
  snap.map.lane_category[linear] = {0.3, 0.7};
  snap.map.shoulder_distance[linear] = {4.0, 5.0};
  snap.map.drivable[linear] = false;

  const std::vector<Vec2> pts{{0.0, 0.0}, {0.0, 1.0}, {500.0, 0.0}};
  const auto drivable = map_value_at(snap, MapLayer::drivable, pts);
  EXPECT_TRUE(drivable[0].ok());
  EXPECT_FALSE(drivable[0].drivable);
  EXPECT_TRUE(drivable[1].drivable);
  EXPECT_EQ(drivable[2].status, MapStatus::out_of_scope);

  const auto lanes = map_value_at(snap, MapLayer::lane_category, pts, true);
  EXPECT_EQ(lanes[0].lane_category, "junction");
  EXPECT_EQ(lanes[0].lane_probabilities.size(), 2u);
  EXPECT_EQ(lanes[1].status, MapStatus::undefined);

  const auto shoulder = dispatch(snap, {"get_current_shoulder", json::object()}, ToolRegistry{});
  EXPECT_NE(shoulder.text.find("left 4.00 m, right 5.00 m"), std::string::npos);
  EXPECT_THROW(parse_map_layer("sidewalk"), UnknownLayer);
}

TEST(Map, NearestCrossingAndTrajectoryDrivability)
{
  auto snap = empty_scene();
  EXPECT_FALSE(nearest_ped_crossing(snap).has_value());
  snap.map.ped_crossings = {{0.0, 30.0}, {3.0, 4.0}};
  const auto hit = nearest_ped_crossing(snap);
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(hit->distance, 5.0);

  Trajectory traj;
  traj.points.fill({0.0, 5.0});
  traj.points[5] = {0.0, 100.0};
  const auto check = drivable_check_for_trajectory(snap, traj);
  EXPECT_TRUE(check.drivable[0]);
  EXPECT_FALSE(check.drivable[5]);
  EXPECT_TRUE(check.out_of_scope[5]);
}

TEST(Dispatch, ErrorsBecomeObservations)
{
  const auto snap = empty_scene();
  const ToolRegistry registry;
  auto r = dispatch(snap, {"no_such_tool", json::object()}, registry);
  EXPECT_EQ(r.error, "UnknownTool");
  r = dispatch(snap, {"get_object_detections_in_range", json{{"x_start", 1}, {"x_end", 0}, {"y_start", 0}, {"y_end", 1}}},
    registry);
  EXPECT_EQ(r.error, "DegenerateRange");
  r = dispatch(snap, {"get_object_detections_in_range", json{{"x_start", "a"}}}, registry);
  EXPECT_EQ(r.error, "ArgumentError");
  r = dispatch(snap, {"get_occupancy_at_locations_for_timestep", json{{"locations", json::array()}, {"timestep", 9}}},
    registry);
  EXPECT_EQ(r.error, "BadTimestep");
  r = dispatch(snap, {"get_future_trajectories_for_specific_objects", json{{"object_ids", {"ghost"}}}}, registry);
  EXPECT_EQ(r.error, "UnknownObject");
  r = dispatch(snap, {"check_collision_for_planned_trajectory", json{{"trajectory", {{0, 1}}}}}, registry);
  EXPECT_EQ(r.error, "ArgumentError");
  r = dispatch(snap, {"get_all_object_detections", json("not an object")}, registry);
  EXPECT_EQ(r.error, "ArgumentError");
  EXPECT_EQ(r.text.rfind("Error (ArgumentError)", 0), 0u);
}

TEST(Dispatch, RangeToolMatchesFilter)
{
  std::mt19937_64 rng(11);
  const ToolRegistry registry;
  for (int i = 0; i < 50; ++i) {
    const auto snap = agent_driver::testing::random_scene(rng);
    const RectRegion rect{-10.0, 5.0, -3.0, 20.0};
    const auto r = dispatch(snap,
      {"get_object_detections_in_range", json{{"x_start", -10}, {"x_end", 5}, {"y_start", -3}, {"y_end", 20}}}, registry);
    std::set<std::string> expected;
    for (const auto & d : snap.detections) {
      if (rect.contains(d.center)) {
        expected.insert(d.object_id);
      }
    }
    std::set<std::string> got;
    if (!r.none_flag) {
      for (const auto & d : r.data) {
        got.insert(d.at("id").get<std::string>());
      }
    }
    EXPECT_EQ(got, expected);
  }
}

}  // namespace
}  // namespace agent_driver::tools
