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

#ifndef AGENT_DRIVER__SCENE_MODEL_HPP_
#define AGENT_DRIVER__SCENE_MODEL_HPP_

#include "agent_driver/geometry.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::scene
{

inline constexpr std::string_view kSchemaTag = "agentdriver/1";

enum class MissionGoal { go_straight, turn_left, turn_right };
enum class ObjectCategory { vehicle, pedestrian, cyclist, other };

std::string_view to_string(MissionGoal goal);
std::string_view to_string(ObjectCategory category);
std::optional<MissionGoal> parse_mission_goal(std::string_view text);
std::optional<ObjectCategory> parse_object_category(std::string_view text);

struct EgoState
{
  Vec2 position;  // always the origin
  double heading = kForwardHeading;
  Vec2 velocity;
  Vec2 acceleration;
  std::vector<Vec2> history;  // oldest first, 0.5 s spacing
  MissionGoal mission_goal = MissionGoal::go_straight;
  std::vector<double> can_bus_extras;

  friend bool operator==(const EgoState &, const EgoState &) = default;

  std::array<double, 3> goal_one_hot() const;
};

struct Detection
{
  std::string object_id;
  ObjectCategory category = ObjectCategory::other;
  Vec2 center;
  double length = 0.0;
  double width = 0.0;
  double heading = kForwardHeading;

  friend bool operator==(const Detection &, const Detection &) = default;
};

struct TimedWaypoint
{
  int timestep = 0;  // 1..6
  Vec2 point;

  friend bool operator==(const TimedWaypoint &, const TimedWaypoint &) = default;
};

struct PredictedTrajectory
{
  std::string object_id;
  std::vector<TimedWaypoint> waypoints;  // strictly increasing timesteps, may be partial

  friend bool operator==(const PredictedTrajectory &, const PredictedTrajectory &) = default;

  std::optional<Vec2> at(int timestep) const;
};

struct CellIndex
{
  std::size_t ix = 0;
  std::size_t iy = 0;
};

/// Geo-transform shared by occupancy and map rasters. Cell (ix, iy) covers
/// [origin.x + ix*res, origin.x + (ix+1)*res) x [origin.y + iy*res, ...).
struct GridSpec
{
  Vec2 origin;
  double resolution = 0.5;
  std::size_t nx = 0;
  std::size_t ny = 0;

  friend bool operator==(const GridSpec &, const GridSpec &) = default;

  std::size_t cell_count() const { return nx * ny; }
  std::size_t linear(const CellIndex & c) const { return c.iy * nx + c.ix; }
  /// Containing cell, or nullopt outside the extent.
  std::optional<CellIndex> locate(const Vec2 & p) const;
  Vec2 cell_min(std::size_t ix, std::size_t iy) const;
  Vec2 cell_center(std::size_t ix, std::size_t iy) const;
};

/// Occupancy probabilities for the six future timesteps.
struct OccupancyVolume
{
  GridSpec grid;
  std::vector<double> values;  // [t-1][iy][ix], size 6*nx*ny

  friend bool operator==(const OccupancyVolume &, const OccupancyVolume &) = default;

  static OccupancyVolume zeros(const GridSpec & grid);
  double value(int timestep, std::size_t ix, std::size_t iy) const;
  void set(int timestep, std::size_t ix, std::size_t iy, double p);
  /// Nearest-cell probability; nullopt when p lies outside the extent.
  std::optional<double> at(int timestep, const Vec2 & p) const;
};

struct SideDistances
{
  double left = 0.0;
  double right = 0.0;

  friend bool operator==(const SideDistances &, const SideDistances &) = default;
};

struct MapLayers
{
  GridSpec grid;
  std::vector<bool> drivable;                        // [iy][ix]
  std::vector<std::string> lane_category_names;      // vocabulary, opaque strings
  std::map<std::size_t, std::vector<double>> lane_category;  // linear cell -> distribution
  std::map<std::size_t, SideDistances> shoulder_distance;
  std::map<std::size_t, SideDistances> divider_distance;
  std::vector<Vec2> ped_crossings;

  friend bool operator==(const MapLayers &, const MapLayers &) = default;
};

struct GtBox
{
  std::string category;  // mapped to a metric category at evaluation time
  Vec2 center;
  double length = 0.0;
  double width = 0.0;
  double heading = kForwardHeading;

  friend bool operator==(const GtBox &, const GtBox &) = default;
};

using GtBoxesPerStep = std::array<std::vector<GtBox>, kHorizonSteps>;

struct SceneSnapshot
{
  std::string scene_id;
  EgoState ego;
  std::vector<Detection> detections;
  std::vector<PredictedTrajectory> predictions;
  OccupancyVolume occupancy;
  MapLayers map;
  std::optional<Trajectory> gt_trajectory;
  std::optional<GtBoxesPerStep> gt_boxes_per_step;

  friend bool operator==(const SceneSnapshot &, const SceneSnapshot &) = default;

  const Detection * find_detection(std::string_view object_id) const;
  const PredictedTrajectory * find_prediction(std::string_view object_id) const;
};

struct SceneOptions
{
  std::size_t history_length = 4;
};

/// Validates and converts a parsed scene document. Throws ValidationError
/// naming the offending field.
SceneSnapshot parse_snapshot(const nlohmann::json & doc, const SceneOptions & options = {});

/// Reads a scene file. Throws ParseError on unreadable or malformed JSON.
SceneSnapshot load_snapshot(const std::filesystem::path & path, const SceneOptions & options = {});

/// Serializes to the documented schema; parse_snapshot(to_json(s)) == s.
nlohmann::json to_json(const SceneSnapshot & snapshot);

}  // namespace agent_driver::scene

#endif  // AGENT_DRIVER__SCENE_MODEL_HPP_
