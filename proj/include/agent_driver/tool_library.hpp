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

#ifndef AGENT_DRIVER__TOOL_LIBRARY_HPP_
#define AGENT_DRIVER__TOOL_LIBRARY_HPP_

#include "agent_driver/geometry.hpp"
#include "agent_driver/scene_model.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::tools
{

/// A function call issued by the LLM. `arguments` is the decoded JSON payload;
/// a payload that failed to decode is kept as a JSON string so dispatch can
/// report it.
struct ToolCall
{
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();

  friend bool operator==(const ToolCall &, const ToolCall &) = default;
};

struct ToolResult
{
  std::string text;
  nlohmann::json data;  // null when none_flag is set
  bool none_flag = false;
  /// Error kind when the call could not be executed (UnknownTool, ...).
  std::optional<std::string> error;
};

enum class ToolModule { detection, prediction, map, occupancy };

std::string_view to_string(ToolModule module);

struct ToolDescriptor
{
  std::string name;
  std::string description;
  nlohmann::json parameters;  // JSON schema of the arguments object
  ToolModule module;
};

/// The twenty tools, in table order. Immutable.
class ToolRegistry
{
public:
  ToolRegistry();

  std::span<const ToolDescriptor> descriptors() const { return descriptors_; }
  const ToolDescriptor * find(std::string_view name) const;
  std::vector<const ToolDescriptor *> for_module(ToolModule module) const;

  /// Chat function-schema export: [{"name", "description", "parameters"}].
  nlohmann::json export_functions() const;
  nlohmann::json export_functions(ToolModule module) const;

private:
  std::vector<ToolDescriptor> descriptors_;
};

struct ToolConfig
{
  double corridor_half_width = 1.75;
  double collision_threshold = 0.1;
  double collision_margin = 0.5;
  double ego_length = 4.08;
  double ego_width = 1.73;
};

// Core spatial queries. All lists are ordered by ascending distance to the
// ego, ties broken by object id.

std::vector<scene::Detection> detections_in_rect(const scene::SceneSnapshot & snap, const RectRegion & rect);

/// Nearest detection with |x| <= corridor half width and y > 0.
std::optional<scene::Detection> leading_detection(
  const scene::SceneSnapshot & snap, const ToolConfig & config = {});

struct TrajectoryLookup
{
  std::vector<scene::PredictedTrajectory> found;
  std::vector<std::string> without_prediction;  // detected ids that have no trajectory
};

/// Throws UnknownObject for an id that is not even detected.
TrajectoryLookup trajectories_for_objects(
  const scene::SceneSnapshot & snap, std::span<const std::string> ids);

std::vector<scene::PredictedTrajectory> trajectories_in_rect(
  const scene::SceneSnapshot & snap, const RectRegion & rect);

struct TimedPoint
{
  std::string object_id;
  Vec2 point;
};

struct WaypointLookup
{
  std::vector<TimedPoint> points;
  std::vector<std::string> missing;  // requested ids without a waypoint at t
};

/// Throws BadTimestep unless 1 <= timestep <= 6.
WaypointLookup waypoints_at_timestep(
  const scene::SceneSnapshot & snap, std::span<const std::string> ids, int timestep);

/// Nearest-cell probability per point; nullopt marks out-of-scope points.
/// Throws BadTimestep.
std::vector<std::optional<double>> occupancy_at(
  const scene::SceneSnapshot & snap, std::span<const Vec2> points, int timestep);

struct CollisionCheck
{
  std::array<double, kHorizonSteps> step_max{};
  std::array<bool, kHorizonSteps> step_collides{};
  std::array<std::size_t, kHorizonSteps> cells_out_of_scope{};
  bool collides = false;
};

/// Maximum occupancy over the cells touched by the ego footprint (inflated by
/// `margin`) placed at each waypoint; a step collides when that maximum
/// exceeds `threshold`. Cells outside the raster are skipped and counted.
CollisionCheck collision_probability(
  const scene::OccupancyVolume & occupancy, const Trajectory & traj, double ego_length,
  double ego_width, double margin, double threshold);

CollisionCheck collision_probability(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ToolConfig & config = {});

enum class MapLayer { drivable, lane_category, shoulder, divider };

/// Throws UnknownLayer.
MapLayer parse_map_layer(std::string_view name);

enum class MapStatus { ok, out_of_scope, undefined };

struct MapValue
{
  MapStatus status = MapStatus::out_of_scope;
  bool drivable = false;
  std::string lane_category;
  std::vector<double> lane_probabilities;  // filled when ret_prob is requested
  scene::SideDistances distances;

  bool ok() const { return status == MapStatus::ok; }
};

std::vector<MapValue> map_value_at(
  const scene::SceneSnapshot & snap, MapLayer layer, std::span<const Vec2> points,
  bool ret_prob = false);

struct CrossingHit
{
  Vec2 point;
  double distance = 0.0;
};

std::optional<CrossingHit> nearest_ped_crossing(const scene::SceneSnapshot & snap);

struct DrivableCheck
{
  std::array<bool, kHorizonSteps> drivable{};
  std::array<bool, kHorizonSteps> out_of_scope{};
};

/// Out-of-extent waypoints count as not drivable.
DrivableCheck drivable_check_for_trajectory(const scene::SceneSnapshot & snap, const Trajectory & traj);

/// Unbounded region used by the whole-scene tools.
RectRegion full_extent();

/// Executes an LLM-issued call and renders the observation text. Never
/// throws for bad names or arguments; those become error observations.
ToolResult dispatch(
  const scene::SceneSnapshot & snap, const ToolCall & call, const ToolRegistry & registry,
  const ToolConfig & config = {});

}  // namespace agent_driver::tools

#endif  // AGENT_DRIVER__TOOL_LIBRARY_HPP_
