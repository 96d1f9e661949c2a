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

#ifndef AGENT_DRIVER__SELF_REFLECTION_HPP_
#define AGENT_DRIVER__SELF_REFLECTION_HPP_

#include "agent_driver/scene_model.hpp"
#include "agent_driver/tool_library.hpp"

#include <json.hpp>

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace agent_driver::reflection
{

struct ReflectionConfig
{
  double lambda = 200.0;  // repulsion weight
  double sigma = 2.0;     // kernel width [m]
  double margin = 0.5;    // footprint inflation per side [m]
  double threshold = 0.1;
  double sample_radius = 5.0;  // [m]
  std::size_t max_obstacles_per_step = 128;
  int max_iterations = 20;
  double tolerance = 1e-4;  // waypoint movement [m]
  double damping = 0.5;     // step-halving factor
  double nudge = 1e-3;      // [m]
  double ego_length = 4.08;
  double ego_width = 1.73;

  /// Throws ValidationError.
  void validate() const;

  /// Repulsion amplitude lambda / (sigma * sqrt(2 pi)).
  double amplitude() const;
};

nlohmann::json to_json(const ReflectionConfig & config);

/// Obstacle points per timestep (index t-1).
using ObstaclePointSet = std::array<std::vector<Vec2>, kHorizonSteps>;

tools::CollisionCheck collision_check(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config);

/// Centers of cells above the threshold within the sampling radius of each
/// waypoint, row-major; when over the cap, the nearest cells are kept.
ObstaclePointSet sample_obstacles(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config);

/// c(p) = |p - anchor|^2 + sum_o A exp(-|p - o|^2 / (2 sigma^2)) with its
/// gradient and Hessian (xx, xy, yy).
struct WaypointCost
{
  double value = 0.0;
  Vec2 gradient;
  std::array<double, 3> hessian{};
};

WaypointCost waypoint_cost(
  const Vec2 & p, const Vec2 & anchor, std::span<const Vec2> obstacles, double amplitude, double sigma);

struct WaypointResult
{
  Vec2 point;
  int iterations = 0;
  bool converged = true;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  /// Cost after each accepted step, starting with the initial cost.
  std::vector<double> cost_trace;
};

/// Damped Newton from the anchor, falling back to gradient descent where the
/// Hessian is not positive definite. Never returns a point costlier than the
/// anchor.
WaypointResult rectify_waypoint(
  const Vec2 & anchor, std::span<const Vec2> obstacles, const ReflectionConfig & config);

struct ReflectionReport
{
  bool optimized = false;
  bool collided_before = false;
  bool collided_after = false;
  std::array<double, kHorizonSteps> step_max_before{};
  std::array<double, kHorizonSteps> step_max_after{};
  std::array<std::size_t, kHorizonSteps> obstacle_counts{};
  std::array<int, kHorizonSteps> iterations{};
  std::array<bool, kHorizonSteps> converged{};
  std::array<double, kHorizonSteps> initial_cost{};
  std::array<double, kHorizonSteps> final_cost{};
  std::array<double, kHorizonSteps> displacement{};
  /// Squared-deviation objective summed over waypoints.
  double total_cost_initial = 0.0;
  double total_cost_final = 0.0;
  /// Same objective with the unsquared trajectory deviation |tau - tau_hat|_2.
  double unsquared_cost_final = 0.0;
  ReflectionConfig config;
};

nlohmann::json to_json(const ReflectionReport & report);

/// Identity when no step has obstacles.
std::pair<Trajectory, ReflectionReport> rectify(
  const Trajectory & traj, const ObstaclePointSet & obstacles, const ReflectionConfig & config);

/// Check, and when colliding sample, rectify and check again.
std::pair<Trajectory, ReflectionReport> reflect(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config);

}  // namespace agent_driver::reflection

#endif  // AGENT_DRIVER__SELF_REFLECTION_HPP_
