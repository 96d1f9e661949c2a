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

#ifndef AGENT_DRIVER__GEOMETRY_HPP_
#define AGENT_DRIVER__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace agent_driver
{

// Ego-centric frame: +y forward, +x rightward, meters. Headings are yaw
// angles measured counter-clockwise from +x, so "straight ahead" is pi/2.

inline constexpr std::size_t kHorizonSteps = 6;
inline constexpr double kStepSeconds = 0.5;
inline constexpr double kForwardHeading = 1.5707963267948966;

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2 &, const Vec2 &) = default;
  Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

/// Six planar waypoints at t = 0.5 .. 3.0 s.
struct Trajectory
{
  std::array<Vec2, kHorizonSteps> points{};

  friend bool operator==(const Trajectory &, const Trajectory &) = default;

  /// Throws ValidationError(field) unless there are exactly six finite points.
  static Trajectory from_points(std::span<const Vec2> points, const char * field = "trajectory");

  bool all_finite() const;
};

/// Axis-aligned region in the ego frame; bounds are inclusive.
struct RectRegion
{
  double x_start = 0.0;
  double x_end = 0.0;
  double y_start = 0.0;
  double y_end = 0.0;

  friend bool operator==(const RectRegion &, const RectRegion &) = default;

  bool contains(const Vec2 & p) const
  {
    return p.x >= x_start && p.x <= x_end && p.y >= y_start && p.y <= y_end;
  }
};

/// Builds a region; throws DegenerateRange if a start bound is not strictly
/// below its end bound (NaN bounds included).
RectRegion ego_frame_rect(double x_start, double x_end, double y_start, double y_end);

/// Oriented rectangle: `length` runs along `heading`, `width` across it.
struct OrientedBox
{
  Vec2 center;
  double heading = kForwardHeading;
  double length = 0.0;
  double width = 0.0;

  bool contains(const Vec2 & p) const;
  /// Separating-axis test against the closed axis-aligned square
  /// [min, max]. Touching edges count as overlap.
  bool intersects_aabb(const Vec2 & min, const Vec2 & max) const;
  /// Axis-aligned bounding box of the rectangle.
  void bounds(Vec2 & min, Vec2 & max) const;
};

/// Heading of the ego at each waypoint: direction from waypoint t-1 to t
/// (waypoint 0 is the origin). Zero-length steps inherit the previous
/// heading; the heading before the first step is straight ahead.
std::array<double, kHorizonSteps> waypoint_headings(const Trajectory & traj);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace agent_driver

#endif  // AGENT_DRIVER__GEOMETRY_HPP_
