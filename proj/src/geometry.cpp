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

#include "agent_driver/geometry.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numbers>

namespace agent_driver
{

Trajectory Trajectory::from_points(std::span<const Vec2> points, const char * field)
{
  if (points.size() != kHorizonSteps) {
    throw ValidationError(
      field, fmt::format("expected {} waypoints, got {}", kHorizonSteps, points.size()));
  }
  Trajectory traj;
  std::copy(points.begin(), points.end(), traj.points.begin());
  if (!traj.all_finite()) {
    throw ValidationError(field, "waypoints must be finite");
  }
  return traj;
}

bool Trajectory::all_finite() const
{
  return std::all_of(points.begin(), points.end(), [](const Vec2 & p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
  });
}

RectRegion ego_frame_rect(double x_start, double x_end, double y_start, double y_end)
{
  if (!(x_start < x_end) || !(y_start < y_end)) {
    throw DegenerateRange(fmt::format(
      "range ({}, {})*({}, {}) is empty or inverted", x_start, x_end, y_start, y_end));
  }
  return RectRegion{x_start, x_end, y_start, y_end};
}

bool OrientedBox::contains(const Vec2 & p) const
{
  const Vec2 axis{std::cos(heading), std::sin(heading)};
  const Vec2 normal{-axis.y, axis.x};
  const Vec2 d = p - center;
  return std::abs(d.dot(axis)) <= 0.5 * length && std::abs(d.dot(normal)) <= 0.5 * width;
}

bool OrientedBox::intersects_aabb(const Vec2 & min, const Vec2 & max) const
{
  const Vec2 axis{std::cos(heading), std::sin(heading)};
  const Vec2 normal{-axis.y, axis.x};
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;

  // Projection radius of this box onto the world axes.
  const double rx = hl * std::abs(axis.x) + hw * std::abs(normal.x);
  const double ry = hl * std::abs(axis.y) + hw * std::abs(normal.y);
  if (center.x + rx < min.x || center.x - rx > max.x) {
    return false;
  }
  if (center.y + ry < min.y || center.y - ry > max.y) {
    return false;
  }

  // Projection of the square onto the box axes.
  const Vec2 c{0.5 * (min.x + max.x), 0.5 * (min.y + max.y)};
  const Vec2 h{0.5 * (max.x - min.x), 0.5 * (max.y - min.y)};
  const Vec2 d = c - center;
  const double ra = h.x * std::abs(axis.x) + h.y * std::abs(axis.y);
  if (std::abs(d.dot(axis)) > hl + ra) {
    return false;
  }
  const double rn = h.x * std::abs(normal.x) + h.y * std::abs(normal.y);
  return std::abs(d.dot(normal)) <= hw + rn;
}

void OrientedBox::bounds(Vec2 & min, Vec2 & max) const
{
  const Vec2 axis{std::cos(heading), std::sin(heading)};
  const Vec2 normal{-axis.y, axis.x};
  const double rx = 0.5 * length * std::abs(axis.x) + 0.5 * width * std::abs(normal.x);
  const double ry = 0.5 * length * std::abs(axis.y) + 0.5 * width * std::abs(normal.y);
  min = {center.x - rx, center.y - ry};
  max = {center.x + rx, center.y + ry};
}

std::array<double, kHorizonSteps> waypoint_headings(const Trajectory & traj)
{
  std::array<double, kHorizonSteps> headings{};
  Vec2 previous{0.0, 0.0};
  double heading = kForwardHeading;
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    const Vec2 step = traj.points[t] - previous;
    if (step.squared_norm() > 1e-12) {
      heading = std::atan2(step.y, step.x);
    }
    headings[t] = heading;
    previous = traj.points[t];
  }
  return headings;
}

double wrap_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped <= -std::numbers::pi) {
    wrapped += two_pi;
  } else if (wrapped > std::numbers::pi) {
    wrapped -= two_pi;
  }
  return wrapped;
}

}  // namespace agent_driver
