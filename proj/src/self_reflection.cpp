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

#include "agent_driver/self_reflection.hpp"

#include "agent_driver/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace agent_driver::reflection
{

using nlohmann::json;

namespace
{

constexpr int kMaxHalvings = 60;
constexpr double kStationary = 1e-12;

bool positive_definite(const std::array<double, 3> & h)
{
  return h[0] > 0.0 && h[0] * h[2] - h[1] * h[1] > 0.0;
}

Vec2 newton_step(const WaypointCost & c)
{
  const auto & h = c.hessian;
  const double det = h[0] * h[2] - h[1] * h[1];
  // -H^-1 g for the symmetric 2x2 case.
  return {-(h[2] * c.gradient.x - h[1] * c.gradient.y) / det, -(-h[1] * c.gradient.x + h[0] * c.gradient.y) / det};
}

void require_positive(double value, const char * field)
{
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a positive finite number");
  }
}

double repulsion(const Vec2 & p, std::span<const Vec2> obstacles, double amplitude, double sigma)
{
  double sum = 0.0;
  for (const auto & o : obstacles) {
    sum += amplitude * std::exp(-(p - o).squared_norm() / (2.0 * sigma * sigma));
  }
  return sum;
}

}  // namespace

void ReflectionConfig::validate() const
{
  require_positive(lambda, "reflection.lambda");
  require_positive(sigma, "reflection.sigma");
  require_positive(margin, "reflection.margin");
  require_positive(threshold, "reflection.threshold");
  require_positive(sample_radius, "reflection.sample_radius");
  require_positive(tolerance, "reflection.tolerance");
  require_positive(nudge, "reflection.nudge");
  require_positive(ego_length, "reflection.ego_length");
  require_positive(ego_width, "reflection.ego_width");
  if (max_iterations < 1) {
    throw ValidationError("reflection.max_iterations", "must be at least 1");
  }
  if (max_obstacles_per_step < 1) {
    throw ValidationError("reflection.max_obstacles_per_step", "must be at least 1");
  }
  if (!(damping > 0.0 && damping < 1.0)) {
    throw ValidationError("reflection.damping", "must lie in (0, 1)");
  }
}

double ReflectionConfig::amplitude() const
{
  return lambda / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

json to_json(const ReflectionConfig & config)
{
  return json{
    {"lambda", config.lambda},
    {"sigma", config.sigma},
    {"margin", config.margin},
    {"threshold", config.threshold},
    {"sample_radius", config.sample_radius},
    {"max_obstacles_per_step", config.max_obstacles_per_step},
    {"max_iterations", config.max_iterations},
    {"tolerance", config.tolerance},
    {"damping", config.damping},
    {"nudge", config.nudge},
    {"ego_length", config.ego_length},
    {"ego_width", config.ego_width}};
}

tools::CollisionCheck collision_check(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config)
{
  return tools::collision_probability(
    snap.occupancy, traj, config.ego_length, config.ego_width, config.margin, config.threshold);
}

ObstaclePointSet sample_obstacles(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config)
{
  ObstaclePointSet out;
  const auto & grid = snap.occupancy.grid;
  if (grid.cell_count() == 0) {
    return out;
  }
  const double r = config.sample_radius;
  const auto index_range = [&](double lo, double hi, double origin, std::size_t n) {
    const double first = std::floor((lo - origin) / grid.resolution);
    const double last = std::floor((hi - origin) / grid.resolution);
    const auto clamp = [n](double v) {
      return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n) - 1.0));
    };
    return std::pair{clamp(first), clamp(last)};
  };

  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    const auto & p = traj.points[t];
    const auto [ix0, ix1] = index_range(p.x - r, p.x + r, grid.origin.x, grid.nx);
    const auto [iy0, iy1] = index_range(p.y - r, p.y + r, grid.origin.y, grid.ny);
    struct Hit
    {
      std::size_t order;
      double distance;
      Vec2 center;
    };
    std::vector<Hit> hits;
    for (std::size_t iy = iy0; iy <= iy1; ++iy) {
      for (std::size_t ix = ix0; ix <= ix1; ++ix) {
        if (!(snap.occupancy.value(static_cast<int>(t + 1), ix, iy) > config.threshold)) {
          continue;
        }
        const auto center = grid.cell_center(ix, iy);
        const double distance = (center - p).norm();
        if (distance <= r) {
          hits.push_back({grid.linear({ix, iy}), distance, center});
        }
      }
    }
    if (hits.size() > config.max_obstacles_per_step) {
      std::stable_sort(hits.begin(), hits.end(), [](const Hit & a, const Hit & b) { return a.distance < b.distance; });
      hits.resize(config.max_obstacles_per_step);
      std::sort(hits.begin(), hits.end(), [](const Hit & a, const Hit & b) { return a.order < b.order; });
    }
    for (const auto & hit : hits) {
      out[t].push_back(hit.center);
    }
  }
  return out;
}

WaypointCost waypoint_cost(
  const Vec2 & p, const Vec2 & anchor, std::span<const Vec2> obstacles, double amplitude, double sigma)
{
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  const Vec2 dev = p - anchor;
  WaypointCost c;
  c.value = dev.squared_norm();
  c.gradient = dev * 2.0;
  c.hessian = {2.0, 0.0, 2.0};
  for (const auto & o : obstacles) {
    const Vec2 d = p - o;
    const double w = amplitude * std::exp(-d.squared_norm() / (2.0 * s2));
    c.value += w;
    c.gradient = c.gradient - d * (w / s2);
    c.hessian[0] += w * (d.x * d.x / s4 - 1.0 / s2);
    c.hessian[1] += w * (d.x * d.y / s4);
    c.hessian[2] += w * (d.y * d.y / s4 - 1.0 / s2);
  }
  return c;
}

WaypointResult rectify_waypoint(const Vec2 & anchor, std::span<const Vec2> obstacles, const ReflectionConfig & config)
{
  const double amplitude = config.amplitude();
  const auto cost_at = [&](const Vec2 & p) { return waypoint_cost(p, anchor, obstacles, amplitude, config.sigma); };

  WaypointResult result;
  result.point = anchor;
  const auto start = cost_at(anchor);
  result.initial_cost = start.value;
  result.final_cost = start.value;
  if (obstacles.empty()) {
    result.cost_trace.push_back(start.value);
    return result;
  }

  Vec2 p = anchor;
  auto current = start;
  if (current.gradient.norm() < kStationary) {
    const auto nearest = std::min_element(obstacles.begin(), obstacles.end(), [&](const Vec2 & a, const Vec2 & b) {
      return (a - p).squared_norm() < (b - p).squared_norm();
    });
    const Vec2 away = p - *nearest;
    const bool close = away.norm() <= config.margin;
    if (close || !positive_definite(current.hessian)) {
      const Vec2 dir = away.norm() > 0.0 ? away * (1.0 / away.norm()) : Vec2{1.0, 0.0};
      p = p + dir * config.nudge;
      current = cost_at(p);
    }
  }
  result.cost_trace.push_back(current.value);

  result.converged = false;
  for (int it = 0; it < config.max_iterations; ++it) {
    const bool pd = positive_definite(current.hessian);
    const Vec2 step = pd ? newton_step(current) : current.gradient * -1.0;
    if (step.norm() == 0.0 || !std::isfinite(step.x) || !std::isfinite(step.y)) {
      result.converged = pd;
      break;
    }
    double scale = 1.0;
    bool accepted = false;
    WaypointCost candidate;
    Vec2 q;
    for (int k = 0; k < kMaxHalvings; ++k) {
      q = p + step * scale;
      candidate = cost_at(q);
      if (candidate.value < current.value) {
        accepted = true;
        break;
      }
      scale *= config.damping;
    }
    if (!accepted) {
      result.converged = pd;
      break;
    }
    p = q;
    current = candidate;
    ++result.iterations;
    result.cost_trace.push_back(current.value);
    if (pd && (step * scale).norm() < config.tolerance) {
      result.converged = true;
      break;
    }
  }

  if (current.value <= start.value) {
    result.point = p;
    result.final_cost = current.value;
  }
  return result;
}

json to_json(const ReflectionReport & report)
{
  return json{
    {"optimized", report.optimized},
    {"collided_before", report.collided_before},
    {"collided_after", report.collided_after},
    {"step_max_before", report.step_max_before},
    {"step_max_after", report.step_max_after},
    {"obstacle_counts", report.obstacle_counts},
    {"iterations", report.iterations},
    {"converged", report.converged},
    {"initial_cost", report.initial_cost},
    {"final_cost", report.final_cost},
    {"displacement", report.displacement},
    {"total_cost_initial", report.total_cost_initial},
    {"total_cost_final", report.total_cost_final},
    {"unsquared_cost_final", report.unsquared_cost_final},
    {"config", to_json(report.config)}};
}

std::pair<Trajectory, ReflectionReport> rectify(
  const Trajectory & traj, const ObstaclePointSet & obstacles, const ReflectionConfig & config)
{
  config.validate();
  ReflectionReport report;
  report.config = config;
  report.converged.fill(true);
  Trajectory out = traj;
  const bool any = std::any_of(obstacles.begin(), obstacles.end(), [](const auto & o) { return !o.empty(); });
  double deviation_sq = 0.0;
  double repulsion_final = 0.0;
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    report.obstacle_counts[t] = obstacles[t].size();
    if (!any) {
      const auto c = waypoint_cost(traj.points[t], traj.points[t], obstacles[t], config.amplitude(), config.sigma);
      report.initial_cost[t] = report.final_cost[t] = c.value;
    } else {
      const auto r = rectify_waypoint(traj.points[t], obstacles[t], config);
      out.points[t] = r.point;
      report.iterations[t] = r.iterations;
      report.converged[t] = r.converged;
      report.initial_cost[t] = r.initial_cost;
      report.final_cost[t] = r.final_cost;
    }
    report.displacement[t] = (out.points[t] - traj.points[t]).norm();
    report.total_cost_initial += report.initial_cost[t];
    report.total_cost_final += report.final_cost[t];
    deviation_sq += report.displacement[t] * report.displacement[t];
    repulsion_final += repulsion(out.points[t], obstacles[t], config.amplitude(), config.sigma);
  }
  report.optimized = any;
  report.unsquared_cost_final = std::sqrt(deviation_sq) + repulsion_final;
  return {out, report};
}

std::pair<Trajectory, ReflectionReport> reflect(
  const scene::SceneSnapshot & snap, const Trajectory & traj, const ReflectionConfig & config)
{
  config.validate();
  const auto before = collision_check(snap, traj, config);
  if (!before.collides) {
    ReflectionReport report;
    report.config = config;
    report.converged.fill(true);
    report.step_max_before = before.step_max;
    report.step_max_after = before.step_max;
    const double amplitude = config.amplitude();
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      report.initial_cost[t] = report.final_cost[t] =
        waypoint_cost(traj.points[t], traj.points[t], {}, amplitude, config.sigma).value;
    }
    return {traj, report};
  }
  const auto obstacles = sample_obstacles(snap, traj, config);
  auto [out, report] = rectify(traj, obstacles, config);
  const auto after = collision_check(snap, out, config);
  report.collided_before = true;
  report.collided_after = after.collides;
  report.step_max_before = before.step_max;
  report.step_max_after = after.step_max;
  return {out, report};
}

}  // namespace agent_driver::reflection
