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

#include "agent_driver/tool_library.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace agent_driver::tools
{

using nlohmann::json;
using scene::Detection;
using scene::PredictedTrajectory;
using scene::SceneSnapshot;

namespace
{

bool closer_to_ego(const Vec2 & a, const std::string & id_a, const Vec2 & b, const std::string & id_b)
{
  const double da = a.norm();
  const double db = b.norm();
  if (da != db) {
    return da < db;
  }
  return id_a < id_b;
}

void sort_by_ego_distance(std::vector<Detection> & dets)
{
  std::sort(dets.begin(), dets.end(), [](const Detection & a, const Detection & b) {
    return closer_to_ego(a.center, a.object_id, b.center, b.object_id);
  });
}

void check_timestep(int timestep)
{
  if (timestep < 1 || timestep > static_cast<int>(kHorizonSteps)) {
    throw BadTimestep(fmt::format("timestep {} outside 1..6", timestep));
  }
}

}  // namespace

RectRegion full_extent()
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  return RectRegion{-inf, inf, -inf, inf};
}

std::vector<Detection> detections_in_rect(const SceneSnapshot & snap, const RectRegion & rect)
{
  std::vector<Detection> out;
  for (const auto & d : snap.detections) {
    if (rect.contains(d.center)) {
      out.push_back(d);
    }
  }
  sort_by_ego_distance(out);
  return out;
}

std::optional<Detection> leading_detection(const SceneSnapshot & snap, const ToolConfig & config)
{
  std::optional<Detection> best;
  for (const auto & d : snap.detections) {
    if (std::abs(d.center.x) > config.corridor_half_width || !(d.center.y > 0.0)) {
      continue;
    }
    if (!best || closer_to_ego(d.center, d.object_id, best->center, best->object_id)) {
      best = d;
    }
  }
  return best;
}

TrajectoryLookup trajectories_for_objects(const SceneSnapshot & snap, std::span<const std::string> ids)
{
  TrajectoryLookup out;
  for (const auto & id : ids) {
    if (snap.find_detection(id) == nullptr) {
      throw UnknownObject(fmt::format("object '{}' is not detected in this scene", id));
    }
  }
  for (const auto & id : ids) {
    const bool seen = std::any_of(out.found.begin(), out.found.end(),
                        [&](const PredictedTrajectory & p) { return p.object_id == id; }) ||
                      std::find(out.without_prediction.begin(), out.without_prediction.end(), id) !=
                        out.without_prediction.end();
    if (seen) {
      continue;
    }
    if (const auto * pred = snap.find_prediction(id)) {
      out.found.push_back(*pred);
    } else {
      out.without_prediction.push_back(id);
    }
  }
  return out;
}

std::vector<PredictedTrajectory> trajectories_in_rect(const SceneSnapshot & snap, const RectRegion & rect)
{
  std::vector<PredictedTrajectory> out;
  for (const auto & pred : snap.predictions) {
    const bool any_inside = std::any_of(pred.waypoints.begin(), pred.waypoints.end(),
      [&](const scene::TimedWaypoint & wp) { return rect.contains(wp.point); });
    if (any_inside) {
      out.push_back(pred);
    }
  }
  std::sort(out.begin(), out.end(), [&](const PredictedTrajectory & a, const PredictedTrajectory & b) {
    return closer_to_ego(snap.find_detection(a.object_id)->center, a.object_id,
      snap.find_detection(b.object_id)->center, b.object_id);
  });
  return out;
}

WaypointLookup waypoints_at_timestep(const SceneSnapshot & snap, std::span<const std::string> ids, int timestep)
{
  check_timestep(timestep);
  WaypointLookup out;
  for (const auto & id : ids) {
    const auto * pred = snap.find_prediction(id);
    const auto point = pred != nullptr ? pred->at(timestep) : std::nullopt;
    if (point) {
      out.points.push_back({id, *point});
    } else {
      out.missing.push_back(id);
    }
  }
  return out;
}

std::vector<std::optional<double>> occupancy_at(
  const SceneSnapshot & snap, std::span<const Vec2> points, int timestep)
{
  check_timestep(timestep);
  std::vector<std::optional<double>> out;
  out.reserve(points.size());
  for (const auto & p : points) {
    out.push_back(snap.occupancy.at(timestep, p));
  }
  return out;
}

CollisionCheck collision_probability(
  const scene::OccupancyVolume & occupancy, const Trajectory & traj, double ego_length,
  double ego_width, double margin, double threshold)
{
  CollisionCheck out;
  const auto headings = waypoint_headings(traj);
  const auto & grid = occupancy.grid;
  const double res = grid.resolution;

  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    const OrientedBox footprint{
      traj.points[t], headings[t], ego_length + 2.0 * margin, ego_width + 2.0 * margin};
    Vec2 lo;
    Vec2 hi;
    footprint.bounds(lo, hi);
    // Candidate cell index range, possibly outside the raster.
    const auto ix0 = static_cast<long long>(std::floor((lo.x - grid.origin.x) / res));
    const auto ix1 = static_cast<long long>(std::floor((hi.x - grid.origin.x) / res));
    const auto iy0 = static_cast<long long>(std::floor((lo.y - grid.origin.y) / res));
    const auto iy1 = static_cast<long long>(std::floor((hi.y - grid.origin.y) / res));

    double step_max = 0.0;
    for (long long iy = iy0; iy <= iy1; ++iy) {
      for (long long ix = ix0; ix <= ix1; ++ix) {
        const Vec2 cmin{grid.origin.x + static_cast<double>(ix) * res, grid.origin.y + static_cast<double>(iy) * res};
        const Vec2 cmax{cmin.x + res, cmin.y + res};
        if (!footprint.intersects_aabb(cmin, cmax)) {
          continue;
        }
        const bool inside = ix >= 0 && iy >= 0 && ix < static_cast<long long>(grid.nx) &&
                            iy < static_cast<long long>(grid.ny);
        if (!inside) {
          ++out.cells_out_of_scope[t];
          continue;
        }
        step_max = std::max(
          step_max, occupancy.value(static_cast<int>(t + 1), static_cast<std::size_t>(ix), static_cast<std::size_t>(iy)));
      }
    }
    out.step_max[t] = step_max;
    out.step_collides[t] = step_max > threshold;
    out.collides = out.collides || out.step_collides[t];
  }
  return out;
}

CollisionCheck collision_probability(const SceneSnapshot & snap, const Trajectory & traj, const ToolConfig & config)
{
  return collision_probability(snap.occupancy, traj, config.ego_length, config.ego_width,
    config.collision_margin, config.collision_threshold);
}

MapLayer parse_map_layer(std::string_view name)
{
  if (name == "drivable") {
    return MapLayer::drivable;
  }
  if (name == "lane_category") {
    return MapLayer::lane_category;
  }
  if (name == "shoulder") {
    return MapLayer::shoulder;
  }
  if (name == "divider") {
    return MapLayer::divider;
  }
  throw UnknownLayer(fmt::format("unknown map layer '{}'", name));
}

std::vector<MapValue> map_value_at(
  const SceneSnapshot & snap, MapLayer layer, std::span<const Vec2> points, bool ret_prob)
{
  const auto & map = snap.map;
  std::vector<MapValue> out;
  out.reserve(points.size());
  for (const auto & p : points) {
    MapValue v;
    const auto cell = map.grid.locate(p);
    if (!cell) {
      out.push_back(v);
      continue;
    }
    const auto linear = map.grid.linear(*cell);
    v.status = MapStatus::ok;
    switch (layer) {
      case MapLayer::drivable:
        v.drivable = map.drivable[linear];
        break;
      case MapLayer::lane_category: {
        const auto it = map.lane_category.find(linear);
        if (it == map.lane_category.end() || it->second.empty()) {
          v.status = MapStatus::undefined;
          break;
        }
        const auto & dist = it->second;
        const auto best = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        v.lane_category = map.lane_category_names[best];
        if (ret_prob) {
          v.lane_probabilities = dist;
        }
        break;
      }
      case MapLayer::shoulder:
      case MapLayer::divider: {
        const auto & layer_map = layer == MapLayer::shoulder ? map.shoulder_distance : map.divider_distance;
        const auto it = layer_map.find(linear);
        if (it == layer_map.end()) {
          v.status = MapStatus::undefined;
        } else {
          v.distances = it->second;
        }
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<CrossingHit> nearest_ped_crossing(const SceneSnapshot & snap)
{
  std::optional<CrossingHit> best;
  for (const auto & c : snap.map.ped_crossings) {
    const double d = c.norm();
    if (!best || d < best->distance) {
      best = CrossingHit{c, d};
    }
  }
  return best;
}

DrivableCheck drivable_check_for_trajectory(const SceneSnapshot & snap, const Trajectory & traj)
{
  DrivableCheck out;
  const auto values = map_value_at(snap, MapLayer::drivable, traj.points);
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    out.out_of_scope[t] = !values[t].ok();
    out.drivable[t] = values[t].ok() && values[t].drivable;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch and observation rendering

namespace
{

std::string fmt_point(const Vec2 & p) { return fmt::format("({:.2f}, {:.2f})", p.x, p.y); }

std::string render_detection(const Detection & d)
{
  return fmt::format("object id: {}, category: {}, position: {}, size: ({:.2f}, {:.2f})",
    d.object_id, scene::to_string(d.category), fmt_point(d.center), d.length, d.width);
}

json detection_json(const Detection & d)
{
  return json{{"id", d.object_id}, {"category", scene::to_string(d.category)},
    {"position", json::array({d.center.x, d.center.y})}, {"size", json::array({d.length, d.width})},
    {"heading", d.heading}};
}

std::string render_prediction(const PredictedTrajectory & p)
{
  std::string line = fmt::format("object id: {}, future waypoints:", p.object_id);
  for (const auto & wp : p.waypoints) {
    line += fmt::format(" t={} {}", wp.timestep, fmt_point(wp.point));
  }
  return line;
}

json prediction_json(const PredictedTrajectory & p)
{
  json wps = json::array();
  for (const auto & wp : p.waypoints) {
    wps.push_back(json::array({wp.timestep, wp.point.x, wp.point.y}));
  }
  return json{{"id", p.object_id}, {"waypoints", wps}};
}

ToolResult none_result(std::string text) { return ToolResult{std::move(text), json(), true, std::nullopt}; }

ToolResult error_result(const std::string & kind, const std::string & message)
{
  return ToolResult{fmt::format("Error ({}): {}", kind, message), json(), false, kind};
}

ToolResult detection_list(const std::vector<Detection> & dets, const std::string & header, const std::string & none_text)
{
  if (dets.empty()) {
    return none_result(none_text);
  }
  std::string text = header;
  json data = json::array();
  for (const auto & d : dets) {
    text += "\n  - " + render_detection(d);
    data.push_back(detection_json(d));
  }
  return ToolResult{text, data, false, std::nullopt};
}

ToolResult prediction_list(const std::vector<PredictedTrajectory> & preds, const std::string & header,
  const std::vector<std::string> & without, const std::string & none_text)
{
  if (preds.empty()) {
    std::string text = none_text;
    for (const auto & id : without) {
      text += fmt::format("\n  - object id: {}, future trajectory: None", id);
    }
    return none_result(text);
  }
  std::string text = header;
  json data = json::array();
  for (const auto & p : preds) {
    text += "\n  - " + render_prediction(p);
    data.push_back(prediction_json(p));
  }
  for (const auto & id : without) {
    text += fmt::format("\n  - object id: {}, future trajectory: None", id);
  }
  return ToolResult{text, data, false, std::nullopt};
}

// Argument accessors; throw ArgumentError with the parameter name.

const json & require_arg(const json & args, const char * name)
{
  if (!args.contains(name)) {
    throw ArgumentError(fmt::format("missing required argument '{}'", name));
  }
  return args.at(name);
}

double number_arg(const json & args, const char * name)
{
  const auto & v = require_arg(args, name);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw ArgumentError(fmt::format("argument '{}' must be a finite number", name));
  }
  return v.get<double>();
}

int timestep_arg(const json & args)
{
  const auto & v = require_arg(args, "timestep");
  if (v.is_number_integer()) {
    return v.get<int>();
  }
  if (v.is_number_float() && std::isfinite(v.get<double>()) && std::floor(v.get<double>()) == v.get<double>() &&
    std::abs(v.get<double>()) < 1e6)
  {
    return static_cast<int>(v.get<double>());
  }
  throw ArgumentError("argument 'timestep' must be an integer");
}

std::vector<std::string> ids_arg(const json & args)
{
  const auto & v = require_arg(args, "object_ids");
  if (!v.is_array()) {
    throw ArgumentError("argument 'object_ids' must be a list of strings");
  }
  std::vector<std::string> ids;
  for (const auto & item : v) {
    if (!item.is_string()) {
      throw ArgumentError("argument 'object_ids' must be a list of strings");
    }
    ids.push_back(item.get<std::string>());
  }
  return ids;
}

std::vector<Vec2> points_arg(const json & args, const char * name)
{
  const auto & v = require_arg(args, name);
  if (!v.is_array()) {
    throw ArgumentError(fmt::format("argument '{}' must be a list of [x, y] pairs", name));
  }
  std::vector<Vec2> out;
  for (const auto & item : v) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number() ||
      !std::isfinite(item[0].get<double>()) || !std::isfinite(item[1].get<double>()))
    {
      throw ArgumentError(fmt::format("argument '{}' must be a list of [x, y] pairs", name));
    }
    out.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  return out;
}

Trajectory trajectory_arg(const json & args)
{
  const auto pts = points_arg(args, "trajectory");
  if (pts.size() != kHorizonSteps) {
    throw ArgumentError(fmt::format("argument 'trajectory' must hold 6 waypoints, got {}", pts.size()));
  }
  Trajectory traj;
  std::copy(pts.begin(), pts.end(), traj.points.begin());
  return traj;
}

RectRegion range_arg(const json & args)
{
  return ego_frame_rect(number_arg(args, "x_start"), number_arg(args, "x_end"),
    number_arg(args, "y_start"), number_arg(args, "y_end"));
}

bool bool_arg(const json & args, const char * name, bool fallback)
{
  if (!args.contains(name) || args.at(name).is_null()) {
    return fallback;
  }
  if (!args.at(name).is_boolean()) {
    throw ArgumentError(fmt::format("argument '{}' must be a boolean", name));
  }
  return args.at(name).get<bool>();
}

std::string format_probability(const std::optional<double> & p)
{
  return p ? fmt::format("{:.2f}", *p) : std::string("None (out of the occupancy prediction scope)");
}

ToolResult render_map_values(const std::vector<Vec2> & points, const std::vector<MapValue> & values,
  MapLayer layer, const std::vector<std::string> & names, const std::string & header)
{
  if (points.empty()) {
    return none_result("No locations were given. Result: None");
  }
  std::string text = header;
  json data = json::array();
  bool any_value = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto & v = values[i];
    text += fmt::format("\n  - location {}: ", fmt_point(points[i]));
    if (v.status == MapStatus::out_of_scope) {
      text += "None (out of the map scope)";
      data.push_back(nullptr);
      continue;
    }
    if (v.status == MapStatus::undefined) {
      text += "None (no map data at this location)";
      data.push_back(nullptr);
      continue;
    }
    any_value = true;
    switch (layer) {
      case MapLayer::drivable:
        text += v.drivable ? "drivable" : "not drivable";
        data.push_back(v.drivable);
        break;
      case MapLayer::lane_category: {
        text += "lane category " + v.lane_category;
        json entry{{"category", v.lane_category}};
        if (!v.lane_probabilities.empty()) {
          text += " (probabilities:";
          for (std::size_t k = 0; k < v.lane_probabilities.size(); ++k) {
            text += fmt::format(" {}={:.2f}", names[k], v.lane_probabilities[k]);
          }
          text += ")";
          entry["probabilities"] = v.lane_probabilities;
        }
        data.push_back(entry);
        break;
      }
      case MapLayer::shoulder:
      case MapLayer::divider: {
        const char * what = layer == MapLayer::shoulder ? "shoulder" : "lane divider";
        text += fmt::format("distance to left {} {:.2f} m, right {} {:.2f} m", what, v.distances.left, what,
          v.distances.right);
        data.push_back(json{{"left", v.distances.left}, {"right", v.distances.right}});
        break;
      }
    }
  }
  if (!any_value) {
    return none_result(text);
  }
  return ToolResult{text, data, false, std::nullopt};
}

ToolResult render_current_sides(const SceneSnapshot & snap, MapLayer layer)
{
  const std::vector<Vec2> ego{Vec2{0.0, 0.0}};
  const auto v = map_value_at(snap, layer, ego).front();
  const char * what = layer == MapLayer::shoulder ? "road shoulders" : "lane dividers";
  if (!v.ok()) {
    return none_result(fmt::format("Distance to both sides of {} at the current location: None", what));
  }
  return ToolResult{fmt::format("Distance to both sides of {} at the current location: left {:.2f} m, right {:.2f} m",
                      what, v.distances.left, v.distances.right),
    json{{"left", v.distances.left}, {"right", v.distances.right}}, false, std::nullopt};
}

ToolResult run_tool(const SceneSnapshot & snap, const std::string & name, const json & args, const ToolConfig & config)
{
  if (name == "get_leading_object_detection") {
    const auto lead = leading_detection(snap, config);
    if (!lead) {
      return none_result("No leading object detected. Result: None");
    }
    return ToolResult{"Leading object detected: " + render_detection(*lead), detection_json(*lead), false, std::nullopt};
  }
  if (name == "get_surrounding_object_detections") {
    return detection_list(detections_in_rect(snap, ego_frame_rect(-10.0, 10.0, -10.0, 10.0)),
      "Surrounding objects detected within the 20m*20m range:",
      "No surrounding object detected within the 20m*20m range. Result: None");
  }
  if (name == "get_front_object_detections") {
    return detection_list(detections_in_rect(snap, ego_frame_rect(-10.0, 10.0, 0.0, 40.0)),
      "Front objects detected within the 20m*40m range:",
      "No front object detected within the 20m*40m range. Result: None");
  }
  if (name == "get_object_detections_in_range") {
    const auto rect = range_arg(args);
    const auto label = fmt::format("({:.2f}, {:.2f})*({:.2f}, {:.2f})", rect.x_start, rect.x_end, rect.y_start, rect.y_end);
    return detection_list(detections_in_rect(snap, rect), "Objects detected within range " + label + ":",
      "No object detected within range " + label + ". Result: None");
  }
  if (name == "get_all_object_detections") {
    return detection_list(detections_in_rect(snap, full_extent()), "All objects detected in the scene:",
      "No object detected in the scene. Result: None");
  }
  if (name == "get_leading_object_future_trajectory") {
    const auto lead = leading_detection(snap, config);
    if (!lead) {
      return none_result("No leading object detected. Result: None");
    }
    const std::vector<std::string> ids{lead->object_id};
    const auto lookup = trajectories_for_objects(snap, ids);
    return prediction_list(lookup.found, "Predicted future trajectory of the leading object:",
      lookup.without_prediction, "The leading object has no predicted future trajectory. Result: None");
  }
  if (name == "get_future_trajectories_for_specific_objects") {
    const auto ids = ids_arg(args);
    const auto lookup = trajectories_for_objects(snap, ids);
    return prediction_list(lookup.found, "Predicted future trajectories:", lookup.without_prediction,
      "No predicted future trajectory for the requested objects. Result: None");
  }
  if (name == "get_future_trajectories_in_range") {
    const auto rect = range_arg(args);
    const auto label = fmt::format("({:.2f}, {:.2f})*({:.2f}, {:.2f})", rect.x_start, rect.x_end, rect.y_start, rect.y_end);
    return prediction_list(trajectories_in_rect(snap, rect), "Predicted future trajectories passing through range " + label + ":",
      {}, "No predicted future trajectory passes through range " + label + ". Result: None");
  }
  if (name == "get_future_waypoint_of_specific_objects_at_timestep") {
    const auto ids = ids_arg(args);
    const int t = timestep_arg(args);
    const auto lookup = waypoints_at_timestep(snap, ids, t);
    std::string body;
    json data = json::array();
    for (const auto & p : lookup.points) {
      body += fmt::format("\n  - object id: {}, position: {}", p.object_id, fmt_point(p.point));
      data.push_back(json{{"id", p.object_id}, {"position", json::array({p.point.x, p.point.y})}});
    }
    for (const auto & id : lookup.missing) {
      body += fmt::format("\n  - object id: {}, position: None", id);
    }
    if (lookup.points.empty()) {
      return none_result(fmt::format("No future waypoint at timestep {}. Result: None", t) + body);
    }
    return ToolResult{fmt::format("Future waypoints at timestep {}:", t) + body, data, false, std::nullopt};
  }
  if (name == "get_all_future_trajectories") {
    return prediction_list(trajectories_in_rect(snap, full_extent()), "Predicted future trajectories of all objects:",
      {}, "No predicted future trajectory in the scene. Result: None");
  }
  if (name == "get_drivable_at_locations") {
    const auto pts = points_arg(args, "locations");
    return render_map_values(pts, map_value_at(snap, MapLayer::drivable, pts), MapLayer::drivable, {},
      "Drivability at the locations:");
  }
  if (name == "check_drivable_of_planned_trajectory") {
    const auto traj = trajectory_arg(args);
    const auto check = drivable_check_for_trajectory(snap, traj);
    std::string text = "Drivability of the planned trajectory:";
    json flags = json::array();
    std::vector<std::string> bad;
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      text += fmt::format("\n  - t={} {}: {}", t + 1, fmt_point(traj.points[t]),
        check.out_of_scope[t] ? "not drivable (out of the map scope)" : (check.drivable[t] ? "drivable" : "not drivable"));
      flags.push_back(check.drivable[t]);
      if (!check.drivable[t]) {
        bad.push_back(std::to_string(t + 1));
      }
    }
    text += bad.empty() ? "\nResult: all waypoints are drivable"
                        : fmt::format("\nResult: waypoints not drivable at timesteps {}", fmt::join(bad, ", "));
    return ToolResult{text, json{{"drivable", flags}}, false, std::nullopt};
  }
  if (name == "get_lane_category_at_locations") {
    const auto pts = points_arg(args, "locations");
    const bool ret_prob = bool_arg(args, "ret_prob", false);
    return render_map_values(pts, map_value_at(snap, MapLayer::lane_category, pts, ret_prob),
      MapLayer::lane_category, snap.map.lane_category_names, "Lane category at the locations:");
  }
  if (name == "get_distance_to_shoulder_at_locations") {
    const auto pts = points_arg(args, "locations");
    return render_map_values(pts, map_value_at(snap, MapLayer::shoulder, pts), MapLayer::shoulder, {},
      "Distance to both sides of road shoulders at the locations:");
  }
  if (name == "get_current_shoulder") {
    return render_current_sides(snap, MapLayer::shoulder);
  }
  if (name == "get_distance_to_lane_divider_at_locations") {
    const auto pts = points_arg(args, "locations");
    return render_map_values(pts, map_value_at(snap, MapLayer::divider, pts), MapLayer::divider, {},
      "Distance to both sides of road lane dividers at the locations:");
  }
  if (name == "get_current_lane_divider") {
    return render_current_sides(snap, MapLayer::divider);
  }
  if (name == "get_nearest_pedestrian_crossing") {
    const auto hit = nearest_ped_crossing(snap);
    if (!hit) {
      return none_result("No pedestrian crossing found. Result: None");
    }
    return ToolResult{fmt::format("Nearest pedestrian crossing at {}, {:.2f} m from the ego-vehicle", fmt_point(hit->point), hit->distance),
      json{{"position", json::array({hit->point.x, hit->point.y})}, {"distance", hit->distance}}, false, std::nullopt};
  }
  if (name == "get_occupancy_at_locations_for_timestep") {
    const auto pts = points_arg(args, "locations");
    const int t = timestep_arg(args);
    const auto probs = occupancy_at(snap, pts, t);
    std::string text = fmt::format("Occupancy probabilities at timestep {}:", t);
    json data = json::array();
    bool any = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      text += fmt::format("\n  - location {}: {}", fmt_point(pts[i]), format_probability(probs[i]));
      data.push_back(probs[i] ? json(*probs[i]) : json());
      any = any || probs[i].has_value();
    }
    if (!any) {
      return none_result(pts.empty() ? std::string("No locations were given. Result: None") : text);
    }
    return ToolResult{text, data, false, std::nullopt};
  }
  if (name == "check_collision_for_planned_trajectory") {
    const auto traj = trajectory_arg(args);
    const auto check = collision_probability(snap, traj, config);
    std::string text = fmt::format("Collision check for the planned trajectory (threshold {:.2f}, margin {:.2f} m):",
      config.collision_threshold, config.collision_margin);
    json maxima = json::array();
    std::vector<std::string> hits;
    std::size_t ignored = 0;
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      text += fmt::format("\n  - t={} {}: max occupancy probability {:.2f}", t + 1, fmt_point(traj.points[t]), check.step_max[t]);
      maxima.push_back(check.step_max[t]);
      if (check.step_collides[t]) {
        hits.push_back(std::to_string(t + 1));
      }
      ignored += check.cells_out_of_scope[t];
    }
    if (ignored > 0) {
      text += fmt::format("\n  ({} footprint cells outside the occupancy prediction scope were ignored)", ignored);
    }
    text += hits.empty() ? "\nResult: no collision" : fmt::format("\nResult: collision detected at timesteps {}", fmt::join(hits, ", "));
    return ToolResult{text, json{{"step_max", maxima}, {"collides", check.collides}}, false, std::nullopt};
  }
  throw UnknownTool(fmt::format("no tool named '{}'", name));
}

}  // namespace

ToolResult dispatch(const SceneSnapshot & snap, const ToolCall & call, const ToolRegistry & registry, const ToolConfig & config)
{
  if (registry.find(call.name) == nullptr) {
    return error_result("UnknownTool", fmt::format("no tool named '{}'", call.name));
  }
  const json & args = call.arguments.is_null() ? json::object() : call.arguments;
  if (!args.is_object()) {
    return error_result("ArgumentError", fmt::format("arguments of '{}' must be a JSON object", call.name));
  }
  try {
    return run_tool(snap, call.name, args, config);
  } catch (const Error & e) {
    return error_result(e.kind(), e.what());
  } catch (const std::exception & e) {
    return error_result("ArgumentError", e.what());
  }
}

}  // namespace agent_driver::tools
