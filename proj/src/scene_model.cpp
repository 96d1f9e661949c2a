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

#include "agent_driver/scene_model.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace agent_driver::scene
{

using nlohmann::json;

std::string_view to_string(MissionGoal goal)
{
  switch (goal) {
    case MissionGoal::go_straight:
      return "go_straight";
    case MissionGoal::turn_left:
      return "turn_left";
    case MissionGoal::turn_right:
      return "turn_right";
  }
  return "go_straight";
}

std::string_view to_string(ObjectCategory category)
{
  switch (category) {
    case ObjectCategory::vehicle:
      return "vehicle";
    case ObjectCategory::pedestrian:
      return "pedestrian";
    case ObjectCategory::cyclist:
      return "cyclist";
    case ObjectCategory::other:
      return "other";
  }
  return "other";
}

std::optional<MissionGoal> parse_mission_goal(std::string_view text)
{
  for (auto goal : {MissionGoal::go_straight, MissionGoal::turn_left, MissionGoal::turn_right}) {
    if (to_string(goal) == text) {
      return goal;
    }
  }
  return std::nullopt;
}

std::optional<ObjectCategory> parse_object_category(std::string_view text)
{
  for (auto c : {ObjectCategory::vehicle, ObjectCategory::pedestrian, ObjectCategory::cyclist,
         ObjectCategory::other}) {
    if (to_string(c) == text) {
      return c;
    }
  }
  return std::nullopt;
}

std::array<double, 3> EgoState::goal_one_hot() const
{
  std::array<double, 3> one_hot{0.0, 0.0, 0.0};
  one_hot[static_cast<std::size_t>(mission_goal)] = 1.0;
  return one_hot;
}

std::optional<Vec2> PredictedTrajectory::at(int timestep) const
{
  for (const auto & wp : waypoints) {
    if (wp.timestep == timestep) {
      return wp.point;
    }
  }
  return std::nullopt;
}

std::optional<CellIndex> GridSpec::locate(const Vec2 & p) const
{
  if (nx == 0 || ny == 0 || !std::isfinite(p.x) || !std::isfinite(p.y)) {
    return std::nullopt;
  }
  const double fx = std::floor((p.x - origin.x) / resolution);
  const double fy = std::floor((p.y - origin.y) / resolution);
  if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(nx) || fy >= static_cast<double>(ny)) {
    return std::nullopt;
  }
  return CellIndex{static_cast<std::size_t>(fx), static_cast<std::size_t>(fy)};
}

Vec2 GridSpec::cell_min(std::size_t ix, std::size_t iy) const
{
  return {origin.x + static_cast<double>(ix) * resolution,
    origin.y + static_cast<double>(iy) * resolution};
}

Vec2 GridSpec::cell_center(std::size_t ix, std::size_t iy) const
{
  return {origin.x + (static_cast<double>(ix) + 0.5) * resolution,
    origin.y + (static_cast<double>(iy) + 0.5) * resolution};
}

OccupancyVolume OccupancyVolume::zeros(const GridSpec & grid)
{
  OccupancyVolume volume;
  volume.grid = grid;
  volume.values.assign(kHorizonSteps * grid.cell_count(), 0.0);
  return volume;
}

double OccupancyVolume::value(int timestep, std::size_t ix, std::size_t iy) const
{
  return values[static_cast<std::size_t>(timestep - 1) * grid.cell_count() + iy * grid.nx + ix];
}

void OccupancyVolume::set(int timestep, std::size_t ix, std::size_t iy, double p)
{
  values[static_cast<std::size_t>(timestep - 1) * grid.cell_count() + iy * grid.nx + ix] = p;
}

std::optional<double> OccupancyVolume::at(int timestep, const Vec2 & p) const
{
  const auto cell = grid.locate(p);
  if (!cell) {
    return std::nullopt;
  }
  return value(timestep, cell->ix, cell->iy);
}

const Detection * SceneSnapshot::find_detection(std::string_view object_id) const
{
  for (const auto & d : detections) {
    if (d.object_id == object_id) {
      return &d;
    }
  }
  return nullptr;
}

const PredictedTrajectory * SceneSnapshot::find_prediction(std::string_view object_id) const
{
  for (const auto & p : predictions) {
    if (p.object_id == object_id) {
      return &p;
    }
  }
  return nullptr;
}

namespace
{

// Typed accessors that report the JSON path of the failing value.

std::string join(const std::string & path, const char * key)
{
  return path.empty() ? std::string(key) : path + "." + key;
}

const json & member(const json & obj, const std::string & path, const char * key)
{
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(join(path, key), "missing required field");
  }
  return obj.at(key);
}

std::string index_path(const std::string & path, std::size_t i)
{
  return fmt::format("{}[{}]", path, i);
}

double as_number(const json & v, const std::string & path)
{
  if (!v.is_number()) {
    throw ValidationError(path, "expected a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ValidationError(path, "expected a finite number");
  }
  return d;
}

std::size_t as_index(const json & v, const std::string & path)
{
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(path, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

const std::string & as_string(const json & v, const std::string & path)
{
  if (!v.is_string()) {
    throw ValidationError(path, "expected a string");
  }
  return v.get_ref<const std::string &>();
}

const json & as_array(const json & v, const std::string & path)
{
  if (!v.is_array()) {
    throw ValidationError(path, "expected an array");
  }
  return v;
}

Vec2 as_vec2(const json & v, const std::string & path)
{
  if (!v.is_array() || v.size() != 2) {
    throw ValidationError(path, "expected a [x, y] pair");
  }
  return {as_number(v[0], index_path(path, 0)), as_number(v[1], index_path(path, 1))};
}

double as_heading(const json & v, const std::string & path)
{
  const double h = as_number(v, path);
  if (!(h > -std::numbers::pi && h <= std::numbers::pi)) {
    throw ValidationError(path, "heading must lie in (-pi, pi]");
  }
  return h;
}

double as_probability(const json & v, const std::string & path)
{
  const double p = as_number(v, path);
  if (p < 0.0 || p > 1.0) {
    throw ValidationError(path, "probability must lie in [0, 1]");
  }
  return p;
}

json vec2_json(const Vec2 & p) { return json::array({p.x, p.y}); }

GridSpec parse_grid(const json & obj, const std::string & path)
{
  GridSpec grid;
  grid.origin = as_vec2(member(obj, path, "origin"), join(path, "origin"));
  grid.resolution = as_number(member(obj, path, "resolution"), join(path, "resolution"));
  if (!(grid.resolution > 0.0)) {
    throw ValidationError(join(path, "resolution"), "must be positive");
  }
  const auto & dims = member(obj, path, "dims");
  if (!dims.is_array() || dims.size() != 2) {
    throw ValidationError(join(path, "dims"), "expected [nx, ny]");
  }
  grid.nx = as_index(dims[0], index_path(join(path, "dims"), 0));
  grid.ny = as_index(dims[1], index_path(join(path, "dims"), 1));
  return grid;
}

json grid_json(const GridSpec & grid)
{
  return json{{"origin", vec2_json(grid.origin)}, {"resolution", grid.resolution},
    {"dims", json::array({grid.nx, grid.ny})}};
}

CellIndex parse_cell(const json & row, const std::string & path, const GridSpec & grid)
{
  const auto ix = as_index(row[0], index_path(path, 0));
  const auto iy = as_index(row[1], index_path(path, 1));
  if (ix >= grid.nx || iy >= grid.ny) {
    throw ValidationError(path, "cell index outside the grid");
  }
  return {ix, iy};
}

EgoState parse_ego(const json & obj, const std::string & path, const SceneOptions & options)
{
  EgoState ego;
  if (obj.contains("position")) {
    const auto p = as_vec2(obj.at("position"), join(path, "position"));
    if (p.x != 0.0 || p.y != 0.0) {
      throw ValidationError(join(path, "position"), "ego position must be the origin [0, 0]");
    }
  }
  ego.heading = as_heading(member(obj, path, "heading"), join(path, "heading"));
  ego.velocity = as_vec2(member(obj, path, "velocity"), join(path, "velocity"));
  ego.acceleration = as_vec2(member(obj, path, "acceleration"), join(path, "acceleration"));

  const auto hist_path = join(path, "history");
  const auto & hist = as_array(member(obj, path, "history"), hist_path);
  if (hist.size() != options.history_length) {
    throw ValidationError(
      hist_path, fmt::format("expected {} past waypoints, got {}", options.history_length,
                   hist.size()));
  }
  for (std::size_t i = 0; i < hist.size(); ++i) {
    ego.history.push_back(as_vec2(hist[i], index_path(hist_path, i)));
  }

  const auto goal_path = join(path, "mission_goal");
  const auto goal = parse_mission_goal(as_string(member(obj, path, "mission_goal"), goal_path));
  if (!goal) {
    throw ValidationError(goal_path, "expected go_straight, turn_left or turn_right");
  }
  ego.mission_goal = *goal;

  if (obj.contains("can_bus")) {
    const auto cb_path = join(path, "can_bus");
    const auto & cb = as_array(obj.at("can_bus"), cb_path);
    for (std::size_t i = 0; i < cb.size(); ++i) {
      ego.can_bus_extras.push_back(as_number(cb[i], index_path(cb_path, i)));
    }
  }
  return ego;
}

Detection parse_detection(const json & obj, const std::string & path)
{
  Detection d;
  d.object_id = as_string(member(obj, path, "id"), join(path, "id"));
  if (d.object_id.empty()) {
    throw ValidationError(join(path, "id"), "object id must be non-empty");
  }
  const auto cat_path = join(path, "category");
  const auto category = parse_object_category(as_string(member(obj, path, "category"), cat_path));
  if (!category) {
    throw ValidationError(cat_path, "expected vehicle, pedestrian, cyclist or other");
  }
  d.category = *category;
  d.center = as_vec2(member(obj, path, "center"), join(path, "center"));
  const auto size = as_vec2(member(obj, path, "size"), join(path, "size"));
  if (!(size.x > 0.0) || !(size.y > 0.0)) {
    throw ValidationError(join(path, "size"), "length and width must be positive");
  }
  d.length = size.x;
  d.width = size.y;
  d.heading = as_heading(member(obj, path, "heading"), join(path, "heading"));
  return d;
}

PredictedTrajectory parse_prediction(const json & obj, const std::string & path)
{
  PredictedTrajectory pred;
  pred.object_id = as_string(member(obj, path, "id"), join(path, "id"));
  const auto wp_path = join(path, "waypoints");
  const auto & wps = as_array(member(obj, path, "waypoints"), wp_path);
  int last = 0;
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const auto p = index_path(wp_path, i);
    if (!wps[i].is_array() || wps[i].size() != 3) {
      throw ValidationError(p, "expected [timestep, x, y]");
    }
    if (!wps[i][0].is_number_integer()) {
      throw ValidationError(index_path(p, 0), "timestep must be an integer");
    }
    const int t = wps[i][0].get<int>();
    if (t < 1 || t > static_cast<int>(kHorizonSteps)) {
      throw ValidationError(index_path(p, 0), "timestep must lie in 1..6");
    }
    if (t <= last) {
      throw ValidationError(index_path(p, 0), "timesteps must be strictly increasing");
    }
    last = t;
    pred.waypoints.push_back(
      {t, {as_number(wps[i][1], index_path(p, 1)), as_number(wps[i][2], index_path(p, 2))}});
  }
  return pred;
}

OccupancyVolume parse_occupancy(const json & obj, const std::string & path)
{
  const auto grid = parse_grid(member(obj, path, "grid"), join(path, "grid"));
  if (obj.contains("steps")) {
    const auto & steps = obj.at("steps");
    if (!steps.is_number_integer() || steps.get<long long>() != static_cast<long long>(kHorizonSteps)) {
      throw ValidationError(join(path, "steps"), "occupancy must cover exactly 6 timesteps");
    }
  }
  auto volume = OccupancyVolume::zeros(grid);

  if (obj.contains("dense")) {
    const auto dense_path = join(path, "dense");
    const auto & dense = as_array(obj.at("dense"), dense_path);
    if (dense.size() != kHorizonSteps) {
      throw ValidationError(dense_path, "expected 6 timestep slices");
    }
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      const auto t_path = index_path(dense_path, t);
      const auto & rows = as_array(dense[t], t_path);
      if (rows.size() != grid.ny) {
        throw ValidationError(t_path, "expected ny rows");
      }
      for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        const auto row_path = index_path(t_path, iy);
        const auto & row = as_array(rows[iy], row_path);
        if (row.size() != grid.nx) {
          throw ValidationError(row_path, "expected nx values");
        }
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
          volume.set(static_cast<int>(t + 1), ix, iy,
            as_probability(row[ix], index_path(row_path, ix)));
        }
      }
    }
  }

  if (obj.contains("cells")) {
    const auto cells_path = join(path, "cells");
    const auto & cells = as_array(obj.at("cells"), cells_path);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto p = index_path(cells_path, i);
      if (!cells[i].is_array() || cells[i].size() != 4) {
        throw ValidationError(p, "expected [t, ix, iy, p]");
      }
      const auto t = as_index(cells[i][0], index_path(p, 0));
      if (t < 1 || t > kHorizonSteps) {
        throw ValidationError(index_path(p, 0), "timestep must lie in 1..6");
      }
      const auto ix = as_index(cells[i][1], index_path(p, 1));
      const auto iy = as_index(cells[i][2], index_path(p, 2));
      if (ix >= grid.nx || iy >= grid.ny) {
        throw ValidationError(p, "cell index outside the grid");
      }
      volume.set(static_cast<int>(t), ix, iy, as_probability(cells[i][3], index_path(p, 3)));
    }
  }
  return volume;
}

std::map<std::size_t, SideDistances> parse_side_distances(
  const json & arr, const std::string & path, const GridSpec & grid)
{
  std::map<std::size_t, SideDistances> out;
  as_array(arr, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = index_path(path, i);
    if (!arr[i].is_array() || arr[i].size() != 4) {
      throw ValidationError(p, "expected [ix, iy, left_m, right_m]");
    }
    const auto cell = parse_cell(arr[i], p, grid);
    const SideDistances d{as_number(arr[i][2], index_path(p, 2)), as_number(arr[i][3], index_path(p, 3))};
    if (d.left < 0.0 || d.right < 0.0) {
      throw ValidationError(p, "distances must be non-negative");
    }
    out[grid.linear(cell)] = d;
  }
  return out;
}

MapLayers parse_map(const json & obj, const std::string & path)
{
  MapLayers map;
  map.grid = parse_grid(member(obj, path, "grid"), join(path, "grid"));
  const auto & grid = map.grid;
  map.drivable.assign(grid.cell_count(), false);

  if (obj.contains("drivable")) {
    const auto dpath = join(path, "drivable");
    const auto & d = obj.at("drivable");
    if (!d.is_object()) {
      throw ValidationError(dpath, "expected an object");
    }
    if (d.contains("default")) {
      if (!d.at("default").is_boolean()) {
        throw ValidationError(join(dpath, "default"), "expected a boolean");
      }
      map.drivable.assign(grid.cell_count(), d.at("default").get<bool>());
    }
    if (d.contains("rows")) {
      const auto rows_path = join(dpath, "rows");
      const auto & rows = as_array(d.at("rows"), rows_path);
      if (rows.size() != grid.ny) {
        throw ValidationError(rows_path, "expected ny rows");
      }
      for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        const auto & row = as_string(rows[iy], index_path(rows_path, iy));
        if (row.size() != grid.nx || row.find_first_not_of("01") != std::string::npos) {
          throw ValidationError(index_path(rows_path, iy), "expected nx characters of '0'/'1'");
        }
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
          map.drivable[iy * grid.nx + ix] = row[ix] == '1';
        }
      }
    }
    if (d.contains("cells")) {
      const auto cells_path = join(dpath, "cells");
      const auto & cells = as_array(d.at("cells"), cells_path);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto p = index_path(cells_path, i);
        if (!cells[i].is_array() || cells[i].size() != 3 || !cells[i][2].is_boolean()) {
          throw ValidationError(p, "expected [ix, iy, bool]");
        }
        map.drivable[grid.linear(parse_cell(cells[i], p, grid))] = cells[i][2].get<bool>();
      }
    }
  }

  if (obj.contains("lane_category")) {
    const auto lpath = join(path, "lane_category");
    const auto & lc = obj.at("lane_category");
    const auto & names = as_array(member(lc, lpath, "names"), join(lpath, "names"));
    for (std::size_t i = 0; i < names.size(); ++i) {
      map.lane_category_names.push_back(as_string(names[i], index_path(join(lpath, "names"), i)));
    }
    if (lc.contains("cells")) {
      const auto cells_path = join(lpath, "cells");
      const auto & cells = as_array(lc.at("cells"), cells_path);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto p = index_path(cells_path, i);
        if (!cells[i].is_array() || cells[i].size() != 3) {
          throw ValidationError(p, "expected [ix, iy, [p...]]");
        }
        const auto cell = parse_cell(cells[i], p, grid);
        const auto probs_path = index_path(p, 2);
        const auto & probs = as_array(cells[i][2], probs_path);
        if (probs.size() != map.lane_category_names.size()) {
          throw ValidationError(probs_path, "distribution length must match the category names");
        }
        std::vector<double> dist;
        for (std::size_t k = 0; k < probs.size(); ++k) {
          dist.push_back(as_probability(probs[k], index_path(probs_path, k)));
        }
        map.lane_category[grid.linear(cell)] = std::move(dist);
      }
    }
  }

  if (obj.contains("shoulder")) {
    map.shoulder_distance = parse_side_distances(obj.at("shoulder"), join(path, "shoulder"), grid);
  }
  if (obj.contains("divider")) {
    map.divider_distance = parse_side_distances(obj.at("divider"), join(path, "divider"), grid);
  }
  if (obj.contains("ped_crossings")) {
    const auto ppath = join(path, "ped_crossings");
    const auto & pcs = as_array(obj.at("ped_crossings"), ppath);
    for (std::size_t i = 0; i < pcs.size(); ++i) {
      map.ped_crossings.push_back(as_vec2(pcs[i], index_path(ppath, i)));
    }
  }
  return map;
}

GtBox parse_gt_box(const json & obj, const std::string & path)
{
  GtBox box;
  box.category = as_string(member(obj, path, "category"), join(path, "category"));
  box.center = as_vec2(member(obj, path, "center"), join(path, "center"));
  const auto size = as_vec2(member(obj, path, "size"), join(path, "size"));
  if (!(size.x > 0.0) || !(size.y > 0.0)) {
    throw ValidationError(join(path, "size"), "length and width must be positive");
  }
  box.length = size.x;
  box.width = size.y;
  box.heading = as_heading(member(obj, path, "heading"), join(path, "heading"));
  return box;
}

json side_distances_json(const std::map<std::size_t, SideDistances> & m, const GridSpec & grid)
{
  json arr = json::array();
  for (const auto & [linear, d] : m) {
    arr.push_back(json::array({linear % grid.nx, linear / grid.nx, d.left, d.right}));
  }
  return arr;
}

}  // namespace

SceneSnapshot parse_snapshot(const json & doc, const SceneOptions & options)
{
  if (!doc.is_object()) {
    throw ValidationError("$", "scene document must be a JSON object");
  }
  const auto & schema = as_string(member(doc, "", "schema"), "schema");
  if (schema != kSchemaTag) {
    throw ValidationError("schema", fmt::format("unsupported schema '{}'", schema));
  }

  SceneSnapshot snap;
  snap.scene_id = as_string(member(doc, "", "scene_id"), "scene_id");
  if (snap.scene_id.empty()) {
    throw ValidationError("scene_id", "must be non-empty");
  }
  snap.ego = parse_ego(member(doc, "", "ego"), "ego", options);

  if (doc.contains("detections")) {
    const auto & dets = as_array(doc.at("detections"), "detections");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      auto d = parse_detection(dets[i], index_path("detections", i));
      if (!seen.insert(d.object_id).second) {
        throw ValidationError(index_path("detections", i) + ".id", "duplicate object id");
      }
      snap.detections.push_back(std::move(d));
    }
  }

  if (doc.contains("predictions")) {
    const auto & preds = as_array(doc.at("predictions"), "predictions");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto path = index_path("predictions", i);
      auto p = parse_prediction(preds[i], path);
      if (snap.find_detection(p.object_id) == nullptr) {
        throw ValidationError(path + ".id", fmt::format("unknown object id '{}'", p.object_id));
      }
      if (!seen.insert(p.object_id).second) {
        throw ValidationError(path + ".id", "duplicate prediction for object");
      }
      snap.predictions.push_back(std::move(p));
    }
  }

  if (doc.contains("occupancy")) {
    snap.occupancy = parse_occupancy(doc.at("occupancy"), "occupancy");
  }
  if (doc.contains("map")) {
    snap.map = parse_map(doc.at("map"), "map");
  }

  if (doc.contains("gt_trajectory")) {
    const auto & gt = as_array(doc.at("gt_trajectory"), "gt_trajectory");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      pts.push_back(as_vec2(gt[i], index_path("gt_trajectory", i)));
    }
    snap.gt_trajectory = Trajectory::from_points(pts, "gt_trajectory");
  }
  if (doc.contains("gt_boxes")) {
    if (!snap.gt_trajectory) {
      throw ValidationError("gt_boxes", "ground-truth boxes require gt_trajectory");
    }
    const auto & steps = as_array(doc.at("gt_boxes"), "gt_boxes");
    if (steps.size() != kHorizonSteps) {
      throw ValidationError("gt_boxes", "expected one box list per timestep (6)");
    }
    GtBoxesPerStep boxes;
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      const auto tpath = index_path("gt_boxes", t);
      const auto & list = as_array(steps[t], tpath);
      for (std::size_t i = 0; i < list.size(); ++i) {
        boxes[t].push_back(parse_gt_box(list[i], index_path(tpath, i)));
      }
    }
    snap.gt_boxes_per_step = std::move(boxes);
  }
  return snap;
}

SceneSnapshot load_snapshot(const std::filesystem::path & path, const SceneOptions & options)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open scene file '{}'", path.string()));
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ParseError(fmt::format("malformed scene file '{}': {}", path.string(), e.what()));
  }
  return parse_snapshot(doc, options);
}

json to_json(const SceneSnapshot & snap)
{
  json doc;
  doc["schema"] = kSchemaTag;
  doc["scene_id"] = snap.scene_id;

  const auto & ego = snap.ego;
  json history = json::array();
  for (const auto & p : ego.history) {
    history.push_back(vec2_json(p));
  }
  doc["ego"] = json{{"position", vec2_json(ego.position)}, {"heading", ego.heading},
    {"velocity", vec2_json(ego.velocity)}, {"acceleration", vec2_json(ego.acceleration)},
    {"history", history}, {"mission_goal", to_string(ego.mission_goal)},
    {"can_bus", ego.can_bus_extras}};

  json dets = json::array();
  for (const auto & d : snap.detections) {
    dets.push_back(json{{"id", d.object_id}, {"category", to_string(d.category)},
      {"center", vec2_json(d.center)}, {"size", json::array({d.length, d.width})},
      {"heading", d.heading}});
  }
  doc["detections"] = dets;

  json preds = json::array();
  for (const auto & p : snap.predictions) {
    json wps = json::array();
    for (const auto & wp : p.waypoints) {
      wps.push_back(json::array({wp.timestep, wp.point.x, wp.point.y}));
    }
    preds.push_back(json{{"id", p.object_id}, {"waypoints", wps}});
  }
  doc["predictions"] = preds;

  const auto & occ = snap.occupancy;
  json cells = json::array();
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    for (std::size_t iy = 0; iy < occ.grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < occ.grid.nx; ++ix) {
        const double p = occ.value(static_cast<int>(t + 1), ix, iy);
        if (p != 0.0) {
          cells.push_back(json::array({t + 1, ix, iy, p}));
        }
      }
    }
  }
  doc["occupancy"] =
    json{{"grid", grid_json(occ.grid)}, {"steps", kHorizonSteps}, {"cells", cells}};

  const auto & map = snap.map;
  const auto n_true = static_cast<std::size_t>(std::count(map.drivable.begin(), map.drivable.end(), true));
  const bool default_drivable = n_true * 2 > map.drivable.size();
  json exceptions = json::array();
  for (std::size_t i = 0; i < map.drivable.size(); ++i) {
    if (map.drivable[i] != default_drivable) {
      exceptions.push_back(json::array({i % map.grid.nx, i / map.grid.nx, static_cast<bool>(map.drivable[i])}));
    }
  }
  json lane_cells = json::array();
  for (const auto & [linear, dist] : map.lane_category) {
    lane_cells.push_back(json::array({linear % map.grid.nx, linear / map.grid.nx, dist}));
  }
  json crossings = json::array();
  for (const auto & c : map.ped_crossings) {
    crossings.push_back(vec2_json(c));
  }
  doc["map"] = json{{"grid", grid_json(map.grid)},
    {"drivable", json{{"default", default_drivable}, {"cells", exceptions}}},
    {"lane_category", json{{"names", map.lane_category_names}, {"cells", lane_cells}}},
    {"shoulder", side_distances_json(map.shoulder_distance, map.grid)},
    {"divider", side_distances_json(map.divider_distance, map.grid)},
    {"ped_crossings", crossings}};

  if (snap.gt_trajectory) {
    json gt = json::array();
    for (const auto & p : snap.gt_trajectory->points) {
      gt.push_back(vec2_json(p));
    }
    doc["gt_trajectory"] = gt;
  }
  if (snap.gt_boxes_per_step) {
    json steps = json::array();
    for (const auto & list : *snap.gt_boxes_per_step) {
      json boxes = json::array();
      for (const auto & b : list) {
        boxes.push_back(json{{"category", b.category}, {"center", vec2_json(b.center)},
          {"size", json::array({b.length, b.width})}, {"heading", b.heading}});
      }
      steps.push_back(boxes);
    }
    doc["gt_boxes"] = steps;
  }
  return doc;
}

}  // namespace agent_driver::scene
