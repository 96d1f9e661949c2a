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

namespace agent_driver::tools
{

using nlohmann::json;

std::string_view to_string(ToolModule module)
{
  switch (module) {
    case ToolModule::detection:
      return "detection";
    case ToolModule::prediction:
      return "prediction";
    case ToolModule::map:
      return "map";
    case ToolModule::occupancy:
      return "occupancy";
  }
  return "detection";
}

namespace
{

json no_params() { return json{{"type", "object"}, {"properties", json::object()}, {"required", json::array()}}; }

json number_prop(const char * description) { return json{{"type", "number"}, {"description", description}}; }

json range_params()
{
  return json{{"type", "object"},
    {"properties",
      {{"x_start", number_prop("lower x bound in meters (rightward positive)")},
        {"x_end", number_prop("upper x bound in meters")},
        {"y_start", number_prop("lower y bound in meters (forward positive)")},
        {"y_end", number_prop("upper y bound in meters")}}},
    {"required", json::array({"x_start", "x_end", "y_start", "y_end"})}};
}

json point_list_prop(const char * description)
{
  return json{{"type", "array"}, {"description", description},
    {"items", {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2}, {"maxItems", 2}}}};
}

json object_ids_prop()
{
  return json{{"type", "array"}, {"description", "object ids"}, {"items", {{"type", "string"}}}};
}

json timestep_prop()
{
  return json{{"type", "integer"}, {"minimum", 1}, {"maximum", 6},
    {"description", "future timestep index, 1..6 at 0.5 s spacing"}};
}

json params(json properties, json required)
{
  return json{{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}};
}

}  // namespace

ToolRegistry::ToolRegistry()
{
  const auto locations = point_list_prop("locations [(x1, y1), ..., (xn, yn)] in meters");
  const auto trajectory = point_list_prop("planned trajectory [(x1, y1), ..., (x6, y6)] in meters");

  descriptors_ = {
    {"get_leading_object_detection",
      "Get the detection of the leading object, the function will return the leading object id "
      "and its position and size. If there is no leading object, return None.",
      no_params(), ToolModule::detection},
    {"get_surrounding_object_detections",
      "Get the detections of the surrounding objects in a 20m*20m range, the function will return "
      "a list of surrounding object ids and their positions and sizes. If there is no surrounding "
      "object, return None.",
      no_params(), ToolModule::detection},
    {"get_front_object_detections",
      "Get the detections of the objects in front of you in a 20m*40m range, the function will "
      "return a list of front object ids and their positions and sizes. If there is no front "
      "object, return None.",
      no_params(), ToolModule::detection},
    {"get_object_detections_in_range",
      "Get the detections of the objects in a customized range (x_start, x_end)*(y_start, y_end)m^2, "
      "the function will return a list of object ids and their positions and sizes. If there is no "
      "object, return None.",
      range_params(), ToolModule::detection},
    {"get_all_object_detections",
      "Get the detections of all objects in the whole scene, the function will return a list of "
      "object ids and their positions and sizes. Always avoid using this function if there are "
      "other choices.",
      no_params(), ToolModule::detection},
    {"get_leading_object_future_trajectory",
      "Get the predicted future trajectory of the leading object, the function will return a "
      "trajectory containing a series of waypoints. If there is no leading vehicle, return None.",
      no_params(), ToolModule::prediction},
    {"get_future_trajectories_for_specific_objects",
      "Get the future trajectories of specific objects (specified by a List of object ids), the "
      "function will return trajectories for each object. If there is no object, return None.",
      params(json{{"object_ids", object_ids_prop()}}, json::array({"object_ids"})),
      ToolModule::prediction},
    {"get_future_trajectories_in_range",
      "Get the future trajectories where any waypoint in this trajectory falls into a given range "
      "(x_start, x_end)*(y_start, y_end)m^2, the function will return each trajectory that "
      "satisfies the condition. If there is no trajectory satisfied, return None",
      range_params(), ToolModule::prediction},
    {"get_future_waypoint_of_specific_objects_at_timestep",
      "Get the future waypoints of specific objects at a specific timestep, the function will "
      "return a list of waypoints. If there is no object or the object does not have a waypoint at "
      "the given timestep, return None.",
      params(json{{"object_ids", object_ids_prop()}, {"timestep", timestep_prop()}},
        json::array({"object_ids", "timestep"})),
      ToolModule::prediction},
    {"get_all_future_trajectories",
      "Get the predicted future trajectories of all objects in the whole scene, the function will "
      "return a list of object ids and their future trajectories. Always avoid using this function "
      "if there are other choices.",
      no_params(), ToolModule::prediction},
    {"get_drivable_at_locations",
      "Get the drivability at the locations [(x_1, y_1), ..., (x_n, y_n)]. If the location is out "
      "of the map scope, return None.",
      params(json{{"locations", locations}}, json::array({"locations"})), ToolModule::map},
    {"check_drivable_of_planned_trajectory", "Check the drivability at the planned trajectory.",
      params(json{{"trajectory", trajectory}}, json::array({"trajectory"})), ToolModule::map},
    {"get_lane_category_at_locations",
      "Get the lane category at the locations [(x_1, y_1), ..., (x_n, y_n)]. If the location is "
      "out of the map scope, return None.",
      params(json{{"locations", locations},
               {"ret_prob", {{"type", "boolean"}, {"description", "also return the category probabilities"}}}},
        json::array({"locations"})),
      ToolModule::map},
    {"get_distance_to_shoulder_at_locations",
      "Get the distance to both sides of road shoulders at the locations [(x_1, y_1), ..., "
      "(x_n, y_n)]. If the location is out of the map scope, return None.",
      params(json{{"locations", locations}}, json::array({"locations"})), ToolModule::map},
    {"get_current_shoulder",
      "Get the distance to both sides of road shoulders for the current ego-vehicle location.",
      no_params(), ToolModule::map},
    {"get_distance_to_lane_divider_at_locations",
      "Get the distance to both sides of road lane dividers at the locations [(x_1, y_1), ..., "
      "(x_n, y_n)]. If the location is out of the map scope, return None.",
      params(json{{"locations", locations}}, json::array({"locations"})), ToolModule::map},
    {"get_current_lane_divider",
      "Get the distance to both sides of road lane dividers for the current ego-vehicle location.",
      no_params(), ToolModule::map},
    {"get_nearest_pedestrian_crossing",
      "Get the location of the nearest pedestrian crossing to the ego-vehicle. If there is no such "
      "pedestrian crossing, return None.",
      no_params(), ToolModule::map},
    {"get_occupancy_at_locations_for_timestep",
      "Get the probability whether a list of locations [(x_1, y_1), ..., (x_n, y_n)] is occupied at "
      "the timestep t. If the location is out of the occupancy prediction scope, return None.",
      params(json{{"locations", locations}, {"timestep", timestep_prop()}},
        json::array({"locations", "timestep"})),
      ToolModule::occupancy},
    {"check_collision_for_planned_trajectory",
      "Check the probability of whether a planned trajectory [(x_1, y_1), ..., (x_n, y_n)] collides "
      "with other objects.",
      params(json{{"trajectory", trajectory}}, json::array({"trajectory"})), ToolModule::occupancy},
  };
}

const ToolDescriptor * ToolRegistry::find(std::string_view name) const
{
  for (const auto & d : descriptors_) {
    if (d.name == name) {
      return &d;
    }
  }
  return nullptr;
}

std::vector<const ToolDescriptor *> ToolRegistry::for_module(ToolModule module) const
{
  std::vector<const ToolDescriptor *> out;
  for (const auto & d : descriptors_) {
    if (d.module == module) {
      out.push_back(&d);
    }
  }
  return out;
}

json ToolRegistry::export_functions() const
{
  json out = json::array();
  for (const auto & d : descriptors_) {
    out.push_back(json{{"name", d.name}, {"description", d.description}, {"parameters", d.parameters}});
  }
  return out;
}

json ToolRegistry::export_functions(ToolModule module) const
{
  json out = json::array();
  for (const auto * d : for_module(module)) {
    out.push_back(json{{"name", d->name}, {"description", d->description}, {"parameters", d->parameters}});
  }
  return out;
}

}  // namespace agent_driver::tools
