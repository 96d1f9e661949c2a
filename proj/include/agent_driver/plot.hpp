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

#ifndef AGENT_DRIVER__PLOT_HPP_
#define AGENT_DRIVER__PLOT_HPP_

#include "agent_driver/scene_model.hpp"

#include <optional>
#include <set>
#include <string>

namespace agent_driver::plot
{

struct PlotOptions
{
  double pixels_per_meter = 10.0;
  double padding = 5.0;  // [m] around the content
  /// Draw occupancy cells above zero for this timestep (1..6).
  std::optional<int> occupancy_step;
};

/// Bird's-eye view: detections as polygons (notable ones in red), the ego
/// box, the planned path as a red polyline and the ground truth as a green
/// polyline. +y (forward) points up.
std::string render_svg(
  const scene::SceneSnapshot & snap, const std::optional<Trajectory> & planned,
  const std::set<std::string> & notable_ids, const PlotOptions & options = {});

}  // namespace agent_driver::plot

#endif  // AGENT_DRIVER__PLOT_HPP_
