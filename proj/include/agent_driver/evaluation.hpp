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

#ifndef AGENT_DRIVER__EVALUATION_HPP_
#define AGENT_DRIVER__EVALUATION_HPP_

#include "agent_driver/scene_model.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::evaluation
{

enum class Convention { uniad, stp3 };

std::string_view to_string(Convention convention);
std::optional<Convention> parse_convention(std::string_view text);

using StepValues = std::array<double, kHorizonSteps>;
using StepFlags = std::array<bool, kHorizonSteps>;

/// Per-timestep Euclidean distance.
StepValues l2_profile(const Trajectory & pred, const Trajectory & gt);

/// Maps a ground-truth label to a category. Accepts the scene categories
/// ("vehicle", "pedestrian", "cyclist", "other") and nuScenes-style names
/// ("car", "vehicle.truck", "human.pedestrian.adult", ...). Throws
/// UnknownCategory.
scene::ObjectCategory map_category(std::string_view label);

/// uniad counts vehicles; stp3 counts vehicles and pedestrians.
bool counts_for(scene::ObjectCategory category, Convention convention);

struct EvalConfig
{
  scene::GridSpec grid{{-50.0, -50.0}, 0.5, 200, 200};
  double ego_length = 4.08;
  double ego_width = 1.73;
};

/// Binary volume: a cell is occupied at step t when its center lies inside
/// a counted box of that step.
scene::OccupancyVolume gt_occupancy(
  const scene::GtBoxesPerStep & boxes, Convention convention, const scene::GridSpec & grid);

/// Ego box (no margin) at each waypoint against the occupied cells.
StepFlags collision_per_step(
  const Trajectory & pred, const scene::OccupancyVolume & gt_occupancy, double ego_length, double ego_width);

struct Sample
{
  std::string scene_id;
  Trajectory pred;
  Trajectory gt;
  scene::GtBoxesPerStep gt_boxes;
};

struct SampleMetrics
{
  StepValues l2{};
  StepFlags collisions{};
};

SampleMetrics evaluate_sample(const Sample & sample, Convention convention, const EvalConfig & config);

struct MetricReport
{
  Convention convention = Convention::uniad;
  std::size_t samples = 0;
  StepValues mean_l2{};  // l2 averaged over samples per timestep
  std::array<std::size_t, kHorizonSteps> collision_counts{};
  StepValues collision_rate{};  // percent of samples per timestep
  std::array<double, 3> l2_at{};  // 1 s, 2 s, 3 s
  double l2_avg = 0.0;
  std::array<double, 3> collision_at{};  // percent
  double collision_avg = 0.0;
};

/// Reduces per-sample values by the convention's formulas. Throws EmptySet.
MetricReport aggregate(const std::vector<SampleMetrics> & metrics, Convention convention);

/// evaluate_sample over every sample, then aggregate. Throws EmptySet.
MetricReport report(const std::vector<Sample> & samples, Convention convention, const EvalConfig & config = {});

nlohmann::json to_json(const MetricReport & report);

/// Text table: one row per report with L2 (m) and collision (%) at 1 s,
/// 2 s, 3 s and their average.
std::string render_table(const std::vector<MetricReport> & reports);

}  // namespace agent_driver::evaluation

#endif  // AGENT_DRIVER__EVALUATION_HPP_
