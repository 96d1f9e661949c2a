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

#include "agent_driver/evaluation.hpp"

#include "agent_driver/errors.hpp"
#include "agent_driver/tool_library.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace agent_driver::evaluation
{

using scene::ObjectCategory;

namespace
{

const std::map<std::string_view, ObjectCategory> & label_table()
{
  static const std::map<std::string_view, ObjectCategory> table{
    {"vehicle", ObjectCategory::vehicle},
    {"car", ObjectCategory::vehicle},
    {"truck", ObjectCategory::vehicle},
    {"bus", ObjectCategory::vehicle},
    {"trailer", ObjectCategory::vehicle},
    {"construction_vehicle", ObjectCategory::vehicle},
    {"emergency_vehicle", ObjectCategory::vehicle},
    {"pedestrian", ObjectCategory::pedestrian},
    {"cyclist", ObjectCategory::cyclist},
    {"bicycle", ObjectCategory::cyclist},
    {"motorcycle", ObjectCategory::cyclist},
    {"other", ObjectCategory::other},
    {"traffic_cone", ObjectCategory::other},
    {"barrier", ObjectCategory::other},
    {"animal", ObjectCategory::other},
  };
  return table;
}

bool starts_with(std::string_view text, std::string_view prefix)
{
  return text.substr(0, prefix.size()) == prefix;
}

/// Value at horizon k seconds (k = 1..3) for the convention.
double per_second(const StepValues & v, int k, Convention convention)
{
  const auto last = static_cast<std::size_t>(2 * k);
  if (convention == Convention::uniad) {
    return v[last - 1];
  }
  double sum = 0.0;
  for (std::size_t t = 1; t <= last; ++t) {
    sum += v[t - 1];
  }
  return sum / static_cast<double>(last);
}

}  // namespace

std::string_view to_string(Convention convention)
{
  return convention == Convention::uniad ? "uniad" : "stp3";
}

std::optional<Convention> parse_convention(std::string_view text)
{
  if (text == "uniad") {
    return Convention::uniad;
  }
  if (text == "stp3") {
    return Convention::stp3;
  }
  return std::nullopt;
}

StepValues l2_profile(const Trajectory & pred, const Trajectory & gt)
{
  StepValues out{};
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    out[t] = (pred.points[t] - gt.points[t]).norm();
  }
  return out;
}

ObjectCategory map_category(std::string_view label)
{
  const auto & table = label_table();
  if (const auto it = table.find(label); it != table.end()) {
    return it->second;
  }
  if (starts_with(label, "vehicle.bicycle") || starts_with(label, "vehicle.motorcycle")) {
    return ObjectCategory::cyclist;
  }
  if (starts_with(label, "vehicle.")) {
    return ObjectCategory::vehicle;
  }
  if (starts_with(label, "human.pedestrian")) {
    return ObjectCategory::pedestrian;
  }
  if (starts_with(label, "movable_object.") || starts_with(label, "static_object.") || label == "animal") {
    return ObjectCategory::other;
  }
  throw UnknownCategory(fmt::format("ground-truth category '{}' has no mapping", label));
}

bool counts_for(ObjectCategory category, Convention convention)
{
  if (category == ObjectCategory::vehicle) {
    return true;
  }
  return convention == Convention::stp3 && category == ObjectCategory::pedestrian;
}

scene::OccupancyVolume gt_occupancy(
  const scene::GtBoxesPerStep & boxes, Convention convention, const scene::GridSpec & grid)
{
  auto volume = scene::OccupancyVolume::zeros(grid);
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    for (const auto & box : boxes[t]) {
      if (!counts_for(map_category(box.category), convention)) {
        continue;
      }
      const OrientedBox shape{box.center, box.heading, box.length, box.width};
      Vec2 lo;
      Vec2 hi;
      shape.bounds(lo, hi);
      const auto to_index = [&](double v, double origin, std::size_t n) {
        const double i = std::floor((v - origin) / grid.resolution);
        return static_cast<long long>(std::clamp(i, -1.0, static_cast<double>(n)));
      };
      const auto ix0 = std::max(0LL, to_index(lo.x, grid.origin.x, grid.nx));
      const auto ix1 = std::min(static_cast<long long>(grid.nx) - 1, to_index(hi.x, grid.origin.x, grid.nx));
      const auto iy0 = std::max(0LL, to_index(lo.y, grid.origin.y, grid.ny));
      const auto iy1 = std::min(static_cast<long long>(grid.ny) - 1, to_index(hi.y, grid.origin.y, grid.ny));
      for (auto iy = iy0; iy <= iy1; ++iy) {
        for (auto ix = ix0; ix <= ix1; ++ix) {
          const auto cx = static_cast<std::size_t>(ix);
          const auto cy = static_cast<std::size_t>(iy);
          if (shape.contains(grid.cell_center(cx, cy))) {
            volume.set(static_cast<int>(t + 1), cx, cy, 1.0);
          }
        }
      }
    }
  }
  return volume;
}

StepFlags collision_per_step(
  const Trajectory & pred, const scene::OccupancyVolume & gt_occupancy, double ego_length, double ego_width)
{
  const auto check = tools::collision_probability(gt_occupancy, pred, ego_length, ego_width, 0.0, 0.5);
  return check.step_collides;
}

SampleMetrics evaluate_sample(const Sample & sample, Convention convention, const EvalConfig & config)
{
  SampleMetrics m;
  m.l2 = l2_profile(sample.pred, sample.gt);
  const auto occupancy = gt_occupancy(sample.gt_boxes, convention, config.grid);
  m.collisions = collision_per_step(sample.pred, occupancy, config.ego_length, config.ego_width);
  return m;
}

MetricReport aggregate(const std::vector<SampleMetrics> & metrics, Convention convention)
{
  if (metrics.empty()) {
    throw EmptySet("no samples to evaluate");
  }
  MetricReport r;
  r.convention = convention;
  r.samples = metrics.size();
  const auto n = static_cast<double>(metrics.size());
  for (const auto & m : metrics) {
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      r.mean_l2[t] += m.l2[t];
      r.collision_counts[t] += m.collisions[t] ? 1 : 0;
    }
  }
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    r.mean_l2[t] /= n;
    r.collision_rate[t] = static_cast<double>(r.collision_counts[t]) / n * 100.0;
  }
  for (int k = 1; k <= 3; ++k) {
    r.l2_at[static_cast<std::size_t>(k - 1)] = per_second(r.mean_l2, k, convention);
    r.collision_at[static_cast<std::size_t>(k - 1)] = per_second(r.collision_rate, k, convention);
  }
  r.l2_avg = (r.l2_at[0] + r.l2_at[1] + r.l2_at[2]) / 3.0;
  r.collision_avg = (r.collision_at[0] + r.collision_at[1] + r.collision_at[2]) / 3.0;
  return r;
}

MetricReport report(const std::vector<Sample> & samples, Convention convention, const EvalConfig & config)
{
  std::vector<SampleMetrics> metrics;
  metrics.reserve(samples.size());
  for (const auto & sample : samples) {
    metrics.push_back(evaluate_sample(sample, convention, config));
  }
  return aggregate(metrics, convention);
}

nlohmann::json to_json(const MetricReport & report)
{
  return nlohmann::json{
    {"convention", to_string(report.convention)},
    {"samples", report.samples},
    {"mean_l2", report.mean_l2},
    {"collision_counts", report.collision_counts},
    {"collision_rate_percent", report.collision_rate},
    {"collision_rate_denominator", "evaluated samples per timestep"},
    {"l2_m", {{"1s", report.l2_at[0]}, {"2s", report.l2_at[1]}, {"3s", report.l2_at[2]}, {"avg", report.l2_avg}}},
    {"collision_percent",
     {{"1s", report.collision_at[0]},
      {"2s", report.collision_at[1]},
      {"3s", report.collision_at[2]},
      {"avg", report.collision_avg}}}};
}

std::string render_table(const std::vector<MetricReport> & reports)
{
  std::string out;
  out += fmt::format("{:<12}| {:^31} | {:^31}\n", "Metrics", "L2 (m)", "Collision (%)");
  out += fmt::format(
    "{:<12}| {:>7}{:>8}{:>8}{:>8} | {:>7}{:>8}{:>8}{:>8}\n", "", "1s", "2s", "3s", "Avg.", "1s", "2s", "3s", "Avg.");
  out += std::string(12, '-') + "+" + std::string(33, '-') + "+" + std::string(33, '-') + "\n";
  for (const auto & r : reports) {
    out += fmt::format(
      "{:<12}| {:>7.2f}{:>8.2f}{:>8.2f}{:>8.2f} | {:>7.2f}{:>8.2f}{:>8.2f}{:>8.2f}\n", to_string(r.convention),
      r.l2_at[0], r.l2_at[1], r.l2_at[2], r.l2_avg, r.collision_at[0], r.collision_at[1], r.collision_at[2],
      r.collision_avg);
  }
  if (!reports.empty()) {
    out += fmt::format("samples: {}; collision rate denominator: evaluated samples per timestep\n", reports.front().samples);
  }
  return out;
}

}  // namespace agent_driver::evaluation
