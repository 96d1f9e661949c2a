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

#include "agent_driver/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace agent_driver::plot
{

namespace
{

struct Frame
{
  double x_min;
  double y_max;
  double scale;

  double sx(double x) const { return (x - x_min) * scale; }
  double sy(double y) const { return (y_max - y) * scale; }
};

std::array<Vec2, 4> corners(const Vec2 & c, double heading, double length, double width)
{
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 v{-u.y, u.x};
  const double hl = length / 2.0;
  const double hw = width / 2.0;
  return {c + u * hl + v * hw, c - u * hl + v * hw, c - u * hl - v * hw, c + u * hl - v * hw};
}

std::string points_attr(const Frame & f, const std::vector<Vec2> & pts)
{
  std::string out;
  for (const auto & p : pts) {
    if (!out.empty()) {
      out += ' ';
    }
    out += fmt::format("{:.1f},{:.1f}", f.sx(p.x), f.sy(p.y));
  }
  return out;
}

std::string escape(std::string_view text)
{
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::vector<Vec2> path_with_origin(const Trajectory & traj)
{
  std::vector<Vec2> pts{{0.0, 0.0}};
  pts.insert(pts.end(), traj.points.begin(), traj.points.end());
  return pts;
}

}  // namespace

std::string render_svg(
  const scene::SceneSnapshot & snap, const std::optional<Trajectory> & planned,
  const std::set<std::string> & notable_ids, const PlotOptions & options)
{
  std::vector<Vec2> extent{{0.0, 0.0}};
  for (const auto & d : snap.detections) {
    const auto c = corners(d.center, d.heading, d.length, d.width);
    extent.insert(extent.end(), c.begin(), c.end());
  }
  if (planned) {
    extent.insert(extent.end(), planned->points.begin(), planned->points.end());
  }
  if (snap.gt_trajectory) {
    extent.insert(extent.end(), snap.gt_trajectory->points.begin(), snap.gt_trajectory->points.end());
  }
  double x_min = extent.front().x;
  double x_max = x_min;
  double y_min = extent.front().y;
  double y_max = y_min;
  for (const auto & p : extent) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  x_min -= options.padding;
  x_max += options.padding;
  y_min -= options.padding;
  y_max += options.padding;
  const Frame f{x_min, y_max, options.pixels_per_meter};
  const double width = (x_max - x_min) * f.scale;
  const double height = (y_max - y_min) * f.scale;

  std::string svg = fmt::format(
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.1f} {:.1f}\">\n",
    std::ceil(width), std::ceil(height), width, height);
  svg += fmt::format("<title>{}</title>\n", escape(snap.scene_id));
  svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (options.occupancy_step) {
    const auto & grid = snap.occupancy.grid;
    const int t = std::clamp(*options.occupancy_step, 1, static_cast<int>(kHorizonSteps));
    svg += "<g id=\"occupancy\">\n";
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        const double p = snap.occupancy.value(t, ix, iy);
        if (p <= 0.0) {
          continue;
        }
        const auto lo = grid.cell_min(ix, iy);
        svg += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"gray\" fill-opacity=\"{:.2f}\"/>\n",
          f.sx(lo.x), f.sy(lo.y + grid.resolution), grid.resolution * f.scale, grid.resolution * f.scale,
          std::min(p, 1.0));
      }
    }
    svg += "</g>\n";
  }

  svg += "<g id=\"detections\">\n";
  for (const auto & d : snap.detections) {
    const auto c = corners(d.center, d.heading, d.length, d.width);
    const bool notable = notable_ids.count(d.object_id) > 0;
    svg += fmt::format(
      "<polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"><title>{}</title></polygon>\n",
      points_attr(f, {c.begin(), c.end()}), notable ? "red" : "blue", notable ? 2 : 1, escape(d.object_id));
  }
  svg += "</g>\n";

  const auto ego = corners({0.0, 0.0}, kForwardHeading, 4.08, 1.73);
  svg += fmt::format(
    "<polygon id=\"ego\" points=\"{}\" fill=\"black\" fill-opacity=\"0.3\" stroke=\"black\"/>\n",
    points_attr(f, {ego.begin(), ego.end()}));

  if (snap.gt_trajectory) {
    svg += fmt::format(
      "<polyline id=\"ground_truth\" points=\"{}\" fill=\"none\" stroke=\"green\" stroke-width=\"2\"/>\n",
      points_attr(f, path_with_origin(*snap.gt_trajectory)));
  }
  if (planned) {
    svg += fmt::format(
      "<polyline id=\"planned\" points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n",
      points_attr(f, path_with_origin(*planned)));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace agent_driver::plot
