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

#include "agent_driver/trajectory_codec.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace agent_driver::reasoning
{

namespace
{

constexpr std::array<std::string_view, 6> kBehaviorNames{
  "move_forward", "change_lane_to_left", "change_lane_to_right", "turn_left", "turn_right", "stop"};
constexpr std::array<std::string_view, 6> kSpeedNames{
  "constant_speed", "deceleration", "quick_deceleration", "deceleration_to_zero", "acceleration",
  "quick_acceleration"};
constexpr std::string_view kWith = "_with_";

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_coordinate(double v)
{
  auto text = fmt::format("{:.2f}", v);
  if (text == "-0.00") {
    text = "0.00";
  }
  return text;
}

std::optional<double> parse_number(std::string_view token)
{
  token = trim(token);
  if (!token.empty() && token.front() == '+') {
    token.remove_prefix(1);
    if (!token.empty() && (token.front() == '+' || token.front() == '-')) {
      return std::nullopt;
    }
  }
  if (token.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto * end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string_view after_last_label(std::string_view reply, std::string_view label)
{
  const auto pos = reply.rfind(label);
  if (pos == std::string_view::npos) {
    return reply;
  }
  return reply.substr(pos + label.size());
}

}  // namespace

std::string encode_trajectory(const Trajectory & traj)
{
  std::string out;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += fmt::format("({},{})", format_coordinate(traj.points[i].x), format_coordinate(traj.points[i].y));
  }
  return out;
}

Trajectory decode_trajectory(std::string_view text)
{
  std::vector<Vec2> pairs;
  std::vector<std::string> bad;
  std::size_t pos = 0;
  while ((pos = text.find('(', pos)) != std::string_view::npos) {
    const auto close = text.find(')', pos + 1);
    const auto reopen = text.find('(', pos + 1);
    if (close == std::string_view::npos || (reopen != std::string_view::npos && reopen < close)) {
      const auto stop = reopen == std::string_view::npos ? text.size() : reopen;
      bad.emplace_back(text.substr(pos, stop - pos));
      pos = stop;
      continue;
    }
    const auto inner = text.substr(pos + 1, close - pos - 1);
    const auto comma = inner.find(',');
    std::optional<double> x;
    std::optional<double> y;
    if (comma != std::string_view::npos && inner.find(',', comma + 1) == std::string_view::npos) {
      x = parse_number(inner.substr(0, comma));
      y = parse_number(inner.substr(comma + 1));
    }
    if (x && y) {
      pairs.push_back({*x, *y});
    } else {
      bad.emplace_back(text.substr(pos, close - pos + 1));
    }
    pos = close + 1;
  }
  if (!bad.empty() || pairs.size() != kHorizonSteps) {
    std::string message = fmt::format("expected {} waypoint pairs, found {}", kHorizonSteps, pairs.size());
    if (!bad.empty()) {
      message += fmt::format(" and {} malformed group(s), first: '{}'", bad.size(), bad.front());
    }
    throw DecodeError(pairs.size(), std::move(bad), message);
  }
  Trajectory traj;
  std::copy(pairs.begin(), pairs.end(), traj.points.begin());
  return traj;
}

std::string_view extract_trajectory_text(std::string_view reply)
{
  return after_last_label(reply, "Trajectory:");
}

std::string_view to_string(Behavior behavior)
{
  return kBehaviorNames.at(static_cast<std::size_t>(behavior));
}

std::string_view to_string(Speed speed)
{
  return kSpeedNames.at(static_cast<std::size_t>(speed));
}

std::string DrivingPlan::str() const
{
  if (!speed) {
    return std::string(to_string(behavior));
  }
  return fmt::format("{}{}{}", to_string(behavior), kWith, to_string(*speed));
}

std::optional<DrivingPlan> parse_driving_plan(std::string_view text)
{
  if (text == to_string(Behavior::stop)) {
    return DrivingPlan{Behavior::stop, std::nullopt};
  }
  for (std::size_t b = 0; b + 1 < kBehaviorNames.size(); ++b) {
    const auto name = kBehaviorNames[b];
    if (text.size() <= name.size() + kWith.size() || text.substr(0, name.size()) != name ||
        text.substr(name.size(), kWith.size()) != kWith) {
      continue;
    }
    const auto rest = text.substr(name.size() + kWith.size());
    for (std::size_t s = 0; s < kSpeedNames.size(); ++s) {
      if (rest == kSpeedNames[s]) {
        return DrivingPlan{static_cast<Behavior>(b), static_cast<Speed>(s)};
      }
    }
  }
  return std::nullopt;
}

std::vector<DrivingPlan> all_driving_plans()
{
  std::vector<DrivingPlan> plans;
  for (std::size_t b = 0; b + 1 < kBehaviorNames.size(); ++b) {
    for (std::size_t s = 0; s < kSpeedNames.size(); ++s) {
      plans.push_back({static_cast<Behavior>(b), static_cast<Speed>(s)});
    }
  }
  plans.push_back({Behavior::stop, std::nullopt});
  return plans;
}

std::string extract_plan_text(std::string_view reply)
{
  auto rest = after_last_label(reply, "Driving plan:");
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    auto line = trim(rest.substr(0, nl));
    if (!line.empty()) {
      if (line.back() == '.') {
        line.remove_suffix(1);
      }
      return std::string(trim(line));
    }
    if (nl == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(nl + 1);
  }
  return {};
}

}  // namespace agent_driver::reasoning
