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

#ifndef AGENT_DRIVER__TRAJECTORY_CODEC_HPP_
#define AGENT_DRIVER__TRAJECTORY_CODEC_HPP_

#include "agent_driver/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::reasoning
{

/// "(x.xx,y.yy), (x.xx,y.yy), ..." with two decimals; "-0.00" is written as
/// "0.00".
std::string encode_trajectory(const Trajectory & traj);

/// Reads every parenthesized group of `text`. Succeeds only with exactly six
/// well-formed finite pairs and no malformed group; otherwise throws
/// DecodeError with the number of good pairs and the offending groups.
Trajectory decode_trajectory(std::string_view text);

/// Text after the last "Trajectory:" label, or the whole text.
std::string_view extract_trajectory_text(std::string_view reply);

enum class Behavior { move_forward, change_lane_to_left, change_lane_to_right, turn_left, turn_right, stop };
enum class Speed { constant_speed, deceleration, quick_deceleration, deceleration_to_zero, acceleration, quick_acceleration };

std::string_view to_string(Behavior behavior);
std::string_view to_string(Speed speed);

/// Behavior plus optional speed; speed is absent exactly for stop.
struct DrivingPlan
{
  Behavior behavior = Behavior::move_forward;
  std::optional<Speed> speed = Speed::constant_speed;

  friend bool operator==(const DrivingPlan &, const DrivingPlan &) = default;

  /// "<behavior>_with_<speed>" or "stop".
  std::string str() const;
};

/// Strict parse against the 31-value grammar.
std::optional<DrivingPlan> parse_driving_plan(std::string_view text);

/// Every valid plan, in enumeration order.
std::vector<DrivingPlan> all_driving_plans();

/// First non-empty line after the last "Driving plan:" label (or of the
/// whole reply), trimmed, with a trailing period removed.
std::string extract_plan_text(std::string_view reply);

}  // namespace agent_driver::reasoning

#endif  // AGENT_DRIVER__TRAJECTORY_CODEC_HPP_
