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

#ifndef AGENT_DRIVER__PROMPTS_HPP_
#define AGENT_DRIVER__PROMPTS_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::prompts
{

/// Files under data/ compiled into the library, keyed by their path relative
/// to data/ without extension, e.g. "prompts/motion_user", "commonsense".
/// Throws std::out_of_range for an unknown name.
std::string_view embedded(std::string_view name);

std::vector<std::string> embedded_names();

using Variables = std::map<std::string, std::string, std::less<>>;

/// Replaces every "{{name}}" in `tpl`. Unknown names and unterminated
/// placeholders throw std::invalid_argument.
std::string render(std::string_view tpl, const Variables & vars);

/// render(embedded(name), vars).
std::string render_named(std::string_view name, const Variables & vars);

}  // namespace agent_driver::prompts

#endif  // AGENT_DRIVER__PROMPTS_HPP_
