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

#include "agent_driver/prompts.hpp"

#include <stdexcept>

namespace agent_driver::prompts
{

namespace detail
{
// Defined in the build-generated embedded_data.cpp.
const std::map<std::string_view, std::string_view> & embedded_table();
}  // namespace detail

std::string_view embedded(std::string_view name)
{
  const auto & table = detail::embedded_table();
  const auto it = table.find(name);
  if (it == table.end()) {
    throw std::out_of_range("no embedded data named '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::string> embedded_names()
{
  std::vector<std::string> names;
  for (const auto & [name, text] : detail::embedded_table()) {
    names.emplace_back(name);
  }
  return names;
}

std::string render(std::string_view tpl, const Variables & vars)
{
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = tpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    const auto close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw std::invalid_argument("unterminated placeholder in template");
    }
    out.append(tpl.substr(pos, open - pos));
    const auto name = tpl.substr(open + 2, close - open - 2);
    const auto it = vars.find(name);
    if (it == vars.end()) {
      throw std::invalid_argument("template variable '" + std::string(name) + "' is not bound");
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

std::string render_named(std::string_view name, const Variables & vars)
{
  return render(embedded(name), vars);
}

}  // namespace agent_driver::prompts
