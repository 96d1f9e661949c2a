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

#ifndef AGENT_DRIVER__CONFIG_HPP_
#define AGENT_DRIVER__CONFIG_HPP_

#include "agent_driver/cognitive_memory.hpp"
#include "agent_driver/evaluation.hpp"
#include "agent_driver/http_backend.hpp"
#include "agent_driver/self_reflection.hpp"
#include "agent_driver/tool_library.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace agent_driver::config
{

struct MemorySettings
{
  memory::MemoryConfig retrieval;
  memory::KeyLayout layout;
  std::string commonsense_path;  // empty: built-in rules
  std::string experience_store;  // JSON-lines store; required when experience memory is on
};

struct ReasoningSettings
{
  std::size_t exemplar_count = 4;
  std::uint64_t seed = 0;
  int tool_budget = 16;          // LLM completions allowed in the tool-use loop
  std::string exemplars_path;    // empty: built-in pool
  bool reflection_enabled = true;
};

struct PipelineConfig
{
  tools::ToolConfig tools;
  MemorySettings memory;
  ReasoningSettings reasoning;
  reflection::ReflectionConfig reflection;
  evaluation::EvalConfig evaluation;
  llm::HttpConfig llm;
};

/// Full document with every key. `redact` blanks the API key.
nlohmann::json to_json(const PipelineConfig & config, bool redact = true);

/// Reads a complete or partial document over the defaults. Unknown keys and
/// wrong types throw ValidationError naming the dotted key.
PipelineConfig from_json(const nlohmann::json & doc);

/// Throws ParseError.
nlohmann::json load_file(const std::filesystem::path & path);

/// Environment variables consulted by resolve and the config key each sets.
const std::map<std::string, std::string> & environment_keys();

/// Values of the known environment variables that are set.
std::map<std::string, std::string> read_environment();

/// "dotted.key=value"; value parsed as JSON when possible, else a string.
/// Throws ValidationError.
std::pair<std::string, nlohmann::json> parse_override(std::string_view text);

struct Sources
{
  std::optional<nlohmann::json> file;
  std::map<std::string, std::string> env;  // variable name -> raw value
  std::vector<std::pair<std::string, nlohmann::json>> flags;  // dotted key -> value
};

/// Defaults, then file, then environment, then flags; later layers win.
/// Validates the result.
PipelineConfig resolve(const Sources & sources);

/// Range checks across sections. Throws ValidationError.
void validate(const PipelineConfig & config);

}  // namespace agent_driver::config

#endif  // AGENT_DRIVER__CONFIG_HPP_
