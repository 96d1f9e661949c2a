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

#ifndef AGENT_DRIVER__REASONING_ENGINE_HPP_
#define AGENT_DRIVER__REASONING_ENGINE_HPP_

#include "agent_driver/cognitive_memory.hpp"
#include "agent_driver/config.hpp"
#include "agent_driver/llm_interface.hpp"
#include "agent_driver/scene_model.hpp"
#include "agent_driver/self_reflection.hpp"
#include "agent_driver/tool_library.hpp"
#include "agent_driver/trajectory_codec.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::reasoning
{

/// Ego state block that opens every observation.
std::string ego_header(const scene::EgoState & ego);

struct ToolInvocation
{
  tools::ToolCall call;
  std::string observation;
  std::optional<std::string> error;
};

struct ToolUseResult
{
  std::string observation;  // ego header plus one block per tool call
  std::vector<llm::ChatTurn> conversation;
  std::vector<std::string> activated_modules;
  std::vector<ToolInvocation> invocations;
  int completions = 0;
  bool truncated = false;
};

/// Asks about each module in turn (detection, prediction, occupancy, map) in
/// one conversation; an answer starting with "yes" exposes that module's
/// functions until the model replies with text. `budget` caps the number of
/// completions. Tool failures become observations.
ToolUseResult tool_use_loop(
  const scene::SceneSnapshot & snap, llm::Backend & backend, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config, int budget);

/// Ego header plus every detection and every predicted trajectory, without
/// consulting an LLM.
std::string full_observation(
  const scene::SceneSnapshot & snap, const tools::ToolRegistry & registry, const tools::ToolConfig & tool_config);

struct NotableObject
{
  std::string referent;
  std::string description;

  friend bool operator==(const NotableObject &, const NotableObject &) = default;
};

struct ReasoningResult
{
  std::vector<NotableObject> notable_objects;
  std::vector<std::string> potential_effects;
  std::string raw_text;
  bool parsed = false;  // both labeled sections were found
};

/// Reads the "Notable objects:" and "Potential effects:" sections. Items
/// may be bulleted; "referent: description" splits at the first colon;
/// "none" items are skipped.
ReasoningResult parse_reasoning(std::string_view reply);

struct Exemplar
{
  std::string scene_id;
  std::string observation;
  std::string reasoning;
  std::string plan;
  std::string trajectory;
};

/// {"exemplars": [{"scene_id", "observation", "reasoning", "plan",
/// "trajectory"}]}. Throws ParseError.
std::vector<Exemplar> parse_exemplars(const nlohmann::json & doc);
std::vector<Exemplar> load_exemplars(const std::filesystem::path & path);
std::vector<Exemplar> builtin_exemplars();

std::uint64_t fnv1a(std::string_view text);

/// Partial Fisher-Yates over the pool seeded with seed + fnv1a(scene_id).
std::vector<Exemplar> select_exemplars(
  const std::vector<Exemplar> & pool, std::size_t count, std::uint64_t seed, std::string_view scene_id);

ReasoningResult chain_of_thought(
  llm::Backend & backend, std::string_view observation, std::string_view memory,
  const std::vector<Exemplar> & exemplars);

struct PlanResult
{
  DrivingPlan plan;
  bool fallback = false;
  std::string raw_text;
};

PlanResult task_planning(
  llm::Backend & backend, std::string_view observation, std::string_view memory, const ReasoningResult & reasoning,
  const std::vector<Exemplar> & exemplars);

enum class FallbackSource { none, memory, constant_velocity };

std::string_view to_string(FallbackSource source);

struct MotionResult
{
  Trajectory trajectory;  // decoded, before self-reflection
  bool invalid_output = false;
  int attempts = 0;
  FallbackSource fallback = FallbackSource::none;
  std::vector<std::string> decode_errors;
};

/// v * 0.5 t for t = 1..6.
Trajectory constant_velocity_trajectory(const scene::EgoState & ego);

/// Decodes the reply, retrying once with a corrective message; then falls
/// back to `memory_trajectory` or constant-velocity extrapolation.
MotionResult motion_planning(
  llm::Backend & backend, std::string_view observation, std::string_view memory, const ReasoningResult & reasoning,
  const DrivingPlan & plan, const std::optional<Trajectory> & memory_trajectory, const scene::EgoState & ego);

/// Shared, read-only inputs of a run.
struct PipelineResources
{
  tools::ToolRegistry registry;
  std::optional<memory::CommonsenseMemory> commonsense;
  std::optional<memory::ExperienceStore> experience;
  std::vector<Exemplar> exemplars;
};

/// Loads commonsense, experience store and exemplars named by the config,
/// using the built-in data where paths are empty.
PipelineResources load_resources(const config::PipelineConfig & config);

struct PipelineOutput
{
  std::string scene_id;
  Trajectory trajectory;  // final
  PlanResult plan;
  ReasoningResult reasoning;
  std::optional<memory::RetrievalResult> retrieval;
  MotionResult motion;
  std::optional<reflection::ReflectionReport> reflection;
  ToolUseResult tool_use;
  std::vector<std::string> stages;  // "name" or "name:skipped"
  std::vector<std::string> flags;
  std::string transcript;  // exchange file name, when recorded
  nlohmann::json config;
};

inline constexpr std::string_view kOutputSchema = "agentdriver-output/1";

nlohmann::json to_json(const PipelineOutput & output);

/// Reads the final trajectory of a serialized output. Throws ParseError.
Trajectory output_trajectory(const nlohmann::json & doc);

/// tool use, retrieval, chain of thought, task planning, motion planning and
/// self-reflection. Reply content never aborts the run; backend failures
/// (BackendUnavailable, ScriptExhausted, ReplayDivergence, ResponseMalformed)
/// propagate.
PipelineOutput run_pipeline(
  const scene::SceneSnapshot & snap, llm::Backend & backend, const PipelineResources & resources,
  const config::PipelineConfig & config);

/// Fine-tuning pair {"scene_id", "messages", "completion"}; the completion
/// holds generated notable-object lines and the encoded ground truth.
/// Throws MissingGroundTruth.
nlohmann::json sft_pair(
  const scene::SceneSnapshot & snap, const tools::ToolRegistry & registry, const tools::ToolConfig & tool_config);

/// Every scene must carry ground truth; otherwise nothing is exported and
/// MissingGroundTruth is thrown.
std::vector<nlohmann::json> export_sft_pairs(
  const std::vector<scene::SceneSnapshot> & scenes, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config);

/// Experience record keyed on the ego state, described by full_observation
/// and holding the ground-truth trajectory. Throws MissingGroundTruth.
memory::ExperienceRecord make_experience_record(
  const scene::SceneSnapshot & snap, const memory::KeyLayout & layout, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config);

}  // namespace agent_driver::reasoning

#endif  // AGENT_DRIVER__REASONING_ENGINE_HPP_
