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

#include "agent_driver/config.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace agent_driver::config
{

using nlohmann::json;

namespace
{

json::json_pointer pointer_of(std::string_view dotted)
{
  std::string path;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const auto dot = dotted.find('.', pos);
    const auto part = dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (part.empty()) {
      throw ValidationError(std::string(dotted), "malformed config key");
    }
    path += "/";
    path += part;
    if (dot == std::string_view::npos) {
      break;
    }
    pos = dot + 1;
  }
  return json::json_pointer(path);
}

bool same_kind(const json & a, const json & b)
{
  if (a.is_number() && b.is_number()) {
    return true;
  }
  return a.type() == b.type();
}

void merge_into(json & base, const json & patch, const std::string & prefix)
{
  if (!patch.is_object()) {
    throw ValidationError(prefix.empty() ? "config" : prefix, "expected an object");
  }
  for (const auto & [key, value] : patch.items()) {
    const auto path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) {
      throw ValidationError(path, "unknown config key");
    }
    auto & slot = base[key];
    if (slot.is_object()) {
      merge_into(slot, value, path);
    } else if (!same_kind(slot, value)) {
      throw ValidationError(path, fmt::format("expected {}, got {}", slot.type_name(), value.type_name()));
    } else {
      slot = value;
    }
  }
}

void set_dotted(json & doc, std::string_view dotted, const json & value)
{
  const auto ptr = pointer_of(dotted);
  if (!doc.contains(ptr)) {
    throw ValidationError(std::string(dotted), "unknown config key");
  }
  auto & slot = doc[ptr];
  if (slot.is_object()) {
    merge_into(slot, value, std::string(dotted));
    return;
  }
  if (!same_kind(slot, value)) {
    throw ValidationError(
      std::string(dotted), fmt::format("expected {}, got {}", slot.type_name(), value.type_name()));
  }
  slot = value;
}

template <typename T>
T read(const json & doc, std::string_view dotted)
{
  try {
    return doc.at(pointer_of(dotted)).get<T>();
  } catch (const json::exception & e) {
    throw ValidationError(std::string(dotted), e.what());
  }
}

std::size_t read_count(const json & doc, std::string_view dotted)
{
  const auto & value = doc.at(pointer_of(dotted));
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ValidationError(std::string(dotted), "expected a nonnegative integer");
  }
  return value.get<std::size_t>();
}

json parse_scalar(const std::string & raw)
{
  try {
    return json::parse(raw);
  } catch (const json::parse_error &) {
    return json(raw);
  }
}

}  // namespace

json to_json(const PipelineConfig & config, bool redact)
{
  const auto & m = config.memory;
  const auto & r = config.reasoning;
  const auto & e = config.evaluation;
  const auto & l = config.llm;
  return json{
    {"tools",
     {{"corridor_half_width", config.tools.corridor_half_width},
      {"collision_threshold", config.tools.collision_threshold},
      {"collision_margin", config.tools.collision_margin},
      {"ego_length", config.tools.ego_length},
      {"ego_width", config.tools.ego_width}}},
    {"memory",
     {{"commonsense_enabled", m.retrieval.commonsense_enabled},
      {"experience_enabled", m.retrieval.experience_enabled},
      {"top_k", m.retrieval.top_k},
      {"weights", {{"ego", m.retrieval.weights.ego}, {"goal", m.retrieval.weights.goal}, {"history", m.retrieval.weights.history}}},
      {"normalize_blocks", m.retrieval.weights.normalize_blocks},
      {"can_bus_dims", m.layout.can_bus_dims},
      {"history_length", m.layout.history_length},
      {"commonsense_path", m.commonsense_path},
      {"experience_store", m.experience_store}}},
    {"reasoning",
     {{"exemplar_count", r.exemplar_count},
      {"seed", r.seed},
      {"tool_budget", r.tool_budget},
      {"exemplars_path", r.exemplars_path},
      {"reflection_enabled", r.reflection_enabled}}},
    {"reflection", reflection::to_json(config.reflection)},
    {"evaluation",
     {{"grid",
       {{"origin", {e.grid.origin.x, e.grid.origin.y}},
        {"resolution", e.grid.resolution},
        {"nx", e.grid.nx},
        {"ny", e.grid.ny}}},
      {"ego_length", e.ego_length},
      {"ego_width", e.ego_width}}},
    {"llm",
     {{"endpoint", l.endpoint},
      {"model", l.model},
      {"temperature", l.temperature},
      {"max_in_flight", l.max_in_flight},
      {"max_attempts", l.retry.max_attempts},
      {"initial_backoff_ms", l.retry.initial_backoff.count()},
      {"backoff_multiplier", l.retry.backoff_multiplier},
      {"auth_header", l.auth_header},
      {"api_key", redact && !l.api_key.empty() ? std::string("<redacted>") : l.api_key},
      {"timeout_s", l.timeout.count()}}}};
}

PipelineConfig from_json(const json & doc)
{
  json merged = to_json(PipelineConfig{}, false);
  merge_into(merged, doc, "");

  PipelineConfig c;
  c.tools.corridor_half_width = read<double>(merged, "tools.corridor_half_width");
  c.tools.collision_threshold = read<double>(merged, "tools.collision_threshold");
  c.tools.collision_margin = read<double>(merged, "tools.collision_margin");
  c.tools.ego_length = read<double>(merged, "tools.ego_length");
  c.tools.ego_width = read<double>(merged, "tools.ego_width");

  auto & m = c.memory;
  m.retrieval.commonsense_enabled = read<bool>(merged, "memory.commonsense_enabled");
  m.retrieval.experience_enabled = read<bool>(merged, "memory.experience_enabled");
  m.retrieval.top_k = read_count(merged, "memory.top_k");
  m.retrieval.weights.ego = read<double>(merged, "memory.weights.ego");
  m.retrieval.weights.goal = read<double>(merged, "memory.weights.goal");
  m.retrieval.weights.history = read<double>(merged, "memory.weights.history");
  m.retrieval.weights.normalize_blocks = read<bool>(merged, "memory.normalize_blocks");
  m.layout.can_bus_dims = read_count(merged, "memory.can_bus_dims");
  m.layout.history_length = read_count(merged, "memory.history_length");
  m.commonsense_path = read<std::string>(merged, "memory.commonsense_path");
  m.experience_store = read<std::string>(merged, "memory.experience_store");

  auto & r = c.reasoning;
  r.exemplar_count = read_count(merged, "reasoning.exemplar_count");
  r.seed = read_count(merged, "reasoning.seed");
  r.tool_budget = read<int>(merged, "reasoning.tool_budget");
  r.exemplars_path = read<std::string>(merged, "reasoning.exemplars_path");
  r.reflection_enabled = read<bool>(merged, "reasoning.reflection_enabled");

  auto & f = c.reflection;
  f.lambda = read<double>(merged, "reflection.lambda");
  f.sigma = read<double>(merged, "reflection.sigma");
  f.margin = read<double>(merged, "reflection.margin");
  f.threshold = read<double>(merged, "reflection.threshold");
  f.sample_radius = read<double>(merged, "reflection.sample_radius");
  f.max_obstacles_per_step = read_count(merged, "reflection.max_obstacles_per_step");
  f.max_iterations = read<int>(merged, "reflection.max_iterations");
  f.tolerance = read<double>(merged, "reflection.tolerance");
  f.damping = read<double>(merged, "reflection.damping");
  f.nudge = read<double>(merged, "reflection.nudge");
  f.ego_length = read<double>(merged, "reflection.ego_length");
  f.ego_width = read<double>(merged, "reflection.ego_width");

  auto & e = c.evaluation;
  const auto origin = read<std::vector<double>>(merged, "evaluation.grid.origin");
  if (origin.size() != 2) {
    throw ValidationError("evaluation.grid.origin", "expected [x, y]");
  }
  e.grid.origin = {origin[0], origin[1]};
  e.grid.resolution = read<double>(merged, "evaluation.grid.resolution");
  e.grid.nx = read_count(merged, "evaluation.grid.nx");
  e.grid.ny = read_count(merged, "evaluation.grid.ny");
  e.ego_length = read<double>(merged, "evaluation.ego_length");
  e.ego_width = read<double>(merged, "evaluation.ego_width");

  auto & l = c.llm;
  l.endpoint = read<std::string>(merged, "llm.endpoint");
  l.model = read<std::string>(merged, "llm.model");
  l.temperature = read<double>(merged, "llm.temperature");
  l.max_in_flight = read<int>(merged, "llm.max_in_flight");
  l.retry.max_attempts = read<int>(merged, "llm.max_attempts");
  l.retry.initial_backoff = std::chrono::milliseconds(read<long long>(merged, "llm.initial_backoff_ms"));
  l.retry.backoff_multiplier = read<double>(merged, "llm.backoff_multiplier");
  l.auth_header = read<std::string>(merged, "llm.auth_header");
  l.api_key = read<std::string>(merged, "llm.api_key");
  l.timeout = std::chrono::seconds(read<long long>(merged, "llm.timeout_s"));
  return c;
}

json load_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open config file '{}'", path.string()));
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error & e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

const std::map<std::string, std::string> & environment_keys()
{
  static const std::map<std::string, std::string> keys{
    {"AGENT_DRIVER_LLM_ENDPOINT", "llm.endpoint"},
    {"AGENT_DRIVER_LLM_MODEL", "llm.model"},
    {"AGENT_DRIVER_LLM_API_KEY", "llm.api_key"},
    {"AGENT_DRIVER_LLM_AUTH_HEADER", "llm.auth_header"},
    {"AGENT_DRIVER_LLM_MAX_IN_FLIGHT", "llm.max_in_flight"},
    {"AGENT_DRIVER_SEED", "reasoning.seed"},
  };
  return keys;
}

std::map<std::string, std::string> read_environment()
{
  std::map<std::string, std::string> out;
  for (const auto & [name, key] : environment_keys()) {
    if (const char * value = std::getenv(name.c_str()); value != nullptr) {
      out.emplace(name, value);
    }
  }
  return out;
}

std::pair<std::string, json> parse_override(std::string_view text)
{
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError(std::string(text), "override must look like key=value");
  }
  return {std::string(text.substr(0, eq)), parse_scalar(std::string(text.substr(eq + 1)))};
}

PipelineConfig resolve(const Sources & sources)
{
  json doc = to_json(PipelineConfig{}, false);
  if (sources.file) {
    merge_into(doc, *sources.file, "");
  }
  for (const auto & [name, raw] : sources.env) {
    const auto it = environment_keys().find(name);
    if (it == environment_keys().end()) {
      continue;
    }
    const auto & target = doc.at(pointer_of(it->second));
    set_dotted(doc, it->second, target.is_string() ? json(raw) : parse_scalar(raw));
  }
  for (const auto & [key, value] : sources.flags) {
    const auto ptr = pointer_of(key);
    // A bare word given for a string key stays a string even if it parses
    // as a number.
    if (doc.contains(ptr) && doc.at(ptr).is_string() && !value.is_string()) {
      set_dotted(doc, key, json(value.dump()));
    } else {
      set_dotted(doc, key, value);
    }
  }
  auto config = from_json(doc);
  validate(config);
  return config;
}

void validate(const PipelineConfig & config)
{
  const auto positive = [](double v, const char * field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(field, "must be a positive finite number");
    }
  };
  positive(config.tools.corridor_half_width, "tools.corridor_half_width");
  positive(config.tools.ego_length, "tools.ego_length");
  positive(config.tools.ego_width, "tools.ego_width");
  if (!(config.tools.collision_margin >= 0.0)) {
    throw ValidationError("tools.collision_margin", "must be nonnegative");
  }
  if (config.memory.retrieval.top_k < 1) {
    throw ValidationError("memory.top_k", "must be at least 1");
  }
  config.memory.retrieval.weights.validate();
  if (config.reasoning.tool_budget < 1) {
    throw ValidationError("reasoning.tool_budget", "must be at least 1");
  }
  config.reflection.validate();
  positive(config.evaluation.grid.resolution, "evaluation.grid.resolution");
  positive(config.evaluation.ego_length, "evaluation.ego_length");
  positive(config.evaluation.ego_width, "evaluation.ego_width");
  if (config.evaluation.grid.nx == 0 || config.evaluation.grid.ny == 0) {
    throw ValidationError("evaluation.grid", "dimensions must be positive");
  }
  if (config.llm.max_in_flight < 1) {
    throw ValidationError("llm.max_in_flight", "must be at least 1");
  }
  if (config.llm.retry.max_attempts < 1) {
    throw ValidationError("llm.max_attempts", "must be at least 1");
  }
  if (config.llm.temperature < 0.0) {
    throw ValidationError("llm.temperature", "must be nonnegative");
  }
}

}  // namespace agent_driver::config
