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

#include "agent_driver/reasoning_engine.hpp"

#include "agent_driver/errors.hpp"
#include "agent_driver/prompts.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

namespace agent_driver::reasoning
{

using nlohmann::json;

namespace
{

constexpr std::array<tools::ToolModule, 4> kModuleOrder{
  tools::ToolModule::detection, tools::ToolModule::prediction, tools::ToolModule::occupancy, tools::ToolModule::map};

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string number(double v)
{
  auto text = fmt::format("{:.2f}", v);
  if (text == "-0.00") {
    text = "0.00";
  }
  return text;
}

std::string pair_text(const Vec2 & p)
{
  return fmt::format("({},{})", number(p.x), number(p.y));
}

std::string observation_block(std::string_view tool, std::string_view text)
{
  return fmt::format("Observation from {}:\n{}", tool, text);
}

std::string render_reasoning(const ReasoningResult & reasoning)
{
  const auto raw = trim(reasoning.raw_text);
  return raw.empty() ? std::string("none") : std::string(raw);
}

std::string render_exemplars(const std::vector<Exemplar> & exemplars, bool for_plan)
{
  if (exemplars.empty()) {
    return {};
  }
  std::string out = "Examples:";
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const auto & e = exemplars[i];
    out += fmt::format("\n\nExample {}:\nInput:\n{}\n", i + 1, trim(e.observation));
    if (for_plan) {
      out += fmt::format("Reasoning:\n{}\nOutput:\nDriving plan: {}", trim(e.reasoning), trim(e.plan));
    } else {
      out += fmt::format("Output:\n{}", trim(e.reasoning));
    }
  }
  return out;
}

/// Strips "-", "*", "+" bullets and "1." / "1)" numbering.
std::string_view strip_bullet(std::string_view line)
{
  line = trim(line);
  if (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '+')) {
    return trim(line.substr(1));
  }
  std::size_t digits = 0;
  while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) {
    ++digits;
  }
  if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')')) {
    return trim(line.substr(digits + 1));
  }
  return line;
}

bool is_none(std::string_view item)
{
  auto text = lower(trim(item));
  while (!text.empty() && text.back() == '.') {
    text.pop_back();
  }
  return text == "none" || text == "n/a";
}

std::vector<std::string> section_items(std::string_view body)
{
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto nl = body.find('\n', pos);
    const auto line = strip_bullet(body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (!line.empty() && !is_none(line)) {
      items.emplace_back(line);
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  return items;
}

std::string dispatch_text(
  const scene::SceneSnapshot & snap, const tools::ToolRegistry & registry, const tools::ToolConfig & tool_config,
  const std::string & name)
{
  return tools::dispatch(snap, {name, json::object()}, registry, tool_config).text;
}

json trajectory_json(const Trajectory & traj)
{
  json out = json::array();
  for (const auto & p : traj.points) {
    out.push_back({p.x, p.y});
  }
  return out;
}

json to_json(const ReasoningResult & r)
{
  json objects = json::array();
  for (const auto & o : r.notable_objects) {
    objects.push_back({{"referent", o.referent}, {"description", o.description}});
  }
  return json{
    {"notable_objects", objects}, {"potential_effects", r.potential_effects}, {"raw_text", r.raw_text},
    {"parsed", r.parsed}};
}

const Trajectory & require_gt(const scene::SceneSnapshot & snap)
{
  if (!snap.gt_trajectory) {
    throw MissingGroundTruth(fmt::format("scene '{}' has no ground-truth trajectory", snap.scene_id));
  }
  return *snap.gt_trajectory;
}

}  // namespace

std::string ego_header(const scene::EgoState & ego)
{
  std::string out = "Ego states:\n";
  out += fmt::format("- Velocity (vx,vy): {} m/s\n", pair_text(ego.velocity));
  out += fmt::format("- Acceleration (ax,ay): {} m/s^2\n", pair_text(ego.acceleration));
  out += fmt::format("- Heading: {} rad\n", number(ego.heading));
  if (!ego.can_bus_extras.empty()) {
    std::vector<std::string> values;
    for (const double v : ego.can_bus_extras) {
      values.push_back(number(v));
    }
    out += fmt::format("- CAN bus: [{}]\n", fmt::join(values, ", "));
  }
  std::vector<std::string> history;
  for (const auto & p : ego.history) {
    history.push_back(pair_text(p));
  }
  out += fmt::format("Historical trajectory (oldest first, 0.5 s apart): [{}]\n", fmt::join(history, ", "));
  out += fmt::format("Mission goal: {}", scene::to_string(ego.mission_goal));
  return out;
}

ToolUseResult tool_use_loop(
  const scene::SceneSnapshot & snap, llm::Backend & backend, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config, int budget)
{
  if (budget < 1) {
    throw ValidationError("reasoning.tool_budget", "must be at least 1");
  }
  ToolUseResult result;
  const auto header = ego_header(snap.ego);
  std::vector<std::string> blocks;
  auto & messages = result.conversation;
  messages.push_back(llm::ChatTurn::system(std::string(prompts::embedded("prompts/tool_use_system"))));
  messages.push_back(llm::ChatTurn::user(prompts::render_named("prompts/tool_use_ego", {{"ego", header}})));

  const auto ask = [&](const json & functions) {
    llm::CompletionRequest request{messages, functions};
    auto reply = backend.complete(request);
    ++result.completions;
    messages.push_back(reply.turn);
    return reply.turn;
  };
  const auto execute = [&](const tools::ToolCall & call) {
    const auto outcome = tools::dispatch(snap, call, registry, tool_config);
    messages.push_back(llm::ChatTurn::tool(call.name, outcome.text));
    blocks.push_back(observation_block(call.name, outcome.text));
    result.invocations.push_back({call, outcome.text, outcome.error});
  };

  for (const auto module : kModuleOrder) {
    if (result.completions >= budget) {
      result.truncated = true;
      break;
    }
    std::vector<std::string> names;
    for (const auto * d : registry.for_module(module)) {
      names.push_back(d->name);
    }
    const auto module_name = std::string(tools::to_string(module));
    messages.push_back(llm::ChatTurn::user(prompts::render_named(
      "prompts/tool_use_ask", {{"module", module_name}, {"functions", fmt::format("{}", fmt::join(names, ", "))}})));
    auto turn = ask(json::array());
    const bool activated = turn.tool_call.has_value() || lower(trim(turn.content)).rfind("yes", 0) == 0;
    if (!activated) {
      continue;
    }
    result.activated_modules.push_back(module_name);
    if (turn.tool_call) {
      execute(*turn.tool_call);
    } else {
      messages.push_back(
        llm::ChatTurn::user(prompts::render_named("prompts/tool_use_activate", {{"module", module_name}})));
    }
    const auto functions = registry.export_functions(module);
    while (true) {
      if (result.completions >= budget) {
        result.truncated = true;
        break;
      }
      turn = ask(functions);
      if (!turn.tool_call) {
        break;
      }
      execute(*turn.tool_call);
    }
    if (result.truncated) {
      break;
    }
  }

  result.observation = header;
  for (const auto & block : blocks) {
    result.observation += "\n\n" + block;
  }
  if (result.truncated) {
    result.observation += fmt::format("\n\nNote: information gathering stopped after {} LLM calls.", budget);
  }
  return result;
}

std::string full_observation(
  const scene::SceneSnapshot & snap, const tools::ToolRegistry & registry, const tools::ToolConfig & tool_config)
{
  std::string out = ego_header(snap.ego);
  for (const auto * name : {"get_all_object_detections", "get_all_future_trajectories"}) {
    out += "\n\n" + observation_block(name, dispatch_text(snap, registry, tool_config, name));
  }
  return out;
}

ReasoningResult parse_reasoning(std::string_view reply)
{
  ReasoningResult result;
  result.raw_text = std::string(reply);
  const auto text = lower(reply);
  constexpr std::string_view kObjects = "notable objects:";
  constexpr std::string_view kEffects = "potential effects:";
  const auto objects_at = text.find(kObjects);
  const auto effects_at = text.find(kEffects, objects_at == std::string::npos ? 0 : objects_at);
  result.parsed = objects_at != std::string::npos && effects_at != std::string::npos;

  if (objects_at != std::string::npos) {
    const auto begin = objects_at + kObjects.size();
    const auto end = effects_at == std::string::npos ? reply.size() : effects_at;
    for (const auto & item : section_items(reply.substr(begin, end - begin))) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        result.notable_objects.push_back({item, ""});
      } else {
        result.notable_objects.push_back(
          {std::string(trim(std::string_view(item).substr(0, colon))),
           std::string(trim(std::string_view(item).substr(colon + 1)))});
      }
    }
  }
  if (effects_at != std::string::npos) {
    result.potential_effects = section_items(reply.substr(effects_at + kEffects.size()));
  }
  return result;
}

std::vector<Exemplar> parse_exemplars(const json & doc)
{
  try {
    std::vector<Exemplar> out;
    for (const auto & e : doc.at("exemplars")) {
      out.push_back(
        {e.at("scene_id").get<std::string>(), e.at("observation").get<std::string>(),
         e.at("reasoning").get<std::string>(), e.at("plan").get<std::string>(), e.at("trajectory").get<std::string>()});
    }
    return out;
  } catch (const json::exception & e) {
    throw ParseError(fmt::format("bad exemplar document: {}", e.what()));
  }
}

std::vector<Exemplar> load_exemplars(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open exemplar file '{}'", path.string()));
  }
  try {
    return parse_exemplars(json::parse(in));
  } catch (const json::parse_error & e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<Exemplar> builtin_exemplars()
{
  return parse_exemplars(json::parse(prompts::embedded("exemplars")));
}

std::uint64_t fnv1a(std::string_view text)
{
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::vector<Exemplar> select_exemplars(
  const std::vector<Exemplar> & pool, std::size_t count, std::uint64_t seed, std::string_view scene_id)
{
  std::vector<Exemplar> items = pool;
  const auto n = std::min(count, items.size());
  std::mt19937_64 rng(seed + fnv1a(scene_id));
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng() % (items.size() - i));
    std::swap(items[i], items[j]);
  }
  items.resize(n);
  return items;
}

ReasoningResult chain_of_thought(
  llm::Backend & backend, std::string_view observation, std::string_view memory,
  const std::vector<Exemplar> & exemplars)
{
  llm::CompletionRequest request;
  request.messages.push_back(llm::ChatTurn::system(
    prompts::render_named("prompts/cot_system", {{"exemplars", render_exemplars(exemplars, false)}})));
  request.messages.push_back(llm::ChatTurn::user(prompts::render_named(
    "prompts/cot_user", {{"observation", std::string(observation)}, {"memory", std::string(memory)}})));
  const auto reply = backend.complete(request);
  return parse_reasoning(reply.turn.tool_call ? std::string_view{} : std::string_view(reply.turn.content));
}

PlanResult task_planning(
  llm::Backend & backend, std::string_view observation, std::string_view memory, const ReasoningResult & reasoning,
  const std::vector<Exemplar> & exemplars)
{
  std::vector<std::string> plans;
  for (const auto & p : all_driving_plans()) {
    plans.push_back("- " + p.str());
  }
  llm::CompletionRequest request;
  request.messages.push_back(llm::ChatTurn::system(prompts::render_named(
    "prompts/plan_system",
    {{"plans", fmt::format("{}", fmt::join(plans, "\n"))}, {"exemplars", render_exemplars(exemplars, true)}})));
  request.messages.push_back(llm::ChatTurn::user(prompts::render_named(
    "prompts/plan_user", {{"observation", std::string(observation)},
                          {"memory", std::string(memory)},
                          {"reasoning", render_reasoning(reasoning)}})));
  const auto reply = backend.complete(request);

  PlanResult result;
  result.raw_text = reply.turn.content;
  const auto parsed = reply.turn.tool_call ? std::nullopt : parse_driving_plan(extract_plan_text(reply.turn.content));
  if (parsed) {
    result.plan = *parsed;
  } else {
    result.plan = DrivingPlan{Behavior::move_forward, Speed::constant_speed};
    result.fallback = true;
  }
  return result;
}

std::string_view to_string(FallbackSource source)
{
  switch (source) {
    case FallbackSource::memory:
      return "memory";
    case FallbackSource::constant_velocity:
      return "constant_velocity";
    case FallbackSource::none:
      break;
  }
  return "none";
}

Trajectory constant_velocity_trajectory(const scene::EgoState & ego)
{
  Trajectory traj;
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    traj.points[t] = ego.velocity * (kStepSeconds * static_cast<double>(t + 1));
  }
  return traj;
}

MotionResult motion_planning(
  llm::Backend & backend, std::string_view observation, std::string_view memory, const ReasoningResult & reasoning,
  const DrivingPlan & plan, const std::optional<Trajectory> & memory_trajectory, const scene::EgoState & ego)
{
  llm::CompletionRequest request;
  request.messages.push_back(llm::ChatTurn::system(std::string(prompts::embedded("prompts/motion_system"))));
  request.messages.push_back(llm::ChatTurn::user(prompts::render_named(
    "prompts/motion_user", {{"observation", std::string(observation)},
                            {"memory", std::string(memory)},
                            {"reasoning", render_reasoning(reasoning)},
                            {"plan", plan.str()}})));

  MotionResult result;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    const auto reply = backend.complete(request);
    result.attempts = attempt;
    const std::string_view content = reply.turn.tool_call ? std::string_view{} : std::string_view(reply.turn.content);
    try {
      result.trajectory = decode_trajectory(extract_trajectory_text(content));
      return result;
    } catch (const DecodeError & e) {
      result.decode_errors.emplace_back(e.what());
      request.messages.push_back(reply.turn);
      request.messages.push_back(
        llm::ChatTurn::user(prompts::render_named("prompts/motion_retry", {{"error", e.what()}})));
    }
  }
  result.invalid_output = true;
  if (memory_trajectory) {
    result.trajectory = *memory_trajectory;
    result.fallback = FallbackSource::memory;
  } else {
    result.trajectory = constant_velocity_trajectory(ego);
    result.fallback = FallbackSource::constant_velocity;
  }
  return result;
}

PipelineResources load_resources(const config::PipelineConfig & config)
{
  PipelineResources resources;
  const auto & m = config.memory;
  if (m.retrieval.commonsense_enabled) {
    resources.commonsense = m.commonsense_path.empty()
                              ? memory::parse_commonsense(prompts::embedded("commonsense"))
                              : memory::load_commonsense(m.commonsense_path);
  }
  if (m.retrieval.experience_enabled) {
    if (m.experience_store.empty()) {
      throw ValidationError(
        "memory.experience_store", "required while memory.experience_enabled is true (build one with 'memory build')");
    }
    resources.experience = memory::ExperienceStore::load(m.experience_store, m.layout);
  }
  resources.exemplars =
    config.reasoning.exemplars_path.empty() ? builtin_exemplars() : load_exemplars(config.reasoning.exemplars_path);
  return resources;
}

json to_json(const PipelineOutput & output)
{
  json invocations = json::array();
  for (const auto & inv : output.tool_use.invocations) {
    invocations.push_back(
      {{"name", inv.call.name}, {"arguments", inv.call.arguments}, {"error", inv.error ? json(*inv.error) : json()}});
  }
  const auto & plan = output.plan.plan;
  return json{
    {"schema", kOutputSchema},
    {"scene_id", output.scene_id},
    {"trajectory", trajectory_json(output.trajectory)},
    {"plan",
     {{"text", plan.str()},
      {"behavior", to_string(plan.behavior)},
      {"speed", plan.speed ? json(to_string(*plan.speed)) : json()},
      {"fallback", output.plan.fallback},
      {"raw_text", output.plan.raw_text}}},
    {"reasoning", to_json(output.reasoning)},
    {"retrieval", output.retrieval ? memory::to_json(*output.retrieval) : json()},
    {"motion",
     {{"trajectory", trajectory_json(output.motion.trajectory)},
      {"invalid_output", output.motion.invalid_output},
      {"attempts", output.motion.attempts},
      {"fallback", to_string(output.motion.fallback)},
      {"decode_errors", output.motion.decode_errors}}},
    {"self_reflection", output.reflection ? reflection::to_json(*output.reflection) : json()},
    {"tool_use",
     {{"activated_modules", output.tool_use.activated_modules},
      {"calls", invocations},
      {"completions", output.tool_use.completions},
      {"truncated", output.tool_use.truncated},
      {"observation", output.tool_use.observation}}},
    {"stages", output.stages},
    {"flags", output.flags},
    {"transcript", output.transcript},
    {"config", output.config}};
}

Trajectory output_trajectory(const json & doc)
{
  try {
    const auto & points = doc.at("trajectory");
    std::vector<Vec2> pts;
    for (const auto & p : points) {
      const auto xy = p.get<std::vector<double>>();
      if (xy.size() != 2) {
        throw ParseError("trajectory waypoint must be [x, y]");
      }
      pts.push_back({xy[0], xy[1]});
    }
    return Trajectory::from_points(pts, "trajectory");
  } catch (const json::exception & e) {
    throw ParseError(fmt::format("bad pipeline output: {}", e.what()));
  } catch (const ValidationError & e) {
    throw ParseError(fmt::format("bad pipeline output: {}", e.what()));
  }
}

PipelineOutput run_pipeline(
  const scene::SceneSnapshot & snap, llm::Backend & backend, const PipelineResources & resources,
  const config::PipelineConfig & config)
{
  PipelineOutput out;
  out.scene_id = snap.scene_id;
  out.config = config::to_json(config);

  out.tool_use = tool_use_loop(snap, backend, resources.registry, config.tools, config.reasoning.tool_budget);
  out.stages.emplace_back("tool_use");
  if (out.tool_use.truncated) {
    out.flags.emplace_back("tool_budget_exhausted");
  }
  const auto & observation = out.tool_use.observation;

  memory::MemoryContext context;
  const auto & retrieval_cfg = config.memory.retrieval;
  if (retrieval_cfg.commonsense_enabled || retrieval_cfg.experience_enabled) {
    context = memory::retrieve(
      resources.commonsense ? &*resources.commonsense : nullptr,
      resources.experience ? &*resources.experience : nullptr, snap, backend, retrieval_cfg, observation);
    out.stages.emplace_back("retrieve");
  } else {
    out.stages.emplace_back("retrieve:skipped");
  }
  out.retrieval = context.experience;
  if (out.retrieval && out.retrieval->fallback) {
    out.flags.emplace_back("rerank_fallback");
  }
  const auto memory_text = context.render();

  const auto exemplars =
    select_exemplars(resources.exemplars, config.reasoning.exemplar_count, config.reasoning.seed, snap.scene_id);
  out.reasoning = chain_of_thought(backend, observation, memory_text, exemplars);
  out.stages.emplace_back("chain_of_thought");
  if (!out.reasoning.parsed) {
    out.flags.emplace_back("reasoning_unparsed");
  }

  out.plan = task_planning(backend, observation, memory_text, out.reasoning, exemplars);
  out.stages.emplace_back("task_planning");
  if (out.plan.fallback) {
    out.flags.emplace_back("plan_fallback");
  }

  std::optional<Trajectory> memory_trajectory;
  if (out.retrieval) {
    memory_trajectory = out.retrieval->chosen().trajectory;
  }
  out.motion = motion_planning(backend, observation, memory_text, out.reasoning, out.plan.plan, memory_trajectory, snap.ego);
  out.stages.emplace_back("motion_planning");
  if (out.motion.invalid_output) {
    out.flags.emplace_back("invalid_output");
  }

  out.trajectory = out.motion.trajectory;
  if (config.reasoning.reflection_enabled) {
    auto [rectified, report] = reflection::reflect(snap, out.motion.trajectory, config.reflection);
    out.trajectory = rectified;
    if (report.optimized) {
      out.flags.emplace_back("trajectory_rectified");
    }
    if (report.collided_after) {
      out.flags.emplace_back("collision_after_reflection");
    }
    out.reflection = report;
    out.stages.emplace_back("self_reflection");
  } else {
    out.stages.emplace_back("self_reflection:skipped");
  }
  return out;
}

json sft_pair(const scene::SceneSnapshot & snap, const tools::ToolRegistry & registry, const tools::ToolConfig & tool_config)
{
  const auto & gt = require_gt(snap);

  // Reasoning targets: the objects closest to the ground-truth path.
  constexpr double kNotableRange = 10.0;
  constexpr std::size_t kMaxNotable = 3;
  struct Near
  {
    double distance;
    std::size_t step;
    const scene::Detection * det;
  };
  std::vector<Near> near;
  for (const auto & d : snap.detections) {
    Near best{std::numeric_limits<double>::infinity(), 0, &d};
    for (std::size_t t = 0; t < kHorizonSteps; ++t) {
      const double dist = (d.center - gt.points[t]).norm();
      if (dist < best.distance) {
        best = {dist, t + 1, &d};
      }
    }
    if (best.distance <= kNotableRange) {
      near.push_back(best);
    }
  }
  std::sort(near.begin(), near.end(), [](const Near & a, const Near & b) {
    if (a.distance != b.distance) {
      return a.distance < b.distance;
    }
    return a.det->object_id < b.det->object_id;
  });
  if (near.size() > kMaxNotable) {
    near.resize(kMaxNotable);
  }

  std::string completion = "Notable objects:\n";
  if (near.empty()) {
    completion += "none\n";
  }
  for (const auto & n : near) {
    completion += fmt::format(
      "- {}: {} {} m from the planned path at step {}\n", n.det->object_id, scene::to_string(n.det->category),
      number(n.distance), n.step);
  }
  completion += "Potential effects:\n";
  completion += near.empty() ? "none\n" : "- keep clear of the objects above along the planned path\n";
  completion += "Trajectory:\n" + encode_trajectory(gt);

  json messages = json::array();
  messages.push_back(llm::to_json(llm::ChatTurn::system(std::string(prompts::embedded("prompts/motion_system")))));
  messages.push_back(llm::to_json(llm::ChatTurn::user(prompts::render_named(
    "prompts/sft_user", {{"observation", full_observation(snap, registry, tool_config)}}))));
  return json{{"scene_id", snap.scene_id}, {"messages", messages}, {"completion", completion}};
}

std::vector<json> export_sft_pairs(
  const std::vector<scene::SceneSnapshot> & scenes, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config)
{
  for (const auto & snap : scenes) {
    require_gt(snap);
  }
  std::vector<json> pairs;
  pairs.reserve(scenes.size());
  for (const auto & snap : scenes) {
    pairs.push_back(sft_pair(snap, registry, tool_config));
  }
  return pairs;
}

memory::ExperienceRecord make_experience_record(
  const scene::SceneSnapshot & snap, const memory::KeyLayout & layout, const tools::ToolRegistry & registry,
  const tools::ToolConfig & tool_config)
{
  const auto & gt = require_gt(snap);
  return {snap.scene_id, memory::build_key(snap.ego, layout), full_observation(snap, registry, tool_config), gt};
}

}  // namespace agent_driver::reasoning
