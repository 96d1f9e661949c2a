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

#include "agent_driver/errors.hpp"
#include "agent_driver/reasoning_engine.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>

namespace agent_driver::reasoning
{
namespace
{

using nlohmann::json;
using agent_driver::testing::data_path;

using Rules = std::vector<llm::ScriptedBackend::Rule>;

llm::ScriptedBackend::Rule text_rule(const std::string & match, const std::string & text, bool repeat = true)
{
  return {match, llm::ChatTurn::assistant(text), repeat};
}

scene::SceneSnapshot fixture() { return scene::load_snapshot(data_path("fixture_scene.json")); }

Rules fixture_rules() { return llm::ScriptedBackend::load_rules(data_path("fixture_script.json")); }

PipelineResources resources_with_store(const config::PipelineConfig & cfg)
{
  auto no_store = cfg;
  no_store.memory.retrieval.experience_enabled = false;
  auto res = load_resources(no_store);
  memory::ExperienceStore store(cfg.memory.layout);
  for (const auto * name : {"train/train-follow.json", "train/train-left.json", "train/train-clear.json"}) {
    store.insert(make_experience_record(scene::load_snapshot(data_path(name)), cfg.memory.layout, res.registry, cfg.tools));
  }
  res.experience = std::move(store);
  return res;
}

TEST(EgoHeader, ListsStateAndGoal)
{
  const auto header = ego_header(fixture().ego);
  EXPECT_NE(header.find("(0.00,6.00)"), std::string::npos);
  EXPECT_NE(header.find("Mission goal: go_straight"), std::string::npos);
}

TEST(ToolUse, FollowsTheScript)
{
  const auto snap = fixture();
  llm::ScriptedBackend backend(fixture_rules());
  const auto r = tool_use_loop(snap, backend, tools::ToolRegistry{}, {}, 16);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.activated_modules, (std::vector<std::string>{"detection", "prediction", "occupancy"}));
  ASSERT_EQ(r.invocations.size(), 4u);
  EXPECT_EQ(r.invocations[0].call.name, "get_front_object_detections");
  EXPECT_NE(r.observation.find("Observation from get_leading_object_detection:"), std::string::npos);
  EXPECT_NE(r.observation.find("location (0.00, 18.00): 0.90"), std::string::npos);
  EXPECT_TRUE(llm::well_formed(r.conversation));
}

TEST(ToolUse, BudgetTruncates)
{
  const auto snap = fixture();
  llm::ScriptedBackend backend({text_rule("Do you need*", "Yes"),
    {"*", llm::ChatTurn::assistant_call({"get_all_object_detections", json::object()}), true}});
  const auto r = tool_use_loop(snap, backend, tools::ToolRegistry{}, {}, 5);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.completions, 5);
  EXPECT_NE(r.observation.find("Note: information gathering stopped after 5 LLM calls."), std::string::npos);
  EXPECT_THROW(tool_use_loop(snap, backend, tools::ToolRegistry{}, {}, 0), ValidationError);
}

TEST(ToolUse, BadCallsBecomeObservations)
{
  const auto snap = fixture();
  llm::ScriptedBackend backend({text_rule("Do you need the map*", "Yes", false),
    {"The map functions*", llm::ChatTurn::assistant_call({"fly_drone", json::object()}), false},
    text_rule("Do you need*", "No"), text_rule("*", "done")});
  const auto r = tool_use_loop(snap, backend, tools::ToolRegistry{}, {}, 16);
  ASSERT_EQ(r.invocations.size(), 1u);
  EXPECT_EQ(r.invocations[0].error, "UnknownTool");
  EXPECT_NE(r.observation.find("Error (UnknownTool)"), std::string::npos);
}

TEST(Reasoning, ParsesLabeledSections)
{
  const auto r = parse_reasoning(
    "notable objects:\n1. veh-lead: slow car ahead\n* ped-1: crossing\nPotential Effects:\n- slow down\n- none\n");
  EXPECT_TRUE(r.parsed);
  ASSERT_EQ(r.notable_objects.size(), 2u);
  EXPECT_EQ(r.notable_objects[0], (NotableObject{"veh-lead", "slow car ahead"}));
  EXPECT_EQ(r.potential_effects, std::vector<std::string>{"slow down"});
  EXPECT_FALSE(parse_reasoning("I think we should go.").parsed);
  const auto none = parse_reasoning("Notable objects:\nNone\nPotential effects:\nnone");
  EXPECT_TRUE(none.parsed);
  EXPECT_TRUE(none.notable_objects.empty());
}

TEST(Exemplars, DeterministicSelection)
{
  const auto pool = builtin_exemplars();
  ASSERT_GE(pool.size(), 4u);
  const auto a = select_exemplars(pool, 4, 7, "scene-a");
  const auto b = select_exemplars(pool, 4, 7, "scene-a");
  ASSERT_EQ(a.size(), 4u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].scene_id, b[i].scene_id);
    ids.insert(a[i].scene_id);
  }
  EXPECT_EQ(ids.size(), 4u);
  EXPECT_EQ(select_exemplars(pool, 100, 7, "x").size(), pool.size());
  EXPECT_TRUE(select_exemplars(pool, 0, 7, "x").empty());
  EXPECT_EQ(fnv1a(""), 14695981039346656037ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Planning, FallsBackOnUnknownPlan)
{
  llm::ScriptedBackend good({text_rule("*", "Driving plan: stop")});
  const auto plan = task_planning(good, "obs", "", {}, {});
  EXPECT_FALSE(plan.fallback);
  EXPECT_EQ(plan.plan.str(), "stop");
  llm::ScriptedBackend bad({text_rule("*", "Driving plan: fly")});
  const auto fallback = task_planning(bad, "obs", "", {}, {});
  EXPECT_TRUE(fallback.fallback);
  EXPECT_EQ(fallback.plan.str(), "move_forward_with_constant_speed");
}

TEST(Motion, RetriesThenFallsBack)
{
  const auto ego = fixture().ego;
  llm::ScriptedBackend second_try({text_rule("*Plan the trajectory.", "Trajectory: (1,2)", false),
    text_rule("*", "Trajectory:\n(0,1), (0,2), (0,3), (0,4), (0,5), (0,6)")});
  const auto ok = motion_planning(second_try, "obs", "", {}, {}, std::nullopt, ego);
  EXPECT_EQ(ok.attempts, 2);
  EXPECT_FALSE(ok.invalid_output);
  EXPECT_EQ(ok.decode_errors.size(), 1u);
  EXPECT_DOUBLE_EQ(ok.trajectory.points[5].y, 6.0);

  llm::ScriptedBackend hopeless({text_rule("*", "I cannot plan.")});
  const auto cv = motion_planning(hopeless, "obs", "", {}, {}, std::nullopt, ego);
  EXPECT_TRUE(cv.invalid_output);
  EXPECT_EQ(cv.fallback, FallbackSource::constant_velocity);
  EXPECT_DOUBLE_EQ(cv.trajectory.points[5].y, 18.0);

  Trajectory remembered;
  remembered.points.fill({1.0, 1.0});
  const auto mem = motion_planning(hopeless, "obs", "", {}, {}, remembered, ego);
  EXPECT_EQ(mem.fallback, FallbackSource::memory);
  EXPECT_EQ(mem.trajectory, remembered);
}

TEST(Pipeline, FixtureRunIsComplete)
{
  const config::PipelineConfig cfg;
  const auto res = resources_with_store(cfg);
  llm::ScriptedBackend backend(fixture_rules());
  const auto out = run_pipeline(fixture(), backend, res, cfg);
  EXPECT_EQ(out.stages, (std::vector<std::string>{"tool_use", "retrieve", "chain_of_thought", "task_planning",
                          "motion_planning", "self_reflection"}));
  EXPECT_TRUE(out.flags.empty());
  EXPECT_EQ(out.plan.plan.str(), "move_forward_with_deceleration");
  EXPECT_EQ(out.reasoning.notable_objects.size(), 2u);
  EXPECT_DOUBLE_EQ(out.trajectory.points[5].y, 13.8);
  const auto j = to_json(out);
  EXPECT_EQ(j.at("schema"), kOutputSchema);
  EXPECT_EQ(output_trajectory(j), out.trajectory);
  EXPECT_TRUE(j.at("config").contains("reflection"));
}

TEST(Pipeline, DisabledStagesAreMarked)
{
  config::PipelineConfig cfg;
  cfg.memory.retrieval.commonsense_enabled = false;
  cfg.memory.retrieval.experience_enabled = false;
  cfg.reasoning.reflection_enabled = false;
  const auto res = load_resources(cfg);
  llm::ScriptedBackend backend(fixture_rules());
  const auto out = run_pipeline(fixture(), backend, res, cfg);
  EXPECT_EQ(out.stages[1], "retrieve:skipped");
  EXPECT_EQ(out.stages.back(), "self_reflection:skipped");
  EXPECT_FALSE(out.reflection.has_value());
}

TEST(Pipeline, BackendErrorsPropagate)
{
  const config::PipelineConfig cfg;
  const auto res = resources_with_store(cfg);
  llm::ScriptedBackend backend({text_rule("Do you need*", "No")});
  EXPECT_THROW(run_pipeline(fixture(), backend, res, cfg), ScriptExhausted);
}

TEST(Pipeline, ExperienceNeedsAStorePath)
{
  const config::PipelineConfig cfg;
  EXPECT_THROW(load_resources(cfg), ValidationError);
}

TEST(Sft, PairsNeedGroundTruth)
{
  const tools::ToolRegistry registry;
  const auto pair = sft_pair(fixture(), registry, {});
  EXPECT_EQ(pair.at("scene_id"), "fixture-0001");
  const auto completion = pair.at("completion").get<std::string>();
  EXPECT_NE(completion.find("veh-lead"), std::string::npos);
  EXPECT_NE(completion.find("Trajectory:\n(0.00,2.70), (0.00,5.40)"), std::string::npos);
  const auto no_gt = scene::load_snapshot(data_path("fixture_scene_no_gt.json"));
  EXPECT_THROW(sft_pair(no_gt, registry, {}), MissingGroundTruth);
  EXPECT_THROW(export_sft_pairs({fixture(), no_gt}, registry, {}), MissingGroundTruth);
  EXPECT_TRUE(export_sft_pairs({}, registry, {}).empty());
}

}  // namespace
}  // namespace agent_driver::reasoning
