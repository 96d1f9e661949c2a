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

#include "agent_driver/cognitive_memory.hpp"
#include "agent_driver/errors.hpp"
#include "agent_driver/llm_interface.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace agent_driver::memory
{
namespace
{

ExperienceRecord record(const std::string & id, std::vector<double> key)
{
  ExperienceRecord r;
  r.scene_id = id;
  r.key = std::move(key);
  r.scenario_text = "scene " + id;
  for (std::size_t t = 0; t < kHorizonSteps; ++t) {
    r.trajectory.points[t] = {0.0, static_cast<double>(t + 1)};
  }
  return r;
}

std::vector<double> random_key(std::mt19937_64 & rng, const KeyLayout & layout)
{
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> k(layout.size());
  for (auto & v : k) {
    v = u(rng);
  }
  return k;
}

llm::ScriptedBackend::Rule reply_rule(const std::string & text)
{
  return {"*", llm::ChatTurn::assistant(text), true};
}

TEST(Commonsense, SplitsOnSeparatorLines)
{
  const auto mem = parse_commonsense("Rule one.\n---\n\n---\nRule two\nline two\n---\n");
  ASSERT_EQ(mem.blocks.size(), 2u);
  EXPECT_EQ(mem.blocks[1], "Rule two\nline two");
  EXPECT_EQ(mem.text(), "Rule one.\n\nRule two\nline two");
  EXPECT_THROW(parse_commonsense("---\n \n---"), ParseError);
}

TEST(Keys, LayoutAndMismatch)
{
  scene::EgoState ego;
  ego.velocity = {1.0, 2.0};
  ego.acceleration = {3.0, 4.0};
  ego.mission_goal = scene::MissionGoal::turn_left;
  ego.history = {{0.0, -4.0}, {0.0, -3.0}, {0.0, -2.0}, {0.0, -1.0}};
  const KeyLayout layout;
  const auto key = build_key(ego, layout);
  ASSERT_EQ(key.size(), 16u);
  EXPECT_DOUBLE_EQ(key[0], 1.0);
  EXPECT_DOUBLE_EQ(key[3], 4.0);
  EXPECT_DOUBLE_EQ(key[4], kForwardHeading);
  EXPECT_DOUBLE_EQ(key[5], 0.0);
  EXPECT_DOUBLE_EQ(key[6], 1.0);
  EXPECT_DOUBLE_EQ(key[9], -4.0);
  EXPECT_DOUBLE_EQ(key[15], -1.0);
  EXPECT_THROW(build_key(ego, KeyLayout{2, 4}), LengthMismatch);
  ego.history.pop_back();
  EXPECT_THROW(build_key(ego, layout), LengthMismatch);
}

TEST(Similarity, WeightedInnerProduct)
{
  const KeyLayout layout{0, 1};
  const std::vector<double> q{1, 1, 1, 1, 1, 1, 0, 0, 2, 2};
  const std::vector<double> k{1, 2, 3, 4, 5, 1, 0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(similarity(q, k, layout, {1.0, 1.0, 1.0, false}), 15.0 + 1.0 + 4.0);
  EXPECT_DOUBLE_EQ(similarity(q, k, layout, {2.0, 0.0, 0.5, false}), 30.0 + 2.0);
  const double normalized = similarity(q, k, layout, {1.0, 1.0, 1.0, true});
  EXPECT_NEAR(normalized, 15.0 / (std::sqrt(5.0) * std::sqrt(55.0)) + 1.0 + 1.0, 1e-12);
  EXPECT_THROW((SimilarityWeights{0.0, 0.0, 0.0, false}.validate()), ValidationError);
  EXPECT_THROW((SimilarityWeights{-1.0, 1.0, 1.0, false}.validate()), ValidationError);
}

TEST(Store, TopKMatchesBruteForce)
{
  std::mt19937_64 rng(17);
  const KeyLayout layout;
  ExperienceStore store(layout);
  std::vector<ExperienceRecord> all;
  for (int i = 0; i < 200; ++i) {
    auto r = record("s" + std::to_string(i), random_key(rng, layout));
    all.push_back(r);
    store.insert(r);
  }
  const SimilarityWeights w{1.0, 0.5, 2.0, false};
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_key(rng, layout);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto & r : all) {
      scored.emplace_back(similarity(q, r.key, layout, w), r.scene_id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto & a, const auto & b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto top = store.stage1_topk(q, w, 5);
    ASSERT_EQ(top.size(), 5u);
    for (std::size_t i = 0; i < top.size(); ++i) {
      EXPECT_EQ(top[i].record.scene_id, scored[i].second);
      EXPECT_DOUBLE_EQ(top[i].score, scored[i].first);
    }
  }
}

TEST(Store, TiesBreakByIdThenInsertion)
{
  const KeyLayout layout{0, 1};
  ExperienceStore store(layout);
  const std::vector<double> key(layout.size(), 1.0);
  EXPECT_EQ(store.insert(record("b", key)), "b");
  EXPECT_EQ(store.insert(record("a", key)), "a");
  EXPECT_EQ(store.insert(record("a", key)), "a#2");
  const auto top = store.stage1_topk(key, {}, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].record.scene_id, "a");
  EXPECT_EQ(top[1].record.scene_id, "a#2");
  EXPECT_EQ(top[2].record.scene_id, "b");
}

TEST(Store, Errors)
{
  const KeyLayout layout;
  ExperienceStore store(layout);
  EXPECT_THROW(store.stage1_topk(std::vector<double>(layout.size()), {}, 3), EmptyStore);
  store.insert(record("x", std::vector<double>(layout.size(), 0.0)));
  EXPECT_THROW(store.stage1_topk(std::vector<double>(layout.size()), {}, 0), ValidationError);
  EXPECT_THROW(store.stage1_topk(std::vector<double>(3), {}, 1), LengthMismatch);
  EXPECT_THROW(store.insert(record("y", {1.0})), LengthMismatch);
}

TEST(Store, SaveLoadRoundTrip)
{
  agent_driver::testing::TempDir dir("store");
  std::mt19937_64 rng(2);
  const KeyLayout layout;
  ExperienceStore store(layout);
  for (int i = 0; i < 5; ++i) {
    store.insert(record("r" + std::to_string(i), random_key(rng, layout)));
  }
  store.save(dir / "store.jsonl");
  const auto loaded = ExperienceStore::load(dir / "store.jsonl", layout);
  EXPECT_EQ(loaded.records(), store.records());
  EXPECT_THROW(ExperienceStore::load(dir / "store.jsonl", KeyLayout{1, 4}), LengthMismatch);
  std::ofstream(dir / "bad.jsonl") << "{\"scene_id\": 3}\n";
  EXPECT_THROW(ExperienceStore::load(dir / "bad.jsonl", layout), ParseError);
}

TEST(Rerank, ChoiceParsing)
{
  EXPECT_EQ(parse_rerank_choice("2", 3), 2u);
  EXPECT_EQ(parse_rerank_choice("Candidate 3 is closest; candidate 3 again.", 3), 3u);
  EXPECT_FALSE(parse_rerank_choice("1 or 2", 3).has_value());
  EXPECT_FALSE(parse_rerank_choice("7", 3).has_value());
  EXPECT_FALSE(parse_rerank_choice("none of them", 3).has_value());
  EXPECT_EQ(parse_rerank_choice("pick 2 (out of 10)", 3), 2u);
}

TEST(Rerank, UsesReplyOrFallsBack)
{
  std::vector<Candidate> cands{{record("a", {}), 3.0}, {record("b", {}), 2.0}, {record("c", {}), 1.0}};
  llm::ScriptedBackend picks({reply_rule("3\nBecause it matches.")});
  const auto chosen = stage2_rerank(picks, "query", cands);
  EXPECT_TRUE(chosen.llm_called);
  EXPECT_FALSE(chosen.fallback);
  EXPECT_EQ(chosen.chosen().scene_id, "c");

  llm::ScriptedBackend vague({reply_rule("Either 1 or 2.")});
  const auto fallback = stage2_rerank(vague, "query", cands);
  EXPECT_TRUE(fallback.fallback);
  EXPECT_EQ(fallback.chosen().scene_id, "a");

  llm::ScriptedBackend unused({});
  const auto single = stage2_rerank(unused, "query", {cands[1]});
  EXPECT_FALSE(single.llm_called);
  EXPECT_EQ(single.chosen().scene_id, "b");
  EXPECT_EQ(unused.calls(), 0u);
}

TEST(Retrieve, RespectsToggles)
{
  const auto snap = agent_driver::testing::empty_scene();
  const auto rules = parse_commonsense("Keep right.\n---\nYield to pedestrians.");
  ExperienceStore store;
  store.insert(record("only", build_key(snap.ego, store.layout())));
  llm::ScriptedBackend backend({reply_rule("1")});

  MemoryConfig cfg;
  auto ctx = retrieve(&rules, &store, snap, backend, cfg, "query");
  EXPECT_NE(ctx.render().find("*****Traffic Rules:*****"), std::string::npos);
  EXPECT_NE(ctx.render().find("*****Past Driving Experience for Reference:*****"), std::string::npos);
  ASSERT_TRUE(ctx.experience.has_value());
  EXPECT_EQ(ctx.experience->chosen().scene_id, "only");

  cfg.commonsense_enabled = false;
  cfg.experience_enabled = false;
  ctx = retrieve(&rules, nullptr, snap, backend, cfg, "query");
  EXPECT_EQ(ctx.render(), "");

  cfg.experience_enabled = true;
  const ExperienceStore empty;
  EXPECT_THROW(retrieve(&rules, &empty, snap, backend, cfg, "query"), EmptyStore);
}

}  // namespace
}  // namespace agent_driver::memory
