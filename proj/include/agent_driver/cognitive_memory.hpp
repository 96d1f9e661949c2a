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

#ifndef AGENT_DRIVER__COGNITIVE_MEMORY_HPP_
#define AGENT_DRIVER__COGNITIVE_MEMORY_HPP_

#include "agent_driver/llm_interface.hpp"
#include "agent_driver/scene_model.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::memory
{

/// Ordered text blocks (traffic rules, risky-behavior notes).
struct CommonsenseMemory
{
  std::vector<std::string> blocks;

  /// Blocks joined by blank lines, in file order.
  std::string text() const;
};

/// Splits on lines consisting of "---". Blank blocks are dropped; a result
/// with no blocks throws ParseError.
CommonsenseMemory parse_commonsense(std::string_view text);
CommonsenseMemory load_commonsense(const std::filesystem::path & path);

/// Key split: e = (vx, vy, ax, ay, heading, can_bus...), g = goal one-hot,
/// h = flattened history (x0, y0, x1, y1, ...).
struct KeyLayout
{
  std::size_t can_bus_dims = 0;
  std::size_t history_length = 4;

  friend bool operator==(const KeyLayout &, const KeyLayout &) = default;

  std::size_t ego_dims() const { return 5 + can_bus_dims; }
  std::size_t goal_dims() const { return 3; }
  std::size_t history_dims() const { return 2 * history_length; }
  std::size_t size() const { return ego_dims() + goal_dims() + history_dims(); }
};

/// Throws LengthMismatch when the ego history or CAN-bus length disagrees
/// with the layout.
std::vector<double> build_key(const scene::EgoState & ego, const KeyLayout & layout);

struct SimilarityWeights
{
  double ego = 1.0;
  double goal = 1.0;
  double history = 1.0;
  /// L2-normalize each block of query and key before weighting.
  bool normalize_blocks = false;

  /// Throws ValidationError unless all weights are finite, nonnegative and
  /// at least one is positive.
  void validate() const;
};

struct ExperienceRecord
{
  std::string scene_id;
  std::vector<double> key;
  std::string scenario_text;
  Trajectory trajectory;

  friend bool operator==(const ExperienceRecord &, const ExperienceRecord &) = default;
};

nlohmann::json to_json(const ExperienceRecord & record);
ExperienceRecord experience_record_from_json(const nlohmann::json & j);

struct Candidate
{
  ExperienceRecord record;
  double score = 0.0;
};

/// Weighted inner product sum_j q_j w_j k_j with the block weights expanded
/// over the layout.
double similarity(
  const std::vector<double> & query, const std::vector<double> & key, const KeyLayout & layout,
  const SimilarityWeights & weights);

/// Experience records under a fixed key layout. Readers may run
/// concurrently; insert takes an exclusive lock.
class ExperienceStore
{
public:
  explicit ExperienceStore(KeyLayout layout = {});
  ExperienceStore(const ExperienceStore & other);
  ExperienceStore & operator=(const ExperienceStore & other);

  const KeyLayout & layout() const { return layout_; }

  /// Appends the record; a repeated scene_id gets a "#2", "#3", ... suffix.
  /// Returns the stored scene_id. Throws LengthMismatch.
  std::string insert(ExperienceRecord record);

  std::size_t size() const;
  std::vector<ExperienceRecord> records() const;

  /// The `k` best records by descending score, ties by scene_id then
  /// insertion order. Throws EmptyStore, LengthMismatch, ValidationError.
  std::vector<Candidate> stage1_topk(
    const std::vector<double> & query, const SimilarityWeights & weights, std::size_t k) const;

  /// JSON lines, one record per line.
  void save(const std::filesystem::path & path) const;
  /// Throws ParseError or LengthMismatch.
  static ExperienceStore load(const std::filesystem::path & path, const KeyLayout & layout);

private:
  KeyLayout layout_;
  mutable std::shared_mutex mutex_;
  std::vector<ExperienceRecord> records_;
};

struct RetrievalResult
{
  std::vector<Candidate> candidates;  // stage-1 order
  std::size_t chosen_index = 0;
  std::string rerank_rationale;  // raw LLM reply, empty when not asked
  bool llm_called = false;
  bool fallback = false;  // reply did not name exactly one candidate

  const ExperienceRecord & chosen() const { return candidates.at(chosen_index).record; }
};

nlohmann::json to_json(const RetrievalResult & result);

/// The 1-based candidate named by `reply`: the only distinct integer in
/// [1, count] appearing in it.
std::optional<std::size_t> parse_rerank_choice(std::string_view reply, std::size_t count);

/// Asks the LLM to pick among numbered candidates. One candidate is chosen
/// without a call; an unusable reply keeps stage-1 rank 1 and sets
/// `fallback`. Backend transport errors propagate.
RetrievalResult stage2_rerank(
  llm::Backend & backend, std::string_view query_text, std::vector<Candidate> candidates);

struct MemoryConfig
{
  bool commonsense_enabled = true;
  bool experience_enabled = true;
  std::size_t top_k = 3;
  SimilarityWeights weights;
};

/// The memory input to reasoning.
struct MemoryContext
{
  std::string commonsense;
  std::optional<RetrievalResult> experience;

  /// Prompt section describing both memories.
  std::string render() const;
};

/// build_key, stage1_topk and stage2_rerank. The store may be null only
/// when experience memory is disabled. Throws EmptyStore.
MemoryContext retrieve(
  const CommonsenseMemory * commonsense, const ExperienceStore * store, const scene::SceneSnapshot & snap,
  llm::Backend & backend, const MemoryConfig & config, std::string_view query_text);

}  // namespace agent_driver::memory

#endif  // AGENT_DRIVER__COGNITIVE_MEMORY_HPP_
