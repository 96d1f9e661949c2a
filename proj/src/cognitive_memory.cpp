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
#include "agent_driver/prompts.hpp"
#include "agent_driver/trajectory_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace agent_driver::memory
{

using nlohmann::json;

namespace
{

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<double> block_weights(const KeyLayout & layout, const SimilarityWeights & weights)
{
  std::vector<double> w;
  w.reserve(layout.size());
  w.insert(w.end(), layout.ego_dims(), weights.ego);
  w.insert(w.end(), layout.goal_dims(), weights.goal);
  w.insert(w.end(), layout.history_dims(), weights.history);
  return w;
}

std::vector<double> normalized_blocks(const std::vector<double> & v, const KeyLayout & layout)
{
  std::vector<double> out = v;
  const std::array<std::size_t, 3> sizes{layout.ego_dims(), layout.goal_dims(), layout.history_dims()};
  std::size_t begin = 0;
  for (const auto size : sizes) {
    const auto first = out.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = first + static_cast<std::ptrdiff_t>(size);
    const double norm = std::sqrt(std::inner_product(first, last, first, 0.0));
    if (norm > 0.0) {
      std::for_each(first, last, [norm](double & x) { x /= norm; });
    }
    begin += size;
  }
  return out;
}

void check_length(const std::vector<double> & key, const KeyLayout & layout, std::string_view what)
{
  if (key.size() != layout.size()) {
    throw LengthMismatch(fmt::format("{} has length {}, store layout expects {}", what, key.size(), layout.size()));
  }
}

std::string render_candidate(std::size_t number, const Candidate & candidate)
{
  return fmt::format(
    "Candidate {} (scene {}):\n{}\nPlanned trajectory: {}", number, candidate.record.scene_id,
    trim(candidate.record.scenario_text), reasoning::encode_trajectory(candidate.record.trajectory));
}

}  // namespace

std::string CommonsenseMemory::text() const
{
  std::string out;
  for (const auto & block : blocks) {
    if (!out.empty()) {
      out += "\n\n";
    }
    out += block;
  }
  return out;
}

CommonsenseMemory parse_commonsense(std::string_view text)
{
  CommonsenseMemory memory;
  std::string current;
  const auto flush = [&] {
    const auto block = trim(current);
    if (!block.empty()) {
      memory.blocks.emplace_back(block);
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (trim(line) == "---") {
      flush();
    } else {
      current.append(line);
      current.push_back('\n');
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  flush();
  if (memory.blocks.empty()) {
    throw ParseError("commonsense memory has no text blocks");
  }
  return memory;
}

CommonsenseMemory load_commonsense(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open commonsense file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_commonsense(buffer.str());
}

std::vector<double> build_key(const scene::EgoState & ego, const KeyLayout & layout)
{
  if (ego.history.size() != layout.history_length) {
    throw LengthMismatch(
      fmt::format("ego history has {} points, key layout expects {}", ego.history.size(), layout.history_length));
  }
  if (ego.can_bus_extras.size() != layout.can_bus_dims) {
    throw LengthMismatch(fmt::format(
      "ego CAN bus has {} values, key layout expects {}", ego.can_bus_extras.size(), layout.can_bus_dims));
  }
  std::vector<double> key;
  key.reserve(layout.size());
  key.insert(key.end(), {ego.velocity.x, ego.velocity.y, ego.acceleration.x, ego.acceleration.y, ego.heading});
  key.insert(key.end(), ego.can_bus_extras.begin(), ego.can_bus_extras.end());
  const auto goal = ego.goal_one_hot();
  key.insert(key.end(), goal.begin(), goal.end());
  for (const auto & p : ego.history) {
    key.push_back(p.x);
    key.push_back(p.y);
  }
  return key;
}

void SimilarityWeights::validate() const
{
  for (const double w : {ego, goal, history}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("memory.weights", "weights must be finite and nonnegative");
    }
  }
  if (ego == 0.0 && goal == 0.0 && history == 0.0) {
    throw ValidationError("memory.weights", "at least one weight must be positive");
  }
}

json to_json(const ExperienceRecord & record)
{
  json traj = json::array();
  for (const auto & p : record.trajectory.points) {
    traj.push_back({p.x, p.y});
  }
  return json{
    {"scene_id", record.scene_id}, {"key", record.key}, {"scenario_text", record.scenario_text},
    {"trajectory", traj}};
}

ExperienceRecord experience_record_from_json(const json & j)
{
  try {
    ExperienceRecord record;
    record.scene_id = j.at("scene_id").get<std::string>();
    record.key = j.at("key").get<std::vector<double>>();
    record.scenario_text = j.at("scenario_text").get<std::string>();
    const auto & traj = j.at("trajectory");
    if (!traj.is_array() || traj.size() != kHorizonSteps) {
      throw ParseError("experience trajectory must have six points");
    }
    for (std::size_t i = 0; i < kHorizonSteps; ++i) {
      const auto xy = traj.at(i).get<std::vector<double>>();
      if (xy.size() != 2 || !std::isfinite(xy[0]) || !std::isfinite(xy[1])) {
        throw ParseError("experience waypoint must be a finite [x, y] pair");
      }
      record.trajectory.points[i] = {xy[0], xy[1]};
    }
    return record;
  } catch (const json::exception & e) {
    throw ParseError(fmt::format("bad experience record: {}", e.what()));
  }
}

double similarity(
  const std::vector<double> & query, const std::vector<double> & key, const KeyLayout & layout,
  const SimilarityWeights & weights)
{
  check_length(query, layout, "query key");
  check_length(key, layout, "record key");
  const auto w = block_weights(layout, weights);
  const auto & q = weights.normalize_blocks ? normalized_blocks(query, layout) : query;
  const auto & k = weights.normalize_blocks ? normalized_blocks(key, layout) : key;
  double score = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    score += q[j] * w[j] * k[j];
  }
  return score;
}

ExperienceStore::ExperienceStore(KeyLayout layout) : layout_(layout) {}

ExperienceStore::ExperienceStore(const ExperienceStore & other) : layout_(other.layout_)
{
  std::shared_lock lock(other.mutex_);
  records_ = other.records_;
}

ExperienceStore & ExperienceStore::operator=(const ExperienceStore & other)
{
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    layout_ = other.layout_;
    records_ = other.records_;
  }
  return *this;
}

std::string ExperienceStore::insert(ExperienceRecord record)
{
  check_length(record.key, layout_, "record key");
  std::unique_lock lock(mutex_);
  const auto taken = [&](const std::string & id) {
    return std::any_of(records_.begin(), records_.end(), [&](const auto & r) { return r.scene_id == id; });
  };
  if (taken(record.scene_id)) {
    std::string candidate;
    for (int n = 2;; ++n) {
      candidate = fmt::format("{}#{}", record.scene_id, n);
      if (!taken(candidate)) {
        break;
      }
    }
    record.scene_id = candidate;
  }
  records_.push_back(std::move(record));
  return records_.back().scene_id;
}

std::size_t ExperienceStore::size() const
{
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<ExperienceRecord> ExperienceStore::records() const
{
  std::shared_lock lock(mutex_);
  return records_;
}

std::vector<Candidate> ExperienceStore::stage1_topk(
  const std::vector<double> & query, const SimilarityWeights & weights, std::size_t k) const
{
  weights.validate();
  check_length(query, layout_, "query key");
  if (k == 0) {
    throw ValidationError("memory.top_k", "K must be at least 1");
  }
  std::shared_lock lock(mutex_);
  if (records_.empty()) {
    throw EmptyStore("experience memory is empty");
  }
  std::vector<double> scores(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    scores[i] = similarity(query, records_[i].key, layout_, weights);
  }
  std::vector<std::size_t> order(records_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
    [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) {
        return scores[a] > scores[b];
      }
      if (records_[a].scene_id != records_[b].scene_id) {
        return records_[a].scene_id < records_[b].scene_id;
      }
      return a < b;
    });
  std::vector<Candidate> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({records_[order[i]], scores[order[i]]});
  }
  return out;
}

void ExperienceStore::save(const std::filesystem::path & path) const
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ParseError(fmt::format("cannot write experience store '{}'", path.string()));
  }
  std::shared_lock lock(mutex_);
  for (const auto & record : records_) {
    out << to_json(record).dump() << '\n';
  }
}

ExperienceStore ExperienceStore::load(const std::filesystem::path & path, const KeyLayout & layout)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open experience store '{}'", path.string()));
  }
  ExperienceStore store(layout);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error & e) {
      throw ParseError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
    store.insert(experience_record_from_json(doc));
  }
  return store;
}

json to_json(const RetrievalResult & result)
{
  json candidates = json::array();
  for (const auto & c : result.candidates) {
    candidates.push_back({{"scene_id", c.record.scene_id}, {"score", c.score}});
  }
  return json{
    {"candidates", candidates}, {"chosen", result.chosen().scene_id}, {"chosen_rank", result.chosen_index + 1},
    {"rerank_rationale", result.rerank_rationale}, {"llm_called", result.llm_called},
    {"fallback", result.fallback}};
}

std::optional<std::size_t> parse_rerank_choice(std::string_view reply, std::size_t count)
{
  std::set<std::size_t> named;
  std::size_t pos = 0;
  while (pos < reply.size()) {
    if (!std::isdigit(static_cast<unsigned char>(reply[pos]))) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < reply.size() && std::isdigit(static_cast<unsigned char>(reply[end]))) {
      ++end;
    }
    if (end - pos <= 6) {
      const auto value = static_cast<std::size_t>(std::stoul(std::string(reply.substr(pos, end - pos))));
      if (value >= 1 && value <= count) {
        named.insert(value);
      }
    }
    pos = end;
  }
  if (named.size() != 1) {
    return std::nullopt;
  }
  return *named.begin();
}

RetrievalResult stage2_rerank(llm::Backend & backend, std::string_view query_text, std::vector<Candidate> candidates)
{
  if (candidates.empty()) {
    throw EmptyStore("no candidates to rerank");
  }
  RetrievalResult result;
  result.candidates = std::move(candidates);
  if (result.candidates.size() == 1) {
    return result;
  }

  std::string listing;
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    if (i > 0) {
      listing += "\n\n";
    }
    listing += render_candidate(i + 1, result.candidates[i]);
  }
  llm::CompletionRequest request;
  request.messages.push_back(llm::ChatTurn::system(std::string(prompts::embedded("prompts/rerank_system"))));
  request.messages.push_back(llm::ChatTurn::user(prompts::render_named(
    "prompts/rerank_user", {{"query", std::string(trim(query_text))},
                            {"candidates", listing},
                            {"count", std::to_string(result.candidates.size())}})));
  const auto reply = backend.complete(request);
  result.llm_called = true;
  result.rerank_rationale = reply.turn.content;
  const auto choice = reply.turn.tool_call ? std::nullopt : parse_rerank_choice(reply.turn.content, result.candidates.size());
  if (choice) {
    result.chosen_index = *choice - 1;
  } else {
    result.fallback = true;
  }
  return result;
}

std::string MemoryContext::render() const
{
  std::string out;
  if (!commonsense.empty()) {
    out += "*****Traffic Rules:*****\n" + commonsense;
  }
  if (experience) {
    if (!out.empty()) {
      out += "\n\n";
    }
    const auto & chosen = experience->chosen();
    out += fmt::format(
      "*****Past Driving Experience for Reference:*****\nMost similar driving experience from memory (scene {}):\n{}\n"
      "Planned trajectory in that experience: {}",
      chosen.scene_id, trim(chosen.scenario_text), reasoning::encode_trajectory(chosen.trajectory));
  }
  return out;
}

MemoryContext retrieve(
  const CommonsenseMemory * commonsense, const ExperienceStore * store, const scene::SceneSnapshot & snap,
  llm::Backend & backend, const MemoryConfig & config, std::string_view query_text)
{
  MemoryContext context;
  if (config.commonsense_enabled && commonsense != nullptr) {
    context.commonsense = commonsense->text();
  }
  if (!config.experience_enabled) {
    return context;
  }
  if (store == nullptr || store->size() == 0) {
    throw EmptyStore("experience memory is enabled but the store is empty");
  }
  const auto query = build_key(snap.ego, store->layout());
  auto candidates = store->stage1_topk(query, config.weights, config.top_k);
  context.experience = stage2_rerank(backend, query_text, std::move(candidates));
  return context;
}

}  // namespace agent_driver::memory
