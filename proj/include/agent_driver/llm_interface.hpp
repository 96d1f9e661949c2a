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

#ifndef AGENT_DRIVER__LLM_INTERFACE_HPP_
#define AGENT_DRIVER__LLM_INTERFACE_HPP_

#include "agent_driver/tool_library.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agent_driver::llm
{

using tools::ToolCall;

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct ChatTurn
{
  Role role = Role::user;
  std::string content;
  std::optional<ToolCall> tool_call;   // assistant turns only
  std::optional<std::string> tool_name;  // tool turns only

  friend bool operator==(const ChatTurn &, const ChatTurn &) = default;

  static ChatTurn system(std::string text) { return {Role::system, std::move(text), std::nullopt, std::nullopt}; }
  static ChatTurn user(std::string text) { return {Role::user, std::move(text), std::nullopt, std::nullopt}; }
  static ChatTurn assistant(std::string text) { return {Role::assistant, std::move(text), std::nullopt, std::nullopt}; }
  static ChatTurn assistant_call(ToolCall call) { return {Role::assistant, "", std::move(call), std::nullopt}; }
  static ChatTurn tool(std::string name, std::string text) { return {Role::tool, std::move(text), std::nullopt, std::move(name)}; }
};

nlohmann::json to_json(const ChatTurn & turn);
/// Throws ResponseMalformed on shape errors.
ChatTurn chat_turn_from_json(const nlohmann::json & j);

/// Checks role placement: tool_call only on assistant turns, and every tool
/// turn directly follows an assistant tool_call (or another tool turn).
bool well_formed(const std::vector<ChatTurn> & messages);

/// Latency and token usage; absent for offline backends so transcripts stay
/// reproducible.
struct TurnMeta
{
  std::optional<double> latency_ms;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
  std::optional<int> attempts;

  friend bool operator==(const TurnMeta &, const TurnMeta &) = default;
};

nlohmann::json to_json(const TurnMeta & meta);
TurnMeta turn_meta_from_json(const nlohmann::json & j);

struct CompletionRequest
{
  std::vector<ChatTurn> messages;
  nlohmann::json functions = nlohmann::json::array();  // exported tool schemas, may be empty
};

nlohmann::json to_json(const CompletionRequest & request);

struct Completion
{
  ChatTurn turn;
  TurnMeta meta;
};

/// A chat-completion backend. Implementations are safe to call from several
/// threads; each scene conversation is sequential on its own.
class Backend
{
public:
  virtual ~Backend() = default;

  /// Requires a non-empty message list starting with a system turn.
  /// Errors: BackendUnavailable, ResponseMalformed, ScriptExhausted,
  /// ReplayDivergence.
  virtual Completion complete(const CompletionRequest & request) = 0;
};

/// Validates the request preconditions shared by every backend.
void check_request(const CompletionRequest & request);

/// Rule-driven mock. A call takes the first unconsumed rule whose glob
/// `match` accepts the content of the last message; rules with `repeat`
/// are never consumed. No matching rule raises ScriptExhausted.
class ScriptedBackend : public Backend
{
public:
  struct Rule
  {
    std::string match = "*";
    ChatTurn reply;
    bool repeat = false;
  };

  explicit ScriptedBackend(std::vector<Rule> rules);

  /// Script file: {"rules": [{"match": "*", "reply": "text" | "tool_call": {"name", "arguments"},
  /// "repeat": false}, ...]}
  static std::vector<Rule> load_rules(const std::filesystem::path & path);
  static std::vector<Rule> rules_from_json(const nlohmann::json & doc);

  Completion complete(const CompletionRequest & request) override;

  std::size_t calls() const;

private:
  mutable std::mutex mutex_;
  std::vector<Rule> rules_;
  std::vector<bool> consumed_;
  std::size_t calls_ = 0;
};

/// Glob with '*' and '?' over the whole text.
bool glob_match(std::string_view pattern, std::string_view text);

/// One request/response pair as persisted in a transcript file.
struct Exchange
{
  nlohmann::json request;
  std::optional<ChatTurn> response;
  TurnMeta meta;
  std::optional<std::string> error_kind;
  std::optional<std::string> error_message;
};

nlohmann::json to_json(const Exchange & exchange);
Exchange exchange_from_json(const nlohmann::json & j);

/// Reads a JSON-lines exchange file. Throws ParseError.
std::vector<Exchange> load_exchanges(const std::filesystem::path & path);

/// Wraps a backend and appends every exchange, failures included, to a
/// JSON-lines file (truncated on construction).
class RecordingBackend : public Backend
{
public:
  RecordingBackend(std::shared_ptr<Backend> inner, const std::filesystem::path & path);

  Completion complete(const CompletionRequest & request) override;

  std::vector<Exchange> exchanges() const;

private:
  void append(const Exchange & exchange);

  std::shared_ptr<Backend> inner_;
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::vector<Exchange> exchanges_;
};

/// Serves recorded exchanges in order. A request that differs from the
/// recording raises ReplayDivergence naming the first differing field.
class ReplayBackend : public Backend
{
public:
  explicit ReplayBackend(std::vector<Exchange> exchanges);
  static std::unique_ptr<ReplayBackend> open(const std::filesystem::path & path);

  Completion complete(const CompletionRequest & request) override;

private:
  std::mutex mutex_;
  std::vector<Exchange> exchanges_;
  std::size_t next_ = 0;
};

/// Describes the first difference between two JSON documents, or "" when
/// they are equal.
std::string json_diff(const nlohmann::json & expected, const nlohmann::json & actual, const std::string & path = "$");

}  // namespace agent_driver::llm

#endif  // AGENT_DRIVER__LLM_INTERFACE_HPP_
