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

#include "agent_driver/llm_interface.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace agent_driver::llm
{

using nlohmann::json;

std::string_view to_string(Role role)
{
  switch (role) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
    case Role::tool:
      return "tool";
  }
  return "user";
}

std::optional<Role> parse_role(std::string_view text)
{
  for (auto r : {Role::system, Role::user, Role::assistant, Role::tool}) {
    if (to_string(r) == text) {
      return r;
    }
  }
  return std::nullopt;
}

json to_json(const ChatTurn & turn)
{
  json j{{"role", to_string(turn.role)}, {"content", turn.content}};
  if (turn.tool_call) {
    j["tool_call"] = json{{"name", turn.tool_call->name}, {"arguments", turn.tool_call->arguments}};
  }
  if (turn.tool_name) {
    j["tool_name"] = *turn.tool_name;
  }
  return j;
}

ChatTurn chat_turn_from_json(const json & j)
{
  if (!j.is_object() || !j.contains("role") || !j.at("role").is_string()) {
    throw ResponseMalformed("chat turn needs a string 'role'");
  }
  const auto role = parse_role(j.at("role").get<std::string>());
  if (!role) {
    throw ResponseMalformed(fmt::format("unknown role '{}'", j.at("role").get<std::string>()));
  }
  ChatTurn turn;
  turn.role = *role;
  if (j.contains("content") && j.at("content").is_string()) {
    turn.content = j.at("content").get<std::string>();
  }
  if (j.contains("tool_call") && !j.at("tool_call").is_null()) {
    const auto & tc = j.at("tool_call");
    if (!tc.is_object() || !tc.contains("name") || !tc.at("name").is_string()) {
      throw ResponseMalformed("tool_call needs a string 'name'");
    }
    turn.tool_call = ToolCall{tc.at("name").get<std::string>(), tc.value("arguments", json::object())};
  }
  if (j.contains("tool_name") && j.at("tool_name").is_string()) {
    turn.tool_name = j.at("tool_name").get<std::string>();
  }
  return turn;
}

bool well_formed(const std::vector<ChatTurn> & messages)
{
  bool after_call = false;
  for (const auto & turn : messages) {
    if (turn.tool_call && turn.role != Role::assistant) {
      return false;
    }
    if (turn.role == Role::tool) {
      if (!after_call || !turn.tool_name) {
        return false;
      }
      continue;
    }
    after_call = turn.role == Role::assistant && turn.tool_call.has_value();
  }
  return true;
}

json to_json(const TurnMeta & meta)
{
  json j = json::object();
  if (meta.latency_ms) {
    j["latency_ms"] = *meta.latency_ms;
  }
  if (meta.prompt_tokens) {
    j["prompt_tokens"] = *meta.prompt_tokens;
  }
  if (meta.completion_tokens) {
    j["completion_tokens"] = *meta.completion_tokens;
  }
  if (meta.attempts) {
    j["attempts"] = *meta.attempts;
  }
  return j;
}

TurnMeta turn_meta_from_json(const json & j)
{
  TurnMeta meta;
  if (!j.is_object()) {
    return meta;
  }
  if (j.contains("latency_ms") && j.at("latency_ms").is_number()) {
    meta.latency_ms = j.at("latency_ms").get<double>();
  }
  if (j.contains("prompt_tokens") && j.at("prompt_tokens").is_number_integer()) {
    meta.prompt_tokens = j.at("prompt_tokens").get<long long>();
  }
  if (j.contains("completion_tokens") && j.at("completion_tokens").is_number_integer()) {
    meta.completion_tokens = j.at("completion_tokens").get<long long>();
  }
  if (j.contains("attempts") && j.at("attempts").is_number_integer()) {
    meta.attempts = j.at("attempts").get<int>();
  }
  return meta;
}

json to_json(const CompletionRequest & request)
{
  json messages = json::array();
  for (const auto & m : request.messages) {
    messages.push_back(to_json(m));
  }
  return json{{"messages", messages}, {"functions", request.functions}};
}

void check_request(const CompletionRequest & request)
{
  if (request.messages.empty() || request.messages.front().role != Role::system) {
    throw ResponseMalformed("a completion request needs at least one message, starting with a system turn");
  }
}

// ---------------------------------------------------------------------------

bool glob_match(std::string_view pattern, std::string_view text)
{
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') {
    ++p;
  }
  return p == pattern.size();
}

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules)
: rules_(std::move(rules)), consumed_(rules_.size(), false)
{
}

std::vector<ScriptedBackend::Rule> ScriptedBackend::rules_from_json(const json & doc)
{
  if (!doc.is_object() || !doc.contains("rules") || !doc.at("rules").is_array()) {
    throw ParseError("script must be an object with a 'rules' array");
  }
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < doc.at("rules").size(); ++i) {
    const auto & r = doc.at("rules")[i];
    if (!r.is_object()) {
      throw ParseError(fmt::format("rules[{}] must be an object", i));
    }
    Rule rule;
    rule.match = r.value("match", std::string("*"));
    rule.repeat = r.value("repeat", false);
    if (r.contains("tool_call")) {
      const auto & tc = r.at("tool_call");
      if (!tc.is_object() || !tc.contains("name") || !tc.at("name").is_string()) {
        throw ParseError(fmt::format("rules[{}].tool_call needs a string 'name'", i));
      }
      rule.reply = ChatTurn::assistant_call(ToolCall{tc.at("name").get<std::string>(), tc.value("arguments", json::object())});
    } else if (r.contains("reply") && r.at("reply").is_string()) {
      rule.reply = ChatTurn::assistant(r.at("reply").get<std::string>());
    } else {
      throw ParseError(fmt::format("rules[{}] needs a 'reply' string or a 'tool_call'", i));
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<ScriptedBackend::Rule> ScriptedBackend::load_rules(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open script '{}'", path.string()));
  }
  try {
    return rules_from_json(json::parse(in));
  } catch (const json::parse_error & e) {
    throw ParseError(fmt::format("malformed script '{}': {}", path.string(), e.what()));
  }
}

Completion ScriptedBackend::complete(const CompletionRequest & request)
{
  check_request(request);
  const auto & last = request.messages.back().content;
  std::lock_guard lock(mutex_);
  ++calls_;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (consumed_[i] || !glob_match(rules_[i].match, last)) {
      continue;
    }
    if (!rules_[i].repeat) {
      consumed_[i] = true;
    }
    return Completion{rules_[i].reply, TurnMeta{}};
  }
  throw ScriptExhausted(fmt::format("no scripted reply left for call {}", calls_));
}

std::size_t ScriptedBackend::calls() const
{
  std::lock_guard lock(mutex_);
  return calls_;
}

// ---------------------------------------------------------------------------

json to_json(const Exchange & exchange)
{
  json j{{"request", exchange.request}, {"meta", to_json(exchange.meta)}};
  if (exchange.response) {
    j["response"] = to_json(*exchange.response);
  }
  if (exchange.error_kind) {
    j["error"] = json{{"kind", *exchange.error_kind}, {"message", exchange.error_message.value_or("")}};
  }
  return j;
}

Exchange exchange_from_json(const json & j)
{
  if (!j.is_object() || !j.contains("request")) {
    throw ParseError("exchange needs a 'request'");
  }
  Exchange ex;
  ex.request = j.at("request");
  if (j.contains("response")) {
    try {
      ex.response = chat_turn_from_json(j.at("response"));
    } catch (const ResponseMalformed & e) {
      throw ParseError(fmt::format("bad recorded response: {}", e.what()));
    }
  }
  if (j.contains("meta")) {
    ex.meta = turn_meta_from_json(j.at("meta"));
  }
  if (j.contains("error") && j.at("error").is_object()) {
    ex.error_kind = j.at("error").value("kind", std::string("Error"));
    ex.error_message = j.at("error").value("message", std::string());
  }
  if (!ex.response && !ex.error_kind) {
    throw ParseError("exchange needs a 'response' or an 'error'");
  }
  return ex;
}

std::vector<Exchange> load_exchanges(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open transcript '{}'", path.string()));
  }
  std::vector<Exchange> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(exchange_from_json(json::parse(line)));
    } catch (const json::parse_error & e) {
      throw ParseError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, const std::filesystem::path & path)
: inner_(std::move(inner)), out_(path, std::ios::trunc)
{
  if (!out_) {
    throw ParseError(fmt::format("cannot write transcript '{}'", path.string()));
  }
}

void RecordingBackend::append(const Exchange & exchange)
{
  std::lock_guard lock(mutex_);
  out_ << to_json(exchange).dump() << '\n';
  out_.flush();
  exchanges_.push_back(exchange);
}

Completion RecordingBackend::complete(const CompletionRequest & request)
{
  Exchange ex;
  ex.request = to_json(request);
  try {
    auto completion = inner_->complete(request);
    ex.response = completion.turn;
    ex.meta = completion.meta;
    append(ex);
    return completion;
  } catch (const Error & e) {
    ex.error_kind = e.kind();
    ex.error_message = e.what();
    append(ex);
    throw;
  }
}

std::vector<Exchange> RecordingBackend::exchanges() const
{
  std::lock_guard lock(mutex_);
  return exchanges_;
}

ReplayBackend::ReplayBackend(std::vector<Exchange> exchanges) : exchanges_(std::move(exchanges)) {}

std::unique_ptr<ReplayBackend> ReplayBackend::open(const std::filesystem::path & path)
{
  return std::make_unique<ReplayBackend>(load_exchanges(path));
}

Completion ReplayBackend::complete(const CompletionRequest & request)
{
  check_request(request);
  std::lock_guard lock(mutex_);
  if (next_ >= exchanges_.size()) {
    throw ReplayDivergence(fmt::format(
      "request #{} has no recorded counterpart ({} exchanges recorded)", next_ + 1, exchanges_.size()));
  }
  const auto & ex = exchanges_[next_];
  const auto diff = json_diff(ex.request, to_json(request));
  if (!diff.empty()) {
    throw ReplayDivergence(fmt::format("request #{} differs from the recording: {}", next_ + 1, diff));
  }
  ++next_;
  if (ex.error_kind) {
    const auto & kind = *ex.error_kind;
    const auto message = ex.error_message.value_or("");
    if (kind == "BackendUnavailable") {
      throw BackendUnavailable(message);
    }
    if (kind == "ResponseMalformed") {
      throw ResponseMalformed(message);
    }
    if (kind == "ScriptExhausted") {
      throw ScriptExhausted(message);
    }
    throw Error(kind, message);
  }
  return Completion{*ex.response, ex.meta};
}

namespace
{

std::string abbreviate(const json & j)
{
  auto text = j.dump();
  if (text.size() > 160) {
    text = text.substr(0, 157) + "...";
  }
  return text;
}

}  // namespace

std::string json_diff(const json & expected, const json & actual, const std::string & path)
{
  const bool both_numbers = expected.is_number() && actual.is_number();
  if (expected.type() != actual.type() && !both_numbers) {
    return fmt::format("{}: recorded {} but got {}", path, abbreviate(expected), abbreviate(actual));
  }
  if (expected.is_object()) {
    for (const auto & [key, value] : expected.items()) {
      if (!actual.contains(key)) {
        return fmt::format("{}.{}: missing in request", path, key);
      }
      auto d = json_diff(value, actual.at(key), path + "." + key);
      if (!d.empty()) {
        return d;
      }
    }
    for (const auto & [key, value] : actual.items()) {
      if (!expected.contains(key)) {
        return fmt::format("{}.{}: not in recording", path, key);
      }
    }
    return "";
  }
  if (expected.is_array()) {
    const auto n = std::min(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto d = json_diff(expected[i], actual[i], fmt::format("{}[{}]", path, i));
      if (!d.empty()) {
        return d;
      }
    }
    if (expected.size() != actual.size()) {
      return fmt::format("{}: recorded {} elements but got {}", path, expected.size(), actual.size());
    }
    return "";
  }
  if (expected != actual) {
    return fmt::format("{}: recorded {} but got {}", path, abbreviate(expected), abbreviate(actual));
  }
  return "";
}

}  // namespace agent_driver::llm
