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
#include "agent_driver/http_backend.hpp"
#include "stub_server.hpp"

#include <gtest/gtest.h>

#include <future>

namespace agent_driver::llm
{
namespace
{

using nlohmann::json;
using agent_driver::testing::StubChatServer;

CompletionRequest sample_request()
{
  CompletionRequest req;
  req.messages = {ChatTurn::system("sys"), ChatTurn::user("Which tools?"),
    ChatTurn::assistant_call({"get_current_shoulder", json::object()}),
    ChatTurn::tool("get_current_shoulder", "left 3.00 m"), ChatTurn::user("continue")};
  req.functions = json::array({json{{"name", "get_current_shoulder"}, {"description", "d"},
    {"parameters", {{"type", "object"}, {"properties", json::object()}}}}});
  return req;
}

HttpConfig fast_config(const std::string & endpoint)
{
  HttpConfig cfg;
  cfg.endpoint = endpoint;
  cfg.retry.initial_backoff = std::chrono::milliseconds(20);
  cfg.timeout = std::chrono::seconds(5);
  return cfg;
}

TEST(WireFormat, RequestShape)
{
  const auto wire = build_wire_request(sample_request(), HttpConfig{});
  EXPECT_EQ(wire.at("model"), "gpt-3.5-turbo-0613");
  EXPECT_EQ(wire.at("temperature"), 0.0);
  const auto & msgs = wire.at("messages");
  ASSERT_EQ(msgs.size(), 5u);
  EXPECT_EQ(msgs[0].at("role"), "system");
  EXPECT_EQ(msgs[2].at("role"), "assistant");
  EXPECT_TRUE(msgs[2].at("content").is_null());
  EXPECT_EQ(msgs[2].at("function_call").at("name"), "get_current_shoulder");
  EXPECT_TRUE(msgs[2].at("function_call").at("arguments").is_string());
  EXPECT_EQ(msgs[3].at("role"), "function");
  EXPECT_EQ(msgs[3].at("name"), "get_current_shoulder");
  EXPECT_EQ(wire.at("functions").size(), 1u);

  CompletionRequest plain{{ChatTurn::system("s")}, json::array()};
  EXPECT_FALSE(build_wire_request(plain, HttpConfig{}).contains("functions"));
}

TEST(WireFormat, ResponseParsing)
{
  auto c = parse_wire_response(StubChatServer::text_reply("hello").dump());
  EXPECT_EQ(c.turn.content, "hello");
  EXPECT_EQ(c.meta.prompt_tokens, 11);
  const auto call = json{{"choices", {{{"message", {{"role", "assistant"}, {"content", nullptr},
    {"function_call", {{"name", "get_current_shoulder"}, {"arguments", "{\"a\": 1}"}}}}}}}}};
  c = parse_wire_response(call.dump());
  ASSERT_TRUE(c.turn.tool_call.has_value());
  EXPECT_EQ(c.turn.tool_call->arguments.at("a"), 1);
  EXPECT_THROW(parse_wire_response("not json"), ResponseMalformed);
  EXPECT_THROW(parse_wire_response(R"({"choices": []})"), ResponseMalformed);
}

TEST(HttpBackend, SendsSchemaAndAuth)
{
  StubChatServer server;
  auto cfg = fast_config(server.endpoint());
  cfg.api_key = "secret";
  HttpBackend backend(cfg);
  const auto c = backend.complete(sample_request());
  EXPECT_EQ(c.turn.content, "Yes");
  EXPECT_EQ(c.meta.attempts, 1);
  ASSERT_TRUE(c.meta.latency_ms.has_value());
  const auto got = server.received();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].authorization, "Bearer secret");
  EXPECT_EQ(got[0].content_type, "application/json");
  EXPECT_EQ(got[0].body, build_wire_request(sample_request(), cfg));
}

TEST(HttpBackend, RetriesTransientStatuses)
{
  StubChatServer server;
  server.inject({429, 503});
  HttpBackend backend(fast_config(server.endpoint()));
  const auto c = backend.complete(sample_request());
  EXPECT_EQ(c.meta.attempts, 3);
  const auto got = server.received();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_GE(got[1].at - got[0].at, std::chrono::milliseconds(18));
  EXPECT_GE(got[2].at - got[1].at, std::chrono::milliseconds(36));
}

TEST(HttpBackend, GivesUpAfterMaxAttempts)
{
  StubChatServer server;
  server.inject({500, 502, 503, 504});
  HttpBackend backend(fast_config(server.endpoint()));
  EXPECT_THROW(backend.complete(sample_request()), BackendUnavailable);
  EXPECT_EQ(server.received().size(), 3u);
}

TEST(HttpBackend, ClientErrorsAreNotRetried)
{
  StubChatServer server;
  server.inject({400});
  HttpBackend backend(fast_config(server.endpoint()));
  EXPECT_THROW(backend.complete(sample_request()), BackendUnavailable);
  EXPECT_EQ(server.received().size(), 1u);
}

TEST(HttpBackend, UnreachableEndpoint)
{
  auto cfg = fast_config("http://127.0.0.1:1/v1/chat/completions");
  cfg.retry.max_attempts = 2;
  HttpBackend backend(cfg);
  EXPECT_THROW(backend.complete(sample_request()), BackendUnavailable);
  EXPECT_THROW(HttpBackend(fast_config("localhost:80")), BackendUnavailable);
}

TEST(HttpBackend, BoundsConcurrency)
{
  StubChatServer server;
  server.set_delay(std::chrono::milliseconds(50));
  auto cfg = fast_config(server.endpoint());
  cfg.max_in_flight = 2;
  HttpBackend backend(cfg);
  std::vector<std::future<Completion>> futures;
  for (int i = 0; i < 8; ++i) {
    futures.push_back(std::async(std::launch::async, [&] { return backend.complete(sample_request()); }));
  }
  for (auto & f : futures) {
    EXPECT_EQ(f.get().turn.content, "Yes");
  }
  EXPECT_LE(server.peak_in_flight(), 2);
  EXPECT_EQ(server.received().size(), 8u);
}

TEST(HttpBackend, MalformedBodyIsReported)
{
  StubChatServer server;
  server.set_reply(json{{"unexpected", true}});
  HttpBackend backend(fast_config(server.endpoint()));
  EXPECT_THROW(backend.complete(sample_request()), ResponseMalformed);
}

}  // namespace
}  // namespace agent_driver::llm
