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

#include "agent_driver/http_backend.hpp"

#include "agent_driver/errors.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <thread>

namespace agent_driver::llm
{

using nlohmann::json;

json build_wire_request(const CompletionRequest & request, const HttpConfig & config)
{
  json messages = json::array();
  for (const auto & turn : request.messages) {
    switch (turn.role) {
      case Role::system:
      case Role::user:
        messages.push_back(json{{"role", to_string(turn.role)}, {"content", turn.content}});
        break;
      case Role::assistant:
        if (turn.tool_call) {
          const auto & args = turn.tool_call->arguments;
          messages.push_back(json{{"role", "assistant"}, {"content", nullptr},
            {"function_call",
              {{"name", turn.tool_call->name}, {"arguments", args.is_string() ? args.get<std::string>() : args.dump()}}}});
        } else {
          messages.push_back(json{{"role", "assistant"}, {"content", turn.content}});
        }
        break;
      case Role::tool:
        messages.push_back(json{{"role", "function"}, {"name", turn.tool_name.value_or("")}, {"content", turn.content}});
        break;
    }
  }
  json body{{"model", config.model}, {"temperature", config.temperature}, {"messages", messages}};
  if (!request.functions.empty()) {
    body["functions"] = request.functions;
  }
  return body;
}

Completion parse_wire_response(const std::string & body)
{
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error & e) {
    throw ResponseMalformed(fmt::format("response is not JSON: {}", e.what()));
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc.at("choices").is_array() || doc.at("choices").empty()) {
    throw ResponseMalformed("response has no choices");
  }
  const auto & choice = doc.at("choices")[0];
  if (!choice.is_object() || !choice.contains("message") || !choice.at("message").is_object()) {
    throw ResponseMalformed("choices[0] has no message");
  }
  const auto & message = choice.at("message");

  Completion out;
  out.turn.role = Role::assistant;
  if (message.contains("content") && message.at("content").is_string()) {
    out.turn.content = message.at("content").get<std::string>();
  } else if (message.contains("content") && !message.at("content").is_null()) {
    throw ResponseMalformed("message content must be a string or null");
  }
  if (message.contains("function_call") && !message.at("function_call").is_null()) {
    const auto & fc = message.at("function_call");
    if (!fc.is_object() || !fc.contains("name") || !fc.at("name").is_string()) {
      throw ResponseMalformed("function_call needs a string name");
    }
    ToolCall call{fc.at("name").get<std::string>(), json::object()};
    if (fc.contains("arguments") && fc.at("arguments").is_string()) {
      const auto & raw = fc.at("arguments").get_ref<const std::string &>();
      // Undecodable arguments are the model's output, not a transport error;
      // keep the raw text so dispatch can report it.
      try {
        call.arguments = raw.empty() ? json::object() : json::parse(raw);
      } catch (const json::parse_error &) {
        call.arguments = raw;
      }
    } else if (fc.contains("arguments") && fc.at("arguments").is_object()) {
      call.arguments = fc.at("arguments");
    }
    out.turn.tool_call = std::move(call);
  }
  if (doc.contains("usage") && doc.at("usage").is_object()) {
    const auto & usage = doc.at("usage");
    if (usage.contains("prompt_tokens") && usage.at("prompt_tokens").is_number_integer()) {
      out.meta.prompt_tokens = usage.at("prompt_tokens").get<long long>();
    }
    if (usage.contains("completion_tokens") && usage.at("completion_tokens").is_number_integer()) {
      out.meta.completion_tokens = usage.at("completion_tokens").get<long long>();
    }
  }
  return out;
}

struct HttpBackend::Endpoint
{
  std::string scheme_host_port;
  std::string path;
};

HttpBackend::HttpBackend(HttpConfig config)
: config_(std::move(config)), slots_(std::clamp(config_.max_in_flight, 1, 1024))
{
  if (config_.max_in_flight < 1) {
    throw BackendUnavailable("max_in_flight must be at least 1");
  }
  if (config_.temperature < 0.0) {
    throw BackendUnavailable("temperature must be non-negative");
  }
  const auto pos = config_.endpoint.find("://");
  if (pos == std::string::npos) {
    throw BackendUnavailable(fmt::format("endpoint '{}' is not an absolute URL", config_.endpoint));
  }
  const auto slash = config_.endpoint.find('/', pos + 3);
  endpoint_ = std::make_unique<Endpoint>();
  endpoint_->scheme_host_port = config_.endpoint.substr(0, slash);
  endpoint_->path = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

HttpBackend::~HttpBackend() = default;

Completion HttpBackend::complete(const CompletionRequest & request)
{
  check_request(request);
  const auto body = build_wire_request(request, config_).dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace(config_.auth_header, "Bearer " + config_.api_key);
  }

  const auto started = std::chrono::steady_clock::now();
  std::string last_error;
  const int attempts = std::max(1, config_.retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Result res{nullptr, httplib::Error::Unknown};
    {
      slots_.acquire();
      try {
        httplib::Client client(endpoint_->scheme_host_port);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        res = client.Post(endpoint_->path, headers, body, "application/json");
      } catch (...) {
        slots_.release();
        throw;
      }
      slots_.release();
    }

    bool retryable = false;
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
      retryable = true;
    } else if (res->status == 200) {
      auto completion = parse_wire_response(res->body);
      completion.meta.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      completion.meta.attempts = attempt;
      return completion;
    } else {
      last_error = fmt::format("HTTP {}", res->status);
      retryable = res->status == 429 || res->status >= 500;
    }

    if (!retryable) {
      throw BackendUnavailable(fmt::format("{} from {}", last_error, config_.endpoint));
    }
    if (attempt < attempts) {
      const double scale = std::pow(config_.retry.backoff_multiplier, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(
        static_cast<double>(config_.retry.initial_backoff.count()) * scale));
    }
  }
  throw BackendUnavailable(
    fmt::format("{} from {} after {} attempts", last_error, config_.endpoint, attempts));
}

}  // namespace agent_driver::llm
