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

#ifndef AGENT_DRIVER__HTTP_BACKEND_HPP_
#define AGENT_DRIVER__HTTP_BACKEND_HPP_

#include "agent_driver/llm_interface.hpp"

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

namespace agent_driver::llm
{

struct RetryPolicy
{
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
};

struct HttpConfig
{
  /// Full URL of the chat-completions route, e.g.
  /// "http://127.0.0.1:8000/v1/chat/completions".
  std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 0.0;
  int max_in_flight = 4;
  RetryPolicy retry;
  std::string auth_header = "Authorization";
  std::string api_key;  // sent as "Bearer <key>" when non-empty
  std::chrono::seconds timeout{60};
};

/// Builds the wire body: {"model", "temperature", "messages", "functions"?}.
/// Tool turns are sent as role "function"; assistant tool calls as
/// "function_call" with JSON-string arguments.
nlohmann::json build_wire_request(const CompletionRequest & request, const HttpConfig & config);

/// Parses choices[0].message (+usage). Throws ResponseMalformed.
Completion parse_wire_response(const std::string & body);

/// Chat-completions client with bounded concurrency and retry on transport
/// errors, 429 and 5xx.
class HttpBackend : public Backend
{
public:
  explicit HttpBackend(HttpConfig config);
  ~HttpBackend() override;

  Completion complete(const CompletionRequest & request) override;

  const HttpConfig & config() const { return config_; }

private:
  struct Endpoint;

  HttpConfig config_;
  std::unique_ptr<Endpoint> endpoint_;
  std::counting_semaphore<1024> slots_;
};

}  // namespace agent_driver::llm

#endif  // AGENT_DRIVER__HTTP_BACKEND_HPP_
