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

#ifndef AGENT_DRIVER__ERRORS_HPP_
#define AGENT_DRIVER__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace agent_driver
{

/// Base of every error raised by the library. `kind()` is a stable tag used
/// in rendered observations, transcripts and CLI messages.
class Error : public std::runtime_error
{
public:
  Error(std::string kind, const std::string & message)
  : std::runtime_error(message), kind_(std::move(kind))
  {
  }

  const std::string & kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define AGENT_DRIVER_DEFINE_ERROR(Name)                                        \
  class Name : public Error                                                    \
  {                                                                            \
  public:                                                                      \
    explicit Name(const std::string & message) : Error(#Name, message) {}     \
  };

// scene_model
AGENT_DRIVER_DEFINE_ERROR(ParseError)
AGENT_DRIVER_DEFINE_ERROR(DegenerateRange)
// tool_library
AGENT_DRIVER_DEFINE_ERROR(UnknownTool)
AGENT_DRIVER_DEFINE_ERROR(ArgumentError)
AGENT_DRIVER_DEFINE_ERROR(UnknownObject)
AGENT_DRIVER_DEFINE_ERROR(BadTimestep)
AGENT_DRIVER_DEFINE_ERROR(UnknownLayer)
// cognitive_memory
AGENT_DRIVER_DEFINE_ERROR(LengthMismatch)
AGENT_DRIVER_DEFINE_ERROR(EmptyStore)
// llm_interface
AGENT_DRIVER_DEFINE_ERROR(BackendUnavailable)
AGENT_DRIVER_DEFINE_ERROR(ResponseMalformed)
AGENT_DRIVER_DEFINE_ERROR(ScriptExhausted)
AGENT_DRIVER_DEFINE_ERROR(ReplayDivergence)
// reasoning_engine
AGENT_DRIVER_DEFINE_ERROR(MissingGroundTruth)
// evaluation
AGENT_DRIVER_DEFINE_ERROR(EmptySet)
AGENT_DRIVER_DEFINE_ERROR(UnknownCategory)

#undef AGENT_DRIVER_DEFINE_ERROR

/// Invariant violation while loading; `field()` is the JSON path of the
/// offending value, e.g. "predictions[0].object_id".
class ValidationError : public Error
{
public:
  ValidationError(std::string field, const std::string & message)
  : Error("ValidationError", field + ": " + message), field_(std::move(field))
  {
  }

  const std::string & field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Raised when a text trajectory cannot be decoded into exactly six finite
/// waypoints.
class DecodeError : public Error
{
public:
  DecodeError(std::size_t pairs_found, std::vector<std::string> bad_tokens, const std::string & message)
  : Error("DecodeError", message), pairs_found_(pairs_found), bad_tokens_(std::move(bad_tokens))
  {
  }

  std::size_t pairs_found() const noexcept { return pairs_found_; }
  const std::vector<std::string> & bad_tokens() const noexcept { return bad_tokens_; }

private:
  std::size_t pairs_found_;
  std::vector<std::string> bad_tokens_;
};

}  // namespace agent_driver

#endif  // AGENT_DRIVER__ERRORS_HPP_
