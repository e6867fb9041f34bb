// Copyright 2026 The simulbeam Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace simulbeam {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

enum class EventKind { Intermediate, Final };

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);

// Caller broke an operation's precondition (bad id, wrong event kind, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed external input: event logs, vocabulary files, configs.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or engine configuration.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace simulbeam
