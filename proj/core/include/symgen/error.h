// Copyright 2026 The symgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYMGEN_ERROR_H_
#define SYMGEN_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace symgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid game configuration. `key()` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Malformed board literal or board violating the count/turn invariant.
class BoardError : public Error {
 public:
  using Error::Error;
};

// A move rejected by the rules. `rule()` names the violated rule.
class IllegalMoveError : public Error {
 public:
  IllegalMoveError(std::string rule, const std::string& message)
      : Error(message), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

// A computation refused because it exceeds a configured ceiling.
class CeilingError : public Error {
 public:
  using Error::Error;
};

// Cached artifact disagrees with the configuration or its own metadata.
class CacheError : public Error {
 public:
  using Error::Error;
};

// A search that ran past its deadline.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace symgen

#endif  // SYMGEN_ERROR_H_
